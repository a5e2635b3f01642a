#include "dirt/models/cantilever.hpp"

#include <cmath>
#include <memory>
#include <numbers>

#include <fmt/core.h>

#include "dirt/common/errors.hpp"
#include "dirt/common/math.hpp"

namespace dirt {

std::vector<double> cantilever_deflection(std::span<const double> flexibility, double P, double L) {
    const std::size_t n = flexibility.size();
    if (n < 2) throw DomainError("cantilever_deflection: mesh needs at least two nodes");
    if (!(L > 0.0)) throw DomainError("cantilever_deflection: length must be positive");
    for (double f : flexibility)
        if (!(f > 0.0)) throw DomainError(fmt::format("cantilever_deflection: nonpositive flexibility {}", f));
    const double h = L / static_cast<double>(n - 1);
    std::vector<double> w(n, 0.0);
    double slope = 0.0;
    double kappa_prev = flexibility[0] * P * L;
    for (std::size_t i = 1; i < n; ++i) {
        const double x = h * static_cast<double>(i);
        const double kappa = flexibility[i] * P * (L - x);
        const double slope_next = slope + 0.5 * h * (kappa_prev + kappa);
        w[i] = w[i - 1] + 0.5 * h * (slope + slope_next);
        slope = slope_next;
        kappa_prev = kappa;
    }
    return w;
}

double interpolate_on_mesh(std::span<const double> values, double L, double x) {
    if (!(x >= 0.0 && x <= L)) throw DomainError(fmt::format("interpolate_on_mesh: x = {} outside [0, {}]", x, L));
    const std::size_t n = values.size();
    const double t = x / L * static_cast<double>(n - 1);
    const std::size_t i = std::min(static_cast<std::size_t>(t), n - 2);
    const double f = t - static_cast<double>(i);
    return (1.0 - f) * values[i] + f * values[i + 1];
}

void CantileverOptions::validate() const {
    if (terms < 1 || terms > mesh_nodes) throw ConfigError(fmt::format("cantilever: terms = {} outside [1, {}]", terms, mesh_nodes));
    if (true_terms < 1 || true_terms > mesh_nodes) throw ConfigError("cantilever: true_terms outside [1, mesh_nodes]");
    if (observations < 1) throw ConfigError("cantilever: need at least one observation");
    if (!(noise_std > 0.0) || !(noise_correlation_length > 0.0)) throw ConfigError("cantilever: noise parameters must be positive");
    if (!(length > 0.0) || !(correlation_length > 0.0) || !(true_correlation_length > 0.0))
        throw ConfigError("cantilever: lengths must be positive");
    if (!(flexibility_mean > 0.0) || !(flexibility_std > 0.0)) throw ConfigError("cantilever: flexibility moments must be positive");
    if (!(half_width > 0.0)) throw ConfigError("cantilever: half_width must be positive");
    if (xi_true && xi_true->size() != terms) throw ConfigError("cantilever: xi_true length differs from terms");
}

namespace {

struct Posterior {
    KLField field;
    std::vector<double> sensors;
    Eigen::VectorXd data;
    Eigen::LLT<Eigen::MatrixXd> noise;
    double log_norm = 0.0;
    double load = 0.0, length = 0.0;

    std::vector<double> deflection(std::span<const double> xi) const {
        return cantilever_deflection(field_realize(field, xi), load, length);
    }
};

}  // namespace

CantileverInstance cantilever_instance(const CantileverOptions& opts) {
    opts.validate();
    CantileverInstance inst;
    inst.prior_field = lognormal_kl(opts.flexibility_mean, opts.flexibility_std, opts.correlation_length, opts.length,
                                    opts.mesh_nodes, opts.terms);

    Rng rng = make_rng(opts.seed, 0);
    if (opts.xi_true) {
        inst.true_flexibility = field_realize(inst.prior_field, *opts.xi_true);
    } else {
        const KLField truth = lognormal_kl(opts.flexibility_mean, opts.flexibility_std, opts.true_correlation_length,
                                           opts.length, opts.mesh_nodes, opts.true_terms);
        std::vector<double> xi(opts.true_terms);
        fill_standard_normal(rng, xi);
        inst.true_flexibility = field_realize(truth, xi);
    }

    const std::size_t m = opts.observations;
    inst.sensors.resize(m);
    for (std::size_t j = 0; j < m; ++j) inst.sensors[j] = opts.length * static_cast<double>(j + 1) / static_cast<double>(m);

    const auto mi = static_cast<Eigen::Index>(m);
    inst.noise_covariance.resize(mi, mi);
    const CovarianceKernel noise_kernel{CovarianceKernel::Kind::exponential, opts.noise_std, opts.noise_correlation_length};
    for (Eigen::Index a = 0; a < mi; ++a)
        for (Eigen::Index b = 0; b < mi; ++b)
            inst.noise_covariance(a, b) = noise_kernel(inst.sensors[static_cast<std::size_t>(a)], inst.sensors[static_cast<std::size_t>(b)]);

    auto post = std::make_shared<Posterior>();
    post->field = inst.prior_field;
    post->sensors = inst.sensors;
    post->load = opts.load;
    post->length = opts.length;
    post->noise.compute(inst.noise_covariance);
    if (post->noise.info() != Eigen::Success) throw NumericalError("cantilever: noise covariance is not positive definite");

    const auto w_true = cantilever_deflection(inst.true_flexibility, opts.load, opts.length);
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(mi);
    if (opts.add_noise) {
        Eigen::VectorXd z(mi);
        for (Eigen::Index a = 0; a < mi; ++a) z[a] = standard_normal(rng);
        eta = post->noise.matrixL() * z;
    }
    post->data.resize(mi);
    inst.data.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        inst.data[j] = interpolate_on_mesh(w_true, opts.length, inst.sensors[j]) + eta[static_cast<Eigen::Index>(j)];
        post->data[static_cast<Eigen::Index>(j)] = inst.data[j];
    }
    double log_det = 0.0;
    for (Eigen::Index a = 0; a < mi; ++a) log_det += 2.0 * std::log(post->noise.matrixL()(a, a));
    post->log_norm = -0.5 * log_det - static_cast<double>(m) * kLogSqrt2Pi;

    BayesianReliabilityProblem& p = inst.problem;
    p = standard_normal_problem(
        fmt::format("cantilever_M{}_lc{}_m{}", opts.terms, opts.correlation_length, m), opts.terms,
        [post, limit = opts.deflection_limit()](std::span<const double> xi) { return limit - post->deflection(xi).back(); },
        opts.half_width);
    p.log_likelihood = [post](std::span<const double> xi) {
        const auto w = post->deflection(xi);
        Eigen::VectorXd r(post->data.size());
        for (Eigen::Index j = 0; j < r.size(); ++j)
            r[j] = post->data[j] - interpolate_on_mesh(w, post->length, post->sensors[static_cast<std::size_t>(j)]);
        const Eigen::VectorXd y = post->noise.matrixL().solve(r);
        return post->log_norm - 0.5 * y.squaredNorm();
    };
    p.likelihood_bound = std::exp(post->log_norm);
    return inst;
}

BayesianReliabilityProblem cantilever_problem(const CantileverOptions& opts) { return cantilever_instance(opts).problem; }

}  // namespace dirt
