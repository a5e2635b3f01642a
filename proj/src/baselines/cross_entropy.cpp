#include "dirt/baselines/cross_entropy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>
#include <fmt/core.h>

#include "dirt/common/errors.hpp"
#include "dirt/common/math.hpp"

namespace dirt {
namespace {

constexpr double kRegularization = 1e-8;

// log N(u; 0, I) - log N(u; mu, L L^T).
double log_ratio(const Eigen::VectorXd& u, const Eigen::VectorXd& mu, const Eigen::LLT<Eigen::MatrixXd>& llt, double log_det) {
    const Eigen::VectorXd y = llt.matrixL().solve(u - mu);
    return -0.5 * u.squaredNorm() + 0.5 * y.squaredNorm() + 0.5 * log_det;
}

}  // namespace

void CeConfig::validate(std::size_t dim) const {
    if (!(elite_fraction > 0.0 && elite_fraction < 1.0)) throw ConfigError("CE: elite fraction outside (0, 1)");
    const auto elite = static_cast<std::size_t>(std::floor(static_cast<double>(samples_per_level) * elite_fraction));
    if (elite < dim + 1)
        throw ConfigError(fmt::format("CE: {} elites cannot estimate a covariance in {} dimensions", elite, dim));
    if (max_levels < 1) throw ConfigError("CE: max_levels must be positive");
}

EstimateReport cross_entropy(const ScalarFn& lsf_standard, std::size_t dim, const CeConfig& cfg, std::uint64_t seed) {
    if (dim == 0) throw ConfigError("CE: dimension must be positive");
    cfg.validate(dim);
    const auto t0 = std::chrono::steady_clock::now();
    const auto d = static_cast<Eigen::Index>(dim);
    const std::size_t n = cfg.samples_per_level;
    const auto elite = static_cast<std::size_t>(std::floor(static_cast<double>(n) * cfg.elite_fraction));
    Rng rng = make_rng(seed, 0);

    EstimateReport r;
    r.method = "ce";
    r.seed = seed;
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd U(d, static_cast<Eigen::Index>(n));
    std::vector<double> g(n), lw(n);
    double prev = std::numeric_limits<double>::infinity();

    for (std::size_t level = 0; level < cfg.max_levels; ++level) {
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() != Eigen::Success) {
            cov.diagonal().array() += kRegularization;
            llt.compute(cov);
            r.warnings.push_back(fmt::format("level {}: covariance regularized", level));
            if (llt.info() != Eigen::Success) throw NumericalError("CE: covariance is not positive definite");
        }
        double log_det = 0.0;
        for (Eigen::Index k = 0; k < d; ++k) log_det += 2.0 * std::log(llt.matrixL()(k, k));
        Eigen::VectorXd z(d);
        for (std::size_t i = 0; i < n; ++i) {
            for (Eigen::Index k = 0; k < d; ++k) z[k] = standard_normal(rng);
            U.col(static_cast<Eigen::Index>(i)) = mu + llt.matrixL() * z;
            const Eigen::VectorXd ui = U.col(static_cast<Eigen::Index>(i));
            g[i] = lsf_standard(std::span<const double>(ui.data(), dim));
            if (std::isnan(g[i])) throw EvaluationError("CE: limit state returned NaN");
            lw[i] = log_ratio(ui, mu, llt, log_det);
        }
        r.lsf_evals += n;

        std::vector<double> sorted = g;
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(elite - 1), sorted.end());
        const double threshold = std::min(std::max(sorted[elite - 1], 0.0), prev);
        r.levels.push_back(threshold);
        prev = threshold;

        if (threshold <= 0.0 || level + 1 == cfg.max_levels) {
            double sum = 0.0, sq = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double w = g[i] <= 0.0 ? std::exp(lw[i]) : 0.0;
                sum += w;
                sq += w * w;
            }
            r.estimate = sum / static_cast<double>(n);
            const double var = std::max(sq / static_cast<double>(n) - r.estimate * r.estimate, 0.0);
            r.std_error = std::sqrt(var / static_cast<double>(n));
            r.truncated = threshold > 0.0;
            if (r.truncated) r.warnings.push_back("maximum number of levels reached before g <= 0");
            break;
        }

        // Weighted refit on the samples below the threshold; weights shifted for range.
        double shift = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i)
            if (g[i] <= threshold) shift = std::max(shift, lw[i]);
        Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i)
            if (g[i] <= threshold) w[static_cast<Eigen::Index>(i)] = std::exp(lw[i] - shift);
        const double wsum = w.sum();
        mu = U * w / wsum;
        const Eigen::MatrixXd C = U.colwise() - mu;
        cov = C * w.asDiagonal() * C.transpose() / wsum;
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

EstimateReport cross_entropy(const BayesianReliabilityProblem& problem, const CeConfig& cfg, std::uint64_t seed) {
    const BayesianReliabilityProblem* p = &problem;
    if (!p->lsf && p->full_space) p = p->full_space.get();
    if (!p->lsf) throw ConfigError(fmt::format("problem '{}' has no limit state for CE", problem.name));
    p->validate();
    ScalarFn g = [p](std::span<const double> u) { return p->lsf_standard(u); };
    return cross_entropy(g, p->dim, cfg, seed);
}

}  // namespace dirt

namespace dirt {

EstimateReport cross_entropy_posterior(const BayesianReliabilityProblem& problem, const CeConfig& cfg, std::uint64_t seed) {
    const BayesianReliabilityProblem* p = &problem;
    if (!p->lsf && p->full_space) p = p->full_space.get();
    if (!p->lsf) throw ConfigError(fmt::format("problem '{}' has no limit state for CE", problem.name));
    if (!p->has_likelihood()) throw ConfigError(fmt::format("CE posterior: problem '{}' has no likelihood", problem.name));
    p->validate();
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t d = p->dim;

    double log_c = 0.0;
    std::size_t pilot_calls = 0;
    if (p->likelihood_bound > 0.0) {
        log_c = std::log(p->likelihood_bound);
    } else {
        Rng rng = make_rng(seed, 99);
        std::vector<double> u(d);
        log_c = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cfg.samples_per_level; ++i) {
            fill_standard_normal(rng, u);
            log_c = std::max(log_c, p->log_likelihood_standard(u));
        }
        pilot_calls = cfg.samples_per_level;
    }
    double max_log_l = -std::numeric_limits<double>::infinity();
    std::size_t like_calls = 0;
    auto h = [&](std::span<const double> u) {
        const double ll = p->log_likelihood_standard(u.first(d));
        ++like_calls;
        max_log_l = std::max(max_log_l, ll);
        return log_normal_cdf(u[d]) + log_c - ll;
    };
    const ScalarFn accept = h;
    const ScalarFn joint = [&](std::span<const double> u) { return std::max(h(u), p->lsf_standard(u.first(d))); };
    const auto rz = cross_entropy(accept, d + 1, cfg, derive_seed(seed, 1));
    const auto rq = cross_entropy(joint, d + 1, cfg, derive_seed(seed, 2));
    if (!(rz.estimate > 0.0)) throw DegenerateError("CE posterior: acceptance probability estimate is zero");

    EstimateReport r;
    r.method = "ce";
    r.seed = seed;
    r.estimate = rq.estimate / rz.estimate;
    r.std_error = r.estimate * std::hypot(rq.std_error / std::max(rq.estimate, 1e-300), rz.std_error / rz.estimate);
    r.lsf_evals = rq.lsf_evals;
    r.likelihood_evals = like_calls + pilot_calls;
    r.truncated = rq.truncated || rz.truncated;
    r.levels = rq.levels;
    r.warnings = rz.warnings;
    r.warnings.insert(r.warnings.end(), rq.warnings.begin(), rq.warnings.end());
    if (max_log_l > log_c + 1e-12) r.warnings.push_back(fmt::format("likelihood exp({}) exceeded c = exp({})", max_log_l, log_c));
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace dirt
