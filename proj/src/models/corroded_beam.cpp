#include "dirt/models/corroded_beam.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include <fmt/core.h>

#include "dirt/common/errors.hpp"
#include "dirt/common/math.hpp"

namespace dirt {
namespace {

constexpr double kRho = 0.4;  // correlation of b and h

// Prior moments of the hyperparameters.
constexpr double kMuBMean = 0.2, kMuBStd = 0.03;
constexpr double kMuHMean = 0.03, kMuHStd = 4.5e-3;
constexpr double kSigBMean = 0.03, kSigBStd = 4.5e-3;
constexpr double kSigHMean = 4.5e-3, kSigHStd = 6.75e-4;
constexpr double kFMean = 3500.0, kFStd = 700.0;
constexpr double kLMean = 5.0, kLStd = 0.5;

const std::vector<Interval> kThetaBox{{0.1, 0.3}, {0.015, 0.045}, {0.015, 0.045}, {0.00225, 0.00675}};

struct Priors {
    LognormalParams sig_b = lognormal_from_moments(kSigBMean, kSigBStd);
    LognormalParams sig_h = lognormal_from_moments(kSigHMean, kSigHStd);
    LognormalParams force = lognormal_from_moments(kFMean, kFStd);
    LognormalParams length = lognormal_from_moments(kLMean, kLStd);
};

const Priors& priors() {
    static const Priors p;
    return p;
}

double log_lognormal_pdf(double x, const LognormalParams& p) {
    if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
    const double z = (std::log(x) - p.mu) / p.sigma;
    return log_normal_pdf(z) - std::log(x * p.sigma);
}

double log_prior_theta(std::span<const double> t) {
    const auto& p = priors();
    return log_normal_pdf((t[0] - kMuBMean) / kMuBStd) - std::log(kMuBStd) +
           log_normal_pdf((t[1] - kMuHMean) / kMuHStd) - std::log(kMuHStd) + log_lognormal_pdf(t[2], p.sig_b) +
           log_lognormal_pdf(t[3], p.sig_h);
}

void theta_from_standard(std::span<const double> u, std::span<double> t) {
    const auto& p = priors();
    t[0] = kMuBMean + kMuBStd * u[0];
    t[1] = kMuHMean + kMuHStd * u[1];
    t[2] = std::exp(p.sig_b.mu + p.sig_b.sigma * u[2]);
    t[3] = std::exp(p.sig_h.mu + p.sig_h.sigma * u[3]);
}

void theta_to_standard(std::span<const double> t, std::span<double> u) {
    const auto& p = priors();
    u[0] = (t[0] - kMuBMean) / kMuBStd;
    u[1] = (t[1] - kMuHMean) / kMuHStd;
    u[2] = (std::log(t[2]) - p.sig_b.mu) / p.sig_b.sigma;
    u[3] = (std::log(t[3]) - p.sig_h.mu) / p.sig_h.sigma;
}

// Bivariate normal log density of the observations given theta, correlation 0.4.
double log_likelihood_theta(std::span<const double> t, const std::vector<BeamObservation>& data) {
    const double sb = t[2], sh = t[3];
    if (!(sb > 0.0) || !(sh > 0.0)) throw DomainError("corroded beam: standard deviations must be positive");
    const double one_m_r2 = 1.0 - kRho * kRho;
    const double log_norm = std::log(2.0 * std::numbers::pi * sb * sh * std::sqrt(one_m_r2));
    double ll = 0.0;
    for (const auto& d : data) {
        const double zb = (d.b - t[0]) / sb, zh = (d.h - t[1]) / sh;
        ll += -0.5 * (zb * zb - 2.0 * kRho * zb * zh + zh * zh) / one_m_r2 - log_norm;
    }
    return ll;
}

// Section from hyperparameters and standard normals; h correlates with b through z_b.
inline void section(std::span<const double> t, double zb, double zh, double& b, double& h) {
    b = t[0] + t[2] * zb;
    h = t[1] + t[3] * (kRho * zb + std::sqrt(1.0 - kRho * kRho) * zh);
}

}  // namespace

double corroded_beam_stress(double b, double h, double F, double L, double unit_weight) {
    if (!(b > 0.0) || !(h > 0.0) || !(L > 0.0))
        throw DomainError(fmt::format("corroded_beam_stress: nonpositive geometry b={}, h={}, L={}", b, h, L));
    const double W = b * h * h / 6.0;
    const double M = F * L / 4.0 + unit_weight * b * h * L * L / 8.0;
    return M / W;
}

BayesianReliabilityProblem corroded_beam_problem(const std::vector<BeamObservation>& data,
                                                 const CorrodedBeamOptions& opts) {
    if (opts.inner_samples < 1) throw ConfigError("corroded beam: inner_samples must be positive");
    for (const auto& d : data)
        if (!std::isfinite(d.b) || !std::isfinite(d.h)) throw ConfigError("corroded beam: observations must be finite");

    // Common random numbers (z_b, z_h, L) shared by every evaluation of P(F | theta).
    auto inner = std::make_shared<std::vector<double>>(3 * opts.inner_samples);
    {
        Rng rng = make_rng(opts.inner_seed, 0);
        fill_standard_normal(rng, *inner);
        const auto& lp = priors().length;
        for (std::size_t s = 0; s < opts.inner_samples; ++s) (*inner)[3 * s + 2] = std::exp(lp.mu + lp.sigma * (*inner)[3 * s + 2]);
    }

    BayesianReliabilityProblem p;
    p.name = fmt::format("corroded_beam_u{}", data.size());
    p.dim = 4;
    p.bounds = kThetaBox;
    p.log_prior = log_prior_theta;
    p.sample_prior = [](Rng& rng, std::span<double> out) {
        double u[4];
        fill_standard_normal(rng, u);
        theta_from_standard(u, out);
    };
    if (!data.empty())
        p.log_likelihood = [data](std::span<const double> t) { return log_likelihood_theta(t, data); };
    p.to_standard = theta_to_standard;
    p.from_standard = theta_from_standard;
    p.conditional_failure = [inner](std::span<const double> t) {
        if (!(t[2] > 0.0) || !(t[3] > 0.0)) throw DomainError("corroded beam: standard deviations must be positive");
        const auto& f = priors().force;
        const std::size_t n = inner->size() / 3;
        double sum = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            const double* z = inner->data() + 3 * s;
            double b, h;
            section(t, z[0], z[1], b, h);
            if (!(b > 0.0) || !(h > 0.0)) {
                sum += 1.0;  // no section left: counts as failed
                continue;
            }
            const double L = z[2];
            // sigma >= sigma_max  <=>  F >= F*; F is lognormal, so P(F >= F*) is closed form.
            const double f_star = 4.0 / L * (kAllowableStress * b * h * h / 6.0 - kSteelUnitWeight * b * h * L * L / 8.0);
            sum += f_star <= 0.0 ? 1.0 : normal_cdf(-(std::log(f_star) - f.mu) / f.sigma);
        }
        return sum / static_cast<double>(n);
    };

    // Eight-variable version: standardized hyperparameters plus (z_b, z_h, z_F, z_L).
    auto full = std::make_shared<BayesianReliabilityProblem>();
    full->name = p.name + "_full";
    full->dim = 8;
    full->bounds = kThetaBox;
    for (int k = 0; k < 4; ++k) full->bounds.push_back({-8.0, 8.0});
    full->log_prior = [](std::span<const double> x) {
        double lp = log_prior_theta(x.first(4));
        for (std::size_t k = 4; k < 8; ++k) lp += log_normal_pdf(x[k]);
        return lp;
    };
    full->sample_prior = [](Rng& rng, std::span<double> out) {
        double u[4];
        fill_standard_normal(rng, u);
        theta_from_standard(u, out.first(4));
        fill_standard_normal(rng, out.subspan(4));
    };
    if (!data.empty())
        full->log_likelihood = [data](std::span<const double> x) { return log_likelihood_theta(x.first(4), data); };
    full->lsf = [](std::span<const double> x) {
        double b, h;
        section(x.first(4), x[4], x[5], b, h);
        if (!(b > 0.0) || !(h > 0.0)) return -1.0;
        const auto& pr = priors();
        const double F = std::exp(pr.force.mu + pr.force.sigma * x[6]);
        const double L = std::exp(pr.length.mu + pr.length.sigma * x[7]);
        return (kAllowableStress - corroded_beam_stress(b, h, F, L)) / kAllowableStress;
    };
    full->to_standard = [](std::span<const double> x, std::span<double> u) {
        theta_to_standard(x.first(4), u.first(4));
        for (std::size_t k = 4; k < 8; ++k) u[k] = x[k];
    };
    full->from_standard = [](std::span<const double> u, std::span<double> x) {
        theta_from_standard(u.first(4), x.first(4));
        for (std::size_t k = 4; k < 8; ++k) x[k] = u[k];
    };
    p.full_space = full;
    return p;
}

}  // namespace dirt
