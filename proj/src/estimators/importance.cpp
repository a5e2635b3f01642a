#include "dirt/estimators/importance.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

#include <fmt/core.h>

#include "dirt/common/errors.hpp"
#include "dirt/common/math.hpp"
#include "dirt/common/parallel.hpp"
#include "dirt/estimators/indicator.hpp"

namespace dirt {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

// Per-sample quantities of one importance draw, all in log form.
struct Draw {
    double log_weight = kNegInf;  // log(L pi_0 / p), or log(pi_0 / p) without data
    double fail = 0.0;            // sharp indicator or P(F | x)
    double smooth = 0.0;          // s_gamma(g) when g is available
};

// All reference points come from one stream before any push, so results do not depend on
// the worker count.
std::vector<double> reference_draws(const DirtMap& map, std::size_t N, std::uint64_t seed) {
    std::vector<double> u(N * map.dim());
    Rng rng = make_rng(seed, 0);
    for (double& v : u) v = map.reference().sample(rng);
    return u;
}

std::vector<Draw> draw(const DirtMap& map, const BayesianReliabilityProblem& p, std::span<const double> u,
                       double gamma, std::size_t workers, bool evaluate_failure, bool with_likelihood) {
    const std::size_t d = map.dim();
    const std::size_t N = u.size() / d;
    std::vector<Draw> out(N);
    parallel_for(N, workers, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const auto s = map.push(u.subspan(i * d, d));
            Draw& dr = out[i];
            double lw = p.log_prior(s.x) - s.log_density;
            if (with_likelihood) lw += p.log_likelihood(s.x);
            dr.log_weight = lw;
            if (!evaluate_failure) continue;
            if (p.has_conditional_failure()) {
                dr.fail = dr.smooth = p.conditional_failure(s.x);
            } else {
                const double g = p.lsf(s.x);
                if (!std::isfinite(g)) throw EvaluationError(fmt::format("limit state returned {}", g));
                dr.fail = sharp_indicator(g);
                dr.smooth = smooth_indicator(g, gamma);
            }
        }
    });
    for (const auto& dr : out)
        if (std::isnan(dr.log_weight)) throw EvaluationError("importance weight is NaN");
    return out;
}

// Weighted mean of f with weights exp(log_weight - shift) and its standard error.
struct Moments {
    double mean = 0.0;     // (1/N) sum f w, scaled by exp(-shift)
    double var = 0.0;      // sample variance of f w, scaled by exp(-2 shift)
};

template <class F>
Moments moments(const std::vector<Draw>& draws, double shift, F f) {
    Moments m;
    const double n = static_cast<double>(draws.size());
    for (const auto& d : draws) m.mean += f(d) * std::exp(d.log_weight - shift);
    m.mean /= n;
    for (const auto& d : draws) {
        const double r = f(d) * std::exp(d.log_weight - shift) - m.mean;
        m.var += r * r;
    }
    m.var = draws.size() > 1 ? m.var / (n - 1.0) : 0.0;
    return m;
}

double max_log_weight(const std::vector<Draw>& draws) {
    double s = kNegInf;
    for (const auto& d : draws) s = std::max(s, d.log_weight);
    return s;
}

void check_problem(const BayesianReliabilityProblem& p, const DirtMap& map, std::size_t N) {
    if (N < 1) throw ConfigError("importance sampling: N must be positive");
    if (map.dim() != p.dim)
        throw ConfigError(fmt::format("map dimension {} differs from problem dimension {}", map.dim(), p.dim));
}

}  // namespace

LogTarget make_log_target(const BayesianReliabilityProblem& problem, MapTarget kind, double gamma) {
    problem.validate();
    if (kind != MapTarget::posterior && !problem.has_conditional_failure() && !(gamma > 0.0))
        throw ConfigError(fmt::format("map target: gamma must be positive, got {}", gamma));
    if (kind != MapTarget::prior_failure && !problem.has_likelihood())
        throw ConfigError(fmt::format("problem '{}' has no likelihood", problem.name));
    const bool fail = kind != MapTarget::posterior;
    const bool like = kind != MapTarget::prior_failure;
    return [problem, gamma, fail, like](std::span<const double> x) {
        double lt = problem.log_prior(x);
        if (like) lt += problem.log_likelihood(x);
        if (fail)
            lt += problem.has_conditional_failure() ? safe_log(problem.conditional_failure(x))
                                                    : log_smooth_indicator(problem.lsf(x), gamma);
        return lt;
    };
}

DirtMap build_map(const BayesianReliabilityProblem& problem, MapTarget kind, double gamma,
                  const TemperingSchedule& schedule, const DirtConfig& cfg) {
    return dirt_build(make_log_target(problem, kind, gamma), problem.bounds, schedule, ReferenceDensity{}, cfg);
}

EstimateReport crude_mc(const BayesianReliabilityProblem& problem, std::size_t N, std::uint64_t seed) {
    problem.validate();
    if (N < 1) throw ConfigError("crude_mc: N must be positive");
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng = make_rng(seed, 0);
    std::vector<double> x(problem.dim);
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        problem.sample_prior(rng, x);
        const double f = problem.failure_probability(x);
        sum += f;
        sq += f * f;
    }
    EstimateReport r;
    r.method = "mc";
    r.estimate = sum / static_cast<double>(N);
    const double var = N > 1 ? std::max(sq - sum * r.estimate, 0.0) / static_cast<double>(N - 1) : 0.0;
    r.std_error = std::sqrt(var / static_cast<double>(N));
    r.lsf_evals = N;
    r.seed = seed;
    r.seconds = seconds_since(t0);
    return r;
}

EstimateReport estimate_prior_pf(const DirtMap& map, const BayesianReliabilityProblem& problem, std::size_t N,
                                 double gamma, std::uint64_t seed, std::size_t workers) {
    problem.validate();
    check_problem(problem, map, N);
    const auto t0 = std::chrono::steady_clock::now();
    const auto draws = draw(map, problem, reference_draws(map, N, seed), gamma, workers, true, false);
    for (const auto& d : draws)
        if (d.log_weight == std::numeric_limits<double>::infinity())
            throw DegenerateError("estimate_prior_pf: zero proposal density at a sampled point");
    const auto sharp = moments(draws, 0.0, [](const Draw& d) { return d.fail; });
    const auto smooth = moments(draws, 0.0, [](const Draw& d) { return d.smooth; });
    EstimateReport r;
    r.method = "dirt";
    r.estimate = sharp.mean;
    r.std_error = std::sqrt(sharp.var / static_cast<double>(N));
    r.smoothed_estimate = problem.has_conditional_failure() ? sharp.mean : smooth.mean;
    r.lsf_evals = map.stats().target_evaluations + N;
    r.seed = seed;
    r.seconds = seconds_since(t0);
    return r;
}

EstimateReport estimate_posterior_pf(const DirtMap& map_q, const DirtMap& map_z, const BayesianReliabilityProblem& problem,
                                     std::size_t N, double gamma, std::uint64_t seed, std::size_t workers) {
    problem.validate();
    check_problem(problem, map_q, N);
    check_problem(problem, map_z, N);
    const bool like = problem.has_likelihood();
    const auto t0 = std::chrono::steady_clock::now();
    // Both maps push the same reference points (common random numbers): identical maps give
    // an exact ratio, similar maps a correlated and hence less noisy one.
    const auto u = reference_draws(map_q, N, seed);
    const auto dq = draw(map_q, problem, u, gamma, workers, true, like);
    const auto dz = draw(map_z, problem, u, gamma, workers, false, like);
    for (const auto* set : {&dq, &dz})
        for (const auto& d : *set)
            if (d.log_weight == std::numeric_limits<double>::infinity())
                throw DegenerateError("estimate_posterior_pf: zero proposal density at a sampled point");

    // Common shift: the ratio is invariant, the sums stay in range.
    const double shift = std::max(max_log_weight(dq), max_log_weight(dz));
    if (shift == kNegInf) throw DegenerateError("estimate_posterior_pf: every evidence weight is zero");
    const auto z = moments(dz, shift, [](const Draw&) { return 1.0; });
    if (!(z.mean > 0.0)) throw DegenerateError("estimate_posterior_pf: evidence estimate is zero");
    const auto q = moments(dq, shift, [](const Draw& d) { return d.fail; });
    const auto qs = moments(dq, shift, [](const Draw& d) { return d.smooth; });

    EstimateReport r;
    r.method = "dirt";
    r.estimate = q.mean / z.mean;
    // Delta method for a ratio of paired means: variance of q_i - r z_i.
    double dvar = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double e = dq[i].fail * std::exp(dq[i].log_weight - shift) - r.estimate * std::exp(dz[i].log_weight - shift);
        dvar += e * e;
    }
    dvar = N > 1 ? dvar / static_cast<double>(N - 1) : 0.0;
    r.std_error = std::sqrt(dvar / static_cast<double>(N)) / z.mean;
    r.smoothed_estimate = problem.has_conditional_failure() ? r.estimate : qs.mean / z.mean;
    r.lsf_evals = map_q.stats().target_evaluations + N;
    r.likelihood_evals = map_z.stats().target_evaluations + map_q.stats().target_evaluations + 2 * N;
    r.seed = seed;
    r.seconds = seconds_since(t0);
    return r;
}

}  // namespace dirt
