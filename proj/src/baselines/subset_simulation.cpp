#include "dirt/baselines/subset_simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <cstdio>
#include <numeric>
#include <vector>

#include <fmt/core.h>

#include "dirt/common/errors.hpp"
#include "dirt/common/math.hpp"

namespace dirt {
namespace {

constexpr double kTargetAcceptance = 0.44;
constexpr double kInf = std::numeric_limits<double>::infinity();
// Largest tolerated log(L / c) for an adaptive constant; about 10%.
constexpr double kBusExcessTolerance = 0.1;

// Samples in standard-normal space with their primary values g.
struct Population {
    std::size_t dim = 0;
    std::vector<double> u;  // n x dim
    std::vector<double> g;
    [[nodiscard]] std::size_t size() const { return g.size(); }
    [[nodiscard]] std::span<const double> row(std::size_t i) const { return {u.data() + i * dim, dim}; }
};

// Event {g <= b} intersected with {c <= 0} when a constraint is present. Counts evaluations.
struct Event {
    const ScalarFn* primary = nullptr;
    const ScalarFn* constraint = nullptr;
    std::size_t primary_calls = 0;
    std::size_t constraint_calls = 0;

    double g(std::span<const double> u) {
        ++primary_calls;
        const double v = (*primary)(u);
        if (std::isnan(v)) throw EvaluationError("subset simulation: limit state returned NaN");
        return v;
    }
    bool admissible(std::span<const double> u) {
        if (!constraint) return true;
        ++constraint_calls;
        return (*constraint)(u) <= 0.0;
    }
};

// Adaptive conditional sampling: chains started at the seeds, chain k has lengths[k] states
// (the seed is the first). Proposal v_j = rho_j u_j + sigma_j xi_j leaves N(0, 1) invariant, so
// a candidate is accepted exactly when it stays in the event. With b = inf only the
// constraint is checked and g is left NaN.
Population conditional_chains(const Population& seeds, const std::vector<std::size_t>& lengths, double b, Event& ev,
                              double& lambda, Rng& rng) {
    const std::size_t d = seeds.dim, nc = seeds.size();
    std::vector<double> sd(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> col(nc);
        for (std::size_t i = 0; i < nc; ++i) col[i] = seeds.u[i * d + j];
        sd[j] = nc > 1 ? sample_std(col) : 1.0;
    }
    std::vector<std::size_t> order(nc);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);

    Population out;
    out.dim = d;
    const std::size_t batch = std::max<std::size_t>(1, nc / 10);
    std::vector<double> sigma(d), rho(d), cur(d), cand(d);
    double acc_sum = 0.0;
    std::size_t in_batch = 0, adapt_step = 0;
    auto set_scales = [&] {
        for (std::size_t j = 0; j < d; ++j) {
            sigma[j] = std::min(lambda * sd[j], 1.0);
            rho[j] = std::sqrt(1.0 - sigma[j] * sigma[j]);
        }
    };
    set_scales();
    for (std::size_t k = 0; k < nc; ++k) {
        const std::size_t s = order[k];
        auto seed_row = seeds.row(s);
        cur.assign(seed_row.begin(), seed_row.end());
        double gcur = seeds.g[s];
        std::size_t accepted = 0;
        for (std::size_t t = 0; t < lengths[k]; ++t) {
            if (t > 0) {
                for (std::size_t j = 0; j < d; ++j) cand[j] = rho[j] * cur[j] + sigma[j] * standard_normal(rng);
                bool ok = ev.admissible(cand);
                double gc = std::numeric_limits<double>::quiet_NaN();
                if (ok && b < kInf) {
                    gc = ev.g(cand);
                    ok = gc <= b;
                }
                if (ok) {
                    cur = cand;
                    gcur = gc;
                    ++accepted;
                }
            }
            out.u.insert(out.u.end(), cur.begin(), cur.end());
            out.g.push_back(gcur);
        }
        acc_sum += lengths[k] > 1 ? static_cast<double>(accepted) / static_cast<double>(lengths[k] - 1) : kTargetAcceptance;
        if (++in_batch == batch || k + 1 == nc) {
            const double a = acc_sum / static_cast<double>(in_batch);
            ++adapt_step;
            lambda = std::exp(std::log(lambda) + (a - kTargetAcceptance) / std::sqrt(static_cast<double>(adapt_step)));
            set_scales();
            acc_sum = 0.0;
            in_batch = 0;
        }
    }
    return out;
}

struct LevelResult {
    double probability = 0.0;
    double cov2 = 0.0;  // sum (1 - p) / (N p) over levels, independence approximation
    bool truncated = false;
    std::vector<double> thresholds;
    Population final;  // last population
};

// Runs levels from an initial population distributed as the (conditioned) reference.
LevelResult run_levels(Population pop, Event& ev, const SusConfig& cfg, double& lambda, Rng& rng) {
    const std::size_t n = pop.size(), nc = cfg.seeds_per_level();
    const double nd = static_cast<double>(n);
    LevelResult res;
    double scale = 1.0;
    for (std::size_t level = 1;; ++level) {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return pop.g[a] < pop.g[b]; });
        const double b = 0.5 * (pop.g[idx[nc - 1]] + pop.g[idx[nc]]);
        if (b <= 0.0 || level == cfg.max_levels) {
            const auto nf = static_cast<double>(std::count_if(pop.g.begin(), pop.g.end(), [](double v) { return v <= 0.0; }));
            const double pf = nf / nd;
            res.probability = scale * pf;
            if (pf > 0.0) res.cov2 += (1.0 - pf) / (nd * pf);
            res.truncated = b > 0.0;
            res.final = std::move(pop);
            return res;
        }
        res.thresholds.push_back(b);
        scale *= cfg.p0;
        res.cov2 += (1.0 - cfg.p0) / (nd * cfg.p0);
        Population seeds;
        seeds.dim = pop.dim;
        for (std::size_t i = 0; i < nc; ++i) {
            auto r = pop.row(idx[i]);
            seeds.u.insert(seeds.u.end(), r.begin(), r.end());
            seeds.g.push_back(pop.g[idx[i]]);
        }
        pop = conditional_chains(seeds, std::vector<std::size_t>(nc, n / nc), b, ev, lambda, rng);
    }
}

Population prior_population(std::size_t dim, std::size_t n, Event& ev, Rng& rng) {
    Population pop;
    pop.dim = dim;
    pop.u.resize(n * dim);
    fill_standard_normal(rng, pop.u);
    pop.g.resize(n);
    for (std::size_t i = 0; i < n; ++i) pop.g[i] = ev.g(pop.row(i));
    return pop;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const BayesianReliabilityProblem& sampling_space(const BayesianReliabilityProblem& p) {
    if (p.lsf) return p;
    if (p.full_space && p.full_space->lsf) return *p.full_space;
    throw ConfigError(fmt::format("problem '{}' has no limit state for sampling baselines", p.name));
}

}  // namespace

void SusConfig::validate() const {
    if (!(p0 > 0.0 && p0 < 1.0)) throw ConfigError(fmt::format("SuS: p0 = {} outside (0, 1)", p0));
    const double nc = static_cast<double>(samples_per_level) * p0;
    if (std::abs(nc - std::round(nc)) > 1e-9 || std::round(nc) < 2.0)
        throw ConfigError(fmt::format("SuS: N p0 = {} must be an integer >= 2", nc));
    if (max_levels < 1) throw ConfigError("SuS: max_levels must be positive");
    if (!(initial_spread > 0.0)) throw ConfigError("SuS: initial spread must be positive");
}

std::size_t SusConfig::seeds_per_level() const {
    return static_cast<std::size_t>(std::llround(static_cast<double>(samples_per_level) * p0));
}

EstimateReport subset_simulation(const ScalarFn& lsf_standard, std::size_t dim, const SusConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    if (dim == 0) throw ConfigError("SuS: dimension must be positive");
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng = make_rng(seed, 0);
    Event ev{&lsf_standard, nullptr};
    double lambda = cfg.initial_spread;
    auto res = run_levels(prior_population(dim, cfg.samples_per_level, ev, rng), ev, cfg, lambda, rng);
    EstimateReport r;
    r.method = "sus";
    r.estimate = res.probability;
    r.std_error = res.probability * std::sqrt(res.cov2);
    r.lsf_evals = ev.primary_calls;
    r.seed = seed;
    r.truncated = res.truncated;
    r.levels = std::move(res.thresholds);
    if (r.truncated) r.warnings.push_back("maximum number of levels reached before g <= 0");
    r.seconds = seconds_since(t0);
    return r;
}

EstimateReport subset_simulation(const BayesianReliabilityProblem& problem, const SusConfig& cfg, std::uint64_t seed) {
    const auto& p = sampling_space(problem);
    p.validate();
    ScalarFn g = [&p](std::span<const double> u) { return p.lsf_standard(u); };
    return subset_simulation(g, p.dim, cfg, seed);
}

EstimateReport bus_sus_posterior(const BayesianReliabilityProblem& problem, const SusConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const auto& p = sampling_space(problem);
    p.validate();
    if (!p.has_likelihood()) throw ConfigError(fmt::format("BUS: problem '{}' has no likelihood", p.name));
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t d = p.dim, da = d + 1, n = cfg.samples_per_level;
    const bool fixed_c = p.likelihood_bound > 0.0;
    double log_c = fixed_c ? std::log(p.likelihood_bound) : -kInf;
    double log_c_floor = -kInf;

    for (int attempt = 0; attempt < 10; ++attempt) {
        Rng rng = make_rng(seed, static_cast<std::uint64_t>(attempt));
        double max_log_l = -kInf;
        // Acceptance event in the augmented space: log Phi(z) + log c - log L(x) <= 0.
        ScalarFn h = [&](std::span<const double> u) {
            const double ll = p.log_likelihood_standard(u.first(d));
            if (std::isnan(ll)) throw EvaluationError("BUS: log-likelihood returned NaN");
            max_log_l = std::max(max_log_l, ll);
            return log_normal_cdf(u[d]) + log_c - ll;
        };
        ScalarFn g = [&p, d](std::span<const double> u) { return p.lsf_standard(u.first(d)); };

        // Stage 1: reach the acceptance event from the prior.
        Event e1{&h, nullptr};
        Population pop;
        pop.dim = da;
        pop.u.resize(n * da);
        fill_standard_normal(rng, pop.u);
        std::vector<double> ll0(n);
        for (std::size_t i = 0; i < n; ++i) {
            ll0[i] = p.log_likelihood_standard(pop.row(i).first(d));
            max_log_l = std::max(max_log_l, ll0[i]);
        }
        if (!fixed_c) log_c = std::max(max_log_l, log_c_floor);
        e1.primary_calls += n;
        pop.g.resize(n);
        for (std::size_t i = 0; i < n; ++i) pop.g[i] = log_normal_cdf(pop.u[i * da + d]) + log_c - ll0[i];
        double lambda = cfg.initial_spread;
        auto s1 = run_levels(std::move(pop), e1, cfg, lambda, rng);
        if (s1.truncated || s1.probability == 0.0)
            throw DegenerateError("BUS: acceptance event not reached within the level budget");

        // Stage 2: repopulate the acceptance event, then continue toward g <= 0 inside it.
        Population accepted;
        accepted.dim = da;
        for (std::size_t i = 0; i < s1.final.size(); ++i)
            if (s1.final.g[i] <= 0.0) {
                auto r = s1.final.row(i);
                accepted.u.insert(accepted.u.end(), r.begin(), r.end());
                accepted.g.push_back(0.0);
            }
        const std::size_t na = accepted.size();
        std::vector<std::size_t> lengths(na, n / na);
        for (std::size_t k = 0; k < n % na; ++k) ++lengths[k];
        Event e2{&g, &h};
        auto post = conditional_chains(accepted, lengths, kInf, e2, lambda, rng);
        for (std::size_t i = 0; i < post.size(); ++i) post.g[i] = e2.g(post.row(i));
        auto s2 = run_levels(std::move(post), e2, cfg, lambda, rng);

        if (fixed_c && max_log_l > log_c + 1e-12)
            throw NumericalError(fmt::format("BUS: observed likelihood exp({}) exceeds the bound c = exp({})", max_log_l, log_c));
        // Post-hoc correction: samples with L > c were accepted with probability 1 instead of
        // L / c. Rerun with a larger c unless the excess is within the tolerance.
        if (!fixed_c && max_log_l > log_c + kBusExcessTolerance) {
            log_c_floor = max_log_l + kBusExcessTolerance;
            continue;
        }
        EstimateReport r;
        r.method = "bus_sus";
        r.estimate = s2.probability;
        r.std_error = s2.probability * std::sqrt(s2.cov2);
        r.lsf_evals = e2.primary_calls;
        r.likelihood_evals = e1.primary_calls + e2.constraint_calls;
        r.seed = seed;
        r.truncated = s2.truncated;
        r.levels = s1.thresholds;
        r.levels.insert(r.levels.end(), s2.thresholds.begin(), s2.thresholds.end());
        if (attempt > 0) r.warnings.push_back(fmt::format("likelihood constant raised {} time(s)", attempt));
        if (r.truncated) r.warnings.push_back("maximum number of levels reached before g <= 0");
        r.seconds = seconds_since(t0);
        return r;
    }
    throw NumericalError("BUS: likelihood constant kept increasing over 10 restarts");
}

}  // namespace dirt
