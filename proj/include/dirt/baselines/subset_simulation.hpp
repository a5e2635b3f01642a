#pragma once

#include <cstddef>
#include <cstdint>

#include "dirt/estimators/report.hpp"
#include "dirt/models/problem.hpp"

namespace dirt {

struct SusConfig {
    std::size_t samples_per_level = 3000;
    double p0 = 0.1;
    std::size_t max_levels = 30;
    /// Initial scale lambda of the adaptive conditional sampler; adapted toward 0.44 acceptance.
    double initial_spread = 0.6;

    /// Throws ConfigError unless 0 < p0 < 1 and N p0 is an integer >= 2.
    void validate() const;
    [[nodiscard]] std::size_t seeds_per_level() const;
};

/// Subset simulation for P(g(u) <= 0) with u standard normal in `dim` dimensions.
/// Intermediate thresholds are p0-quantiles of g; conditional samples come from the adaptive
/// conditional sampler (per-component Gaussian proposal scaled to 0.44 acceptance).
/// The estimate is p0^(m-1) times the final-level fraction with g <= 0. When max_levels is
/// reached first the report is flagged truncated and the estimate uses the last level.
EstimateReport subset_simulation(const ScalarFn& lsf_standard, std::size_t dim, const SusConfig& cfg,
                                 std::uint64_t seed);

/// Subset simulation on a problem's limit state through its standard-normal wrap.
EstimateReport subset_simulation(const BayesianReliabilityProblem& problem, const SusConfig& cfg, std::uint64_t seed);

/// BUS-SuS posterior failure probability. The space is augmented by one standard normal z and
/// the acceptance event is {Phi(z) c <= L(x)}. Subset simulation first reaches the acceptance
/// event, then continues inside it toward g <= 0; the product of the two stages is P(F | y).
/// Uses the problem's full_space when present. c is the problem's likelihood_bound when set
/// (a larger observed likelihood raises NumericalError); otherwise it is the largest
/// likelihood seen so far and the run restarts with the larger value when it is exceeded.
EstimateReport bus_sus_posterior(const BayesianReliabilityProblem& problem, const SusConfig& cfg, std::uint64_t seed);

}  // namespace dirt
