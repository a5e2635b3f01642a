#pragma once

#include <cstddef>
#include <cstdint>

#include "dirt/estimators/report.hpp"
#include "dirt/models/problem.hpp"

namespace dirt {

struct CeConfig {
    std::size_t samples_per_level = 3000;
    double elite_fraction = 0.1;
    std::size_t max_levels = 50;

    /// Throws ConfigError unless the elite count is at least dim + 1.
    void validate(std::size_t dim) const;
};

/// Cross-entropy importance sampling with a single Gaussian proposal in standard-normal space.
/// Each level refits mean and covariance to the likelihood-ratio weighted elites below the
/// elite-quantile threshold (never above the previous one); stops once the threshold reaches 0.
EstimateReport cross_entropy(const ScalarFn& lsf_standard, std::size_t dim, const CeConfig& cfg, std::uint64_t seed);

EstimateReport cross_entropy(const BayesianReliabilityProblem& problem, const CeConfig& cfg, std::uint64_t seed);

}  // namespace dirt

namespace dirt {

/// Posterior failure probability by two cross-entropy runs in the BUS space (x plus one
/// standard normal z): P(F | y) = P(A and g <= 0) / P(A) with A = {Phi(z) c <= L(x)}.
/// c is the likelihood bound when set, otherwise the largest likelihood over one level of
/// prior draws; a larger likelihood met later is reported as a warning.
EstimateReport cross_entropy_posterior(const BayesianReliabilityProblem& problem, const CeConfig& cfg, std::uint64_t seed);

}  // namespace dirt
