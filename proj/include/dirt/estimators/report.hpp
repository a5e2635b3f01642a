#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace dirt {

/// Result of one seeded estimator run.
struct EstimateReport {
    std::string method;
    double estimate = std::numeric_limits<double>::quiet_NaN();
    double std_error = std::numeric_limits<double>::quiet_NaN();  ///< within-run standard error
    /// Estimate with the sigmoid inside the weight (NaN when not applicable).
    double smoothed_estimate = std::numeric_limits<double>::quiet_NaN();
    std::size_t lsf_evals = 0;         ///< calls of g (or of P(F | x)), map builds included
    std::size_t likelihood_evals = 0;  ///< likelihood-only calls (evidence map, BUS)
    std::uint64_t seed = 0;
    double seconds = 0.0;
    bool truncated = false;      ///< a level cap stopped the run before reaching g <= 0
    std::vector<double> levels;  ///< intermediate thresholds of SuS / CE
    std::vector<std::string> warnings;
};

/// Sample standard deviation over sample mean. Throws DegenerateError for a zero mean and
/// ConfigError for fewer than two values.
double cov_over_runs(std::span<const double> estimates);

/// Repeated runs of one method on one problem.
struct RunSummary {
    std::string method;
    std::string problem;
    std::size_t dim = 0;
    std::uint64_t seed = 0;  ///< master seed the run seeds derive from
    std::vector<EstimateReport> runs;

    [[nodiscard]] std::vector<double> estimates() const;
    [[nodiscard]] double mean() const;
    /// cov_over_runs of the estimates; NaN for one run or a zero mean.
    [[nodiscard]] double cov() const;
    [[nodiscard]] double mean_lsf_evals() const;
    [[nodiscard]] double seconds() const;
};

}  // namespace dirt
