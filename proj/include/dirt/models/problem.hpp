#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dirt/common/random.hpp"
#include "dirt/tt/grid.hpp"

namespace dirt {

using ScalarFn = std::function<double(std::span<const double>)>;
using SamplerFn = std::function<void(Rng&, std::span<double>)>;
using VectorMap = std::function<void(std::span<const double>, std::span<double>)>;

/// The (prior, likelihood, limit state) triple of a Bayesian reliability question.
///
/// Failure is g(x) <= 0. When `conditional_failure` is set, x are hyperparameters and the
/// failure event is integrated out inside the model: P(F | x) replaces the indicator of
/// g(x) <= 0 in every estimator, and `full_space` carries the equivalent problem with the
/// integrated variables made explicit (what sampling baselines run on).
struct BayesianReliabilityProblem {
    std::string name;
    std::size_t dim = 0;
    std::vector<Interval> bounds;  ///< physical box on which transport maps are built

    ScalarFn log_prior;     ///< normalized log prior density
    SamplerFn sample_prior;
    ScalarFn log_likelihood;  ///< empty for a prior-only problem
    ScalarFn lsf;             ///< g(x); empty when only conditional_failure is available
    ScalarFn conditional_failure;

    /// Isoprobabilistic transform physical <-> independent standard normal.
    VectorMap to_standard;
    VectorMap from_standard;

    /// Known upper bound on the likelihood (0 when unknown).
    double likelihood_bound = 0.0;

    std::shared_ptr<const BayesianReliabilityProblem> full_space;

    [[nodiscard]] bool has_likelihood() const noexcept { return static_cast<bool>(log_likelihood); }
    [[nodiscard]] bool has_conditional_failure() const noexcept { return static_cast<bool>(conditional_failure); }

    /// P(F | x) when available, otherwise the sharp indicator of g(x) <= 0.
    [[nodiscard]] double failure_probability(std::span<const double> x) const;
    /// g evaluated through the standard-normal wrap: g(from_standard(u)).
    [[nodiscard]] double lsf_standard(std::span<const double> u) const;
    /// log-likelihood through the standard-normal wrap (0 for prior-only problems).
    [[nodiscard]] double log_likelihood_standard(std::span<const double> u) const;

    /// Throws ConfigError when required handles are missing or sizes disagree.
    void validate() const;
};

/// Problem in independent standard normal coordinates with the given g; bounds +-half_width.
BayesianReliabilityProblem standard_normal_problem(std::string name, std::size_t dim, ScalarFn lsf,
                                                   double half_width = 8.0);

}  // namespace dirt
