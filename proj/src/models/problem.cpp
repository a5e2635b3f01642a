#include "dirt/models/problem.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/core.h>

#include "dirt/common/errors.hpp"
#include "dirt/common/math.hpp"

namespace dirt {

double BayesianReliabilityProblem::failure_probability(std::span<const double> x) const {
    if (conditional_failure) return conditional_failure(x);
    return lsf(x) <= 0.0 ? 1.0 : 0.0;
}

double BayesianReliabilityProblem::lsf_standard(std::span<const double> u) const {
    std::vector<double> x(dim);
    from_standard(u, x);
    return lsf(x);
}

double BayesianReliabilityProblem::log_likelihood_standard(std::span<const double> u) const {
    if (!log_likelihood) return 0.0;
    std::vector<double> x(dim);
    from_standard(u, x);
    return log_likelihood(x);
}

void BayesianReliabilityProblem::validate() const {
    if (dim == 0) throw ConfigError(fmt::format("problem '{}': dimension must be positive", name));
    if (bounds.size() != dim) throw ConfigError(fmt::format("problem '{}': {} bounds for {} dimensions", name, bounds.size(), dim));
    if (!log_prior || !sample_prior) throw ConfigError(fmt::format("problem '{}': prior is incomplete", name));
    if (!lsf && !conditional_failure)
        throw ConfigError(fmt::format("problem '{}': needs a limit state or a conditional failure probability", name));
    if (!to_standard || !from_standard) throw ConfigError(fmt::format("problem '{}': missing standard-normal wrap", name));
    if (full_space) full_space->validate();
}

BayesianReliabilityProblem standard_normal_problem(std::string name, std::size_t dim, ScalarFn lsf, double half_width) {
    if (dim == 0) throw ConfigError("standard_normal_problem: dimension must be positive");
    if (!(half_width > 0.0)) throw ConfigError("standard_normal_problem: half width must be positive");
    BayesianReliabilityProblem p;
    p.name = std::move(name);
    p.dim = dim;
    p.bounds.assign(dim, Interval{-half_width, half_width});
    p.log_prior = [](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) s += log_normal_pdf(v);
        return s;
    };
    p.sample_prior = [](Rng& rng, std::span<double> out) { fill_standard_normal(rng, out); };
    p.lsf = std::move(lsf);
    p.to_standard = [](std::span<const double> x, std::span<double> u) { std::copy(x.begin(), x.end(), u.begin()); };
    p.from_standard = [](std::span<const double> u, std::span<double> x) { std::copy(u.begin(), u.end(), x.begin()); };
    return p;
}

}  // namespace dirt
