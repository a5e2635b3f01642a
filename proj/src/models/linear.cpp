#include "dirt/models/linear.hpp"

#include <cmath>

#include <fmt/core.h>

#include "dirt/common/errors.hpp"

namespace dirt {

double linear_lsf(std::span<const double> theta, double alpha) {
    if (theta.empty()) throw DomainError("linear_lsf: empty input");
    double s = 0.0;
    for (double v : theta) s += v;
    return alpha - s / std::sqrt(static_cast<double>(theta.size()));
}

BayesianReliabilityProblem linear_problem(std::size_t d, double alpha, double half_width) {
    if (!std::isfinite(alpha)) throw ConfigError("linear problem: alpha must be finite");
    auto p = standard_normal_problem(fmt::format("linear_d{}_a{}", d, alpha), d,
                                     [alpha](std::span<const double> x) { return linear_lsf(x, alpha); }, half_width);
    return p;
}

}  // namespace dirt
