#pragma once

#include <span>

#include "dirt/models/problem.hpp"

namespace dirt {

/// g(theta) = alpha - sum(theta) / sqrt(d); P(F) = Phi(-alpha) under a standard normal prior.
double linear_lsf(std::span<const double> theta, double alpha);

/// d independent standard normals with the linear limit state; bounds +-half_width.
BayesianReliabilityProblem linear_problem(std::size_t d, double alpha, double half_width = 8.0);

}  // namespace dirt
