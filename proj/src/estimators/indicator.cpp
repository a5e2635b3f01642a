#include "dirt/estimators/indicator.hpp"

#include <cmath>

#include <fmt/core.h>

#include "dirt/common/errors.hpp"

namespace dirt {
namespace {

void check_gamma(double gamma) {
    if (!(gamma > 0.0)) throw ConfigError(fmt::format("smooth indicator: gamma must be positive, got {}", gamma));
}

}  // namespace

double smooth_indicator(double g, double gamma) {
    check_gamma(gamma);
    const double t = gamma * g;
    // a = 1/(1 + e^-|t|) lies in [0.5, 1], so 1 - a is exact (Sterbenz) and the two
    // branches are exact complements. Small values lose relative accuracy; use the log form.
    const double a = 1.0 / (1.0 + std::exp(-std::abs(t)));
    return t > 0.0 ? 1.0 - a : a;
}

double log_smooth_indicator(double g, double gamma) {
    check_gamma(gamma);
    const double t = gamma * g;
    return t > 0.0 ? -t - std::log1p(std::exp(-t)) : -std::log1p(std::exp(t));
}

}  // namespace dirt
