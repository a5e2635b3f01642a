#include "dirt/common/math.hpp"

#include <algorithm>
#include <limits>

#include <boost/math/special_functions/erf.hpp>

#include "dirt/common/errors.hpp"

namespace dirt {

double log_normal_cdf(double x) {
    if (x > -37.0) return std::log(normal_cdf(x));
    // Asymptotic Mills-ratio series; relative error below 1e-12 for x <= -37.
    const double z = 1.0 / (x * x);
    const double series = 1.0 - z + 3.0 * z * z - 15.0 * z * z * z + 105.0 * z * z * z * z;
    return -0.5 * x * x - kLogSqrt2Pi - std::log(-x) + std::log(series);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: probability must lie in (0, 1)");
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

LognormalParams lognormal_from_moments(double mean_value, double stddev) {
    if (!(mean_value > 0.0) || !(stddev > 0.0))
        throw DomainError("lognormal_from_moments: mean and standard deviation must be positive");
    const double cv = stddev / mean_value;
    const double s2 = std::log1p(cv * cv);
    return {std::log(mean_value) - 0.5 * s2, std::sqrt(s2)};
}

double mean(std::span<const double> v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_std(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double log_sum_exp(std::span<const double> v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

}  // namespace dirt
