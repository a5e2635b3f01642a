#pragma once

#include <cmath>
#include <numbers>
#include <span>

namespace dirt {

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2*pi))

/// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
/// log of the standard normal CDF; accurate in the lower tail.
double log_normal_cdf(double x);
/// Standard normal quantile, p in (0, 1).
double normal_quantile(double p);
inline double log_normal_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

/// Parameters (mu, sigma) of log X when X is lognormal with the given mean and standard deviation.
struct LognormalParams {
    double mu;
    double sigma;
};
LognormalParams lognormal_from_moments(double mean, double stddev);

double mean(std::span<const double> v);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_std(std::span<const double> v);
/// log(sum(exp(v))) without overflow; -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> v);

}  // namespace dirt
