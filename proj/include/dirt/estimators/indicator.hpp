#pragma once

namespace dirt {

/// s_gamma(g) = 1 / (1 + exp(gamma g)), the sigmoid relaxation of the indicator of g <= 0.
/// s(-g) = 1 - s(g) holds exactly in floating point; saturates to 0 or 1 for large |gamma g|.
/// Absolute accuracy only: values far below 1e-16 round to 0 (log_smooth_indicator does not).
double smooth_indicator(double g, double gamma);

/// log s_gamma(g) = -softplus(gamma g); finite for every finite input.
double log_smooth_indicator(double g, double gamma);

/// Indicator of g <= 0.
inline double sharp_indicator(double g) noexcept { return g <= 0.0 ? 1.0 : 0.0; }

}  // namespace dirt
