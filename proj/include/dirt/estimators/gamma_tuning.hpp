#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace dirt {

struct GammaSelection {
    double gamma = 0.0;
    double reference_mean = 0.0;   ///< mean estimate at gamma_max
    double standard_error = 0.0;   ///< std / sqrt(N_rep) at gamma_max
    std::vector<double> bias;      ///< |mean(gamma) - reference_mean| per grid point
};

/// Bias-versus-noise rule: with SE the standard error of the gamma_max estimates, returns the
/// grid point minimizing | |mean(gamma) - mean(gamma_max)| - SE |. Ties go to the first
/// grid point. Throws ConfigError on empty or mismatched input and DegenerateError when every
/// estimate is zero.
GammaSelection select_gamma(std::span<const double> grid, const std::vector<std::vector<double>>& estimates,
                            std::span<const double> reference);

/// One estimator run at the given gamma and repetition index.
using GammaRun = std::function<double(double gamma, std::size_t rep)>;

/// Runs the estimator N_rep times per grid point and at gamma_max, then applies select_gamma.
/// Requires a nonempty grid, gamma_max above every grid point and N_rep >= 2.
GammaSelection tune_gamma(std::span<const double> grid, double gamma_max, std::size_t n_rep, const GammaRun& run);

}  // namespace dirt
