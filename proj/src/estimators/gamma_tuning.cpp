#include "dirt/estimators/gamma_tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "dirt/common/errors.hpp"
#include "dirt/common/math.hpp"

namespace dirt {

GammaSelection select_gamma(std::span<const double> grid, const std::vector<std::vector<double>>& estimates,
                            std::span<const double> reference) {
    if (grid.empty()) throw ConfigError("select_gamma: empty grid");
    if (estimates.size() != grid.size())
        throw ConfigError(fmt::format("select_gamma: {} estimate sets for {} grid points", estimates.size(), grid.size()));
    if (reference.size() < 2) throw ConfigError("select_gamma: need at least two reference estimates");
    bool any = std::any_of(reference.begin(), reference.end(), [](double v) { return v != 0.0; });
    for (const auto& e : estimates) {
        if (e.empty()) throw ConfigError("select_gamma: empty estimate set");
        any = any || std::any_of(e.begin(), e.end(), [](double v) { return v != 0.0; });
    }
    if (!any) throw DegenerateError("select_gamma: every estimate is zero, failure never observed");

    GammaSelection s;
    s.reference_mean = mean(reference);
    s.standard_error = sample_std(reference) / std::sqrt(static_cast<double>(reference.size()));
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        s.bias.push_back(std::abs(mean(estimates[i]) - s.reference_mean));
        const double score = std::abs(s.bias.back() - s.standard_error);
        if (score < best) {
            best = score;
            s.gamma = grid[i];
        }
    }
    return s;
}

GammaSelection tune_gamma(std::span<const double> grid, double gamma_max, std::size_t n_rep, const GammaRun& run) {
    if (grid.empty()) throw ConfigError("tune_gamma: empty grid");
    if (n_rep < 2) throw ConfigError("tune_gamma: N_rep must be at least 2");
    for (double g : grid)
        if (!(g > 0.0)) throw ConfigError(fmt::format("tune_gamma: grid value {} is not positive", g));
    if (!(gamma_max > *std::max_element(grid.begin(), grid.end())))
        throw ConfigError("tune_gamma: gamma_max must exceed every grid point");
    std::vector<std::vector<double>> est(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t r = 0; r < n_rep; ++r) est[i].push_back(run(grid[i], r));
    std::vector<double> ref;
    for (std::size_t r = 0; r < n_rep; ++r) ref.push_back(run(gamma_max, r));
    return select_gamma(grid, est, ref);
}

}  // namespace dirt
