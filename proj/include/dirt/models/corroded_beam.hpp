#pragma once

#include <cstdint>
#include <vector>

#include "dirt/models/problem.hpp"

namespace dirt {

inline constexpr double kSteelUnitWeight = 78.5e3;  // N/m^3
inline constexpr double kAllowableStress = 500e6;   // Pa

/// Maximum bending stress (Pa) of a simply supported beam under a midspan load F plus self
/// weight: sigma = M / W, W = b h^2 / 6, M = F L / 4 + rho b h L^2 / 8.
double corroded_beam_stress(double b, double h, double F, double L, double unit_weight = kSteelUnitWeight);

/// One corrosion measurement of the section width and height (m).
struct BeamObservation {
    double b;
    double h;
};

/// The two inspection data sets (b, h).
inline const BeamObservation kBeamData1{0.18, 0.026};
inline const BeamObservation kBeamData2{0.14, 0.019};

struct CorrodedBeamOptions {
    std::size_t inner_samples = 10000;  ///< common-random-number sample for P(F | theta)
    std::uint64_t inner_seed = 20240611;
};

/// Hyperparameter problem theta = (mu_b, mu_h, sigma_b, sigma_h) updated with all the given
/// observations. P(F | theta) integrates b, h, L by a fixed inner sample and F in closed form.
/// `full_space` holds the 8-variable problem (theta plus standardized b, h, F, L).
BayesianReliabilityProblem corroded_beam_problem(const std::vector<BeamObservation>& data,
                                                 const CorrodedBeamOptions& opts = {});

}  // namespace dirt
