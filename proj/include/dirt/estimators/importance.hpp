#pragma once

#include <cstddef>
#include <cstdint>

#include "dirt/estimators/report.hpp"
#include "dirt/models/problem.hpp"
#include "dirt/transport/dirt.hpp"

namespace dirt {

/// Which density a transport map is built for.
enum class MapTarget {
    prior_failure,      ///< s_gamma(g) pi_0, the optimal proposal for prior P(F)
    posterior_failure,  ///< s_gamma(g) L pi_0, the numerator proposal
    posterior           ///< L pi_0, the evidence proposal
};

/// Unnormalized log target of the given kind. Problems with a conditional failure
/// probability use log P(F | x) in place of log s_gamma(g); gamma is then ignored.
LogTarget make_log_target(const BayesianReliabilityProblem& problem, MapTarget kind, double gamma);

/// Builds the map on the problem bounds with the default reference.
DirtMap build_map(const BayesianReliabilityProblem& problem, MapTarget kind, double gamma,
                  const TemperingSchedule& schedule, const DirtConfig& cfg);

/// Mean of the sharp indicator (or of P(F | x)) over N prior draws.
EstimateReport crude_mc(const BayesianReliabilityProblem& problem, std::size_t N, std::uint64_t seed);

/// (1/N) sum I(x_i) pi_0(x_i) / p(x_i), x_i pushed from reference draws. The headline uses the
/// sharp indicator; smoothed_estimate keeps s_gamma in the weight. lsf_evals includes the
/// map's build evaluations.
EstimateReport estimate_prior_pf(const DirtMap& map, const BayesianReliabilityProblem& problem, std::size_t N,
                                 double gamma, std::uint64_t seed, std::size_t workers = 1);

/// Ratio estimator Q / Z with Q from map_q (target s_gamma L pi_0) and Z from map_z (target
/// L pi_0). The evidence itself is never formed from a normalized density. Throws
/// DegenerateError when every Z weight vanishes.
EstimateReport estimate_posterior_pf(const DirtMap& map_q, const DirtMap& map_z, const BayesianReliabilityProblem& problem,
                                     std::size_t N, double gamma, std::uint64_t seed, std::size_t workers = 1);

}  // namespace dirt
