#pragma once

#include <memory>
#include <optional>
#include <string>

#include "dirt/cli/config.hpp"
#include "dirt/estimators/gamma_tuning.hpp"
#include "dirt/estimators/report.hpp"
#include "dirt/models/problem.hpp"
#include "dirt/transport/dirt.hpp"

namespace dirt {

/// A constructed problem plus the table label of its parameter (alpha or update).
struct ProblemInstance {
    BayesianReliabilityProblem problem;
    std::string label;
};

ProblemInstance make_problem(const ProblemConfig& cfg);

/// Tempering schedule of a dirt method block.
TemperingSchedule make_schedule(const MethodConfig& m);
DirtConfig make_dirt_config(const MethodConfig& m, std::uint64_t cross_seed);

/// Numerator map (and the evidence map when the problem has data).
struct MapBundle {
    DirtMap q;
    std::optional<DirtMap> z;
};

MapBundle build_maps(const BayesianReliabilityProblem& problem, const MethodConfig& m, std::uint64_t cross_seed);

/// Seed of repetition `rep` under the master seed.
std::uint64_t run_seed(std::uint64_t master, std::size_t rep);
/// Cross seed of the map shared by all repetitions.
std::uint64_t shared_build_seed(std::uint64_t master);

/// Runs the configured method `cfg.repetitions` times. With `maps` the DIRT estimator reuses
/// them instead of building. Repetitions run on up to `cfg.jobs` threads; results are stored
/// in repetition order.
RunSummary run_estimate(const RunConfig& cfg, const MapBundle* maps = nullptr);

/// Tunes gamma over method.gamma_grid against method.gamma_max. Each run rebuilds its maps and
/// contributes its smoothed estimate (the gamma-dependent one). Requires method dirt.
GammaSelection run_gamma_tuning(const RunConfig& cfg);

/// Files written by build-map: map_q.txt, map_z.txt (with data) and build_report.json.
void write_maps(const MapBundle& maps, const std::string& directory);
MapBundle read_maps(const std::string& directory);

}  // namespace dirt
