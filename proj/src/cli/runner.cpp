#include "dirt/cli/runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <fmt/core.h>

#include "dirt/baselines/cross_entropy.hpp"
#include "dirt/baselines/subset_simulation.hpp"
#include "dirt/common/errors.hpp"
#include "dirt/common/parallel.hpp"
#include "dirt/common/random.hpp"
#include "dirt/estimators/importance.hpp"
#include "dirt/models/cantilever.hpp"
#include "dirt/models/corroded_beam.hpp"
#include "dirt/models/linear.hpp"

namespace dirt {
namespace {

constexpr std::uint64_t kSharedBuildStream = 0x5eed0001;

}  // namespace

ProblemInstance make_problem(const ProblemConfig& c) {
    ProblemInstance inst;
    if (c.name == "linear") {
        inst.problem = linear_problem(c.dim, c.alpha, c.half_width);
        inst.label = fmt::format("{}", c.alpha);
    } else if (c.name == "constant") {
        const double v = c.value;
        inst.problem = standard_normal_problem("constant", c.dim, [v](std::span<const double>) { return v; });
        inst.label = fmt::format("{}", v);
    } else if (c.name == "corroded_beam") {
        std::vector<BeamObservation> data;
        if (c.update >= 1) data.push_back(kBeamData1);
        if (c.update >= 2) data.push_back(kBeamData2);
        CorrodedBeamOptions o;
        o.inner_samples = c.inner_samples;
        inst.problem = corroded_beam_problem(data, o);
        inst.label = fmt::format("{}", c.update);
    } else if (c.name == "cantilever") {
        CantileverOptions o;
        o.terms = c.terms;
        o.correlation_length = c.correlation_length;
        o.observations = c.observations;
        o.noise_std = c.noise_std;
        o.noise_correlation_length = c.noise_correlation_length;
        o.mesh_nodes = c.mesh_nodes;
        o.seed = c.data_seed;
        inst.problem = cantilever_problem(o);
        inst.label = fmt::format("M{}", c.terms);
    } else {
        throw ConfigError(fmt::format("unknown problem '{}'", c.name));
    }
    return inst;
}

TemperingSchedule make_schedule(const MethodConfig& m) {
    if (!m.betas.empty()) return TemperingSchedule(m.betas);
    if (m.layers <= 1) return TemperingSchedule{};
    return TemperingSchedule::geometric(m.beta0, m.layers - 1);
}

DirtConfig make_dirt_config(const MethodConfig& m, std::uint64_t cross_seed) {
    DirtConfig cfg;
    cfg.grid_nodes = m.grid_nodes;
    cfg.cross.max_rank = m.rank;
    cfg.cross.max_iterations = m.cross_iterations;
    cfg.cross.seed = cross_seed;
    return cfg;
}

MapBundle build_maps(const BayesianReliabilityProblem& problem, const MethodConfig& m, std::uint64_t cross_seed) {
    const auto sched = make_schedule(m);
    const auto cfg = make_dirt_config(m, cross_seed);
    if (!problem.has_likelihood())
        return {build_map(problem, MapTarget::prior_failure, m.gamma, sched, cfg), std::nullopt};
    MapBundle b{build_map(problem, MapTarget::posterior_failure, m.gamma, sched, cfg), std::nullopt};
    b.z = build_map(problem, MapTarget::posterior, m.gamma, sched, make_dirt_config(m, derive_seed(cross_seed, 1)));
    return b;
}

std::uint64_t run_seed(std::uint64_t master, std::size_t rep) { return derive_seed(master, rep); }
std::uint64_t shared_build_seed(std::uint64_t master) { return derive_seed(master, kSharedBuildStream); }

namespace {

EstimateReport run_dirt(const ProblemInstance& inst, const MethodConfig& m, const MapBundle& maps, std::uint64_t seed) {
    const auto& p = inst.problem;
    if (p.has_likelihood()) {
        if (!maps.z) throw ConfigError("posterior estimate needs an evidence map (map_z)");
        return estimate_posterior_pf(maps.q, *maps.z, p, m.samples, m.gamma, seed);
    }
    return estimate_prior_pf(maps.q, p, m.samples, m.gamma, seed);
}

EstimateReport run_one(const RunConfig& cfg, const ProblemInstance& inst, const MapBundle* shared, std::size_t rep) {
    const auto& m = cfg.method;
    const auto& p = inst.problem;
    const std::uint64_t seed = run_seed(cfg.seed, rep);
    if (m.name == "dirt") {
        if (shared) return run_dirt(inst, m, *shared, derive_seed(seed, 2));
        const auto t0 = std::chrono::steady_clock::now();
        const auto maps = build_maps(p, m, derive_seed(seed, 1));
        auto r = run_dirt(inst, m, maps, derive_seed(seed, 2));
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        r.seed = seed;
        return r;
    }
    SusConfig sus{m.samples_per_level, m.p0, m.max_levels};
    CeConfig ce{m.samples_per_level, m.elite_fraction, m.max_levels};
    if (m.name == "sus") return subset_simulation(p, sus, seed);
    if (m.name == "bus_sus") return bus_sus_posterior(p, sus, seed);
    if (m.name == "ce") return p.has_likelihood() ? cross_entropy_posterior(p, ce, seed) : cross_entropy(p, ce, seed);
    if (m.name == "mc") {
        if (p.has_likelihood()) throw ConfigError("crude MC estimates prior failure probabilities only");
        return crude_mc(p, m.samples, seed);
    }
    throw ConfigError(fmt::format("unknown method '{}'", m.name));
}

}  // namespace

RunSummary run_estimate(const RunConfig& cfg, const MapBundle* maps) {
    validate_config(cfg);
    const auto inst = make_problem(cfg.problem);
    RunSummary s;
    s.method = cfg.method.name;
    s.problem = inst.problem.name;
    s.dim = inst.problem.dim;
    s.seed = cfg.seed;
    std::optional<MapBundle> shared;
    if (cfg.method.name == "dirt" && !maps && !cfg.method.rebuild_per_run) {
        shared = build_maps(inst.problem, cfg.method, shared_build_seed(cfg.seed));
        maps = &*shared;
    }
    s.runs.resize(cfg.repetitions);
    parallel_for(cfg.repetitions, cfg.jobs, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) s.runs[i] = run_one(cfg, inst, maps, i);
    });
    return s;
}

GammaSelection run_gamma_tuning(const RunConfig& cfg) {
    validate_config(cfg);
    if (cfg.method.name != "dirt") throw ConfigError("tune-gamma needs method dirt");
    if (cfg.method.gamma_grid.empty()) throw ConfigError("tune-gamma needs method.gamma_grid and method.gamma_max");
    const auto inst = make_problem(cfg.problem);
    if (inst.problem.has_conditional_failure())
        throw ConfigError("tune-gamma: this problem integrates failure analytically; gamma has no effect");
    return tune_gamma(cfg.method.gamma_grid, cfg.method.gamma_max, cfg.method.gamma_repetitions,
                      [&](double gamma, std::size_t rep) {
                          MethodConfig m = cfg.method;
                          m.gamma = gamma;
                          const std::uint64_t seed = run_seed(cfg.seed, rep);
                          const auto maps = build_maps(inst.problem, m, derive_seed(seed, 1));
                          const auto r = run_dirt(inst, m, maps, derive_seed(seed, 2));
                          return std::isnan(r.smoothed_estimate) ? r.estimate : r.smoothed_estimate;
                      });
}

void write_maps(const MapBundle& maps, const std::string& directory) {
    std::filesystem::create_directories(directory);
    auto put = [&](const DirtMap& m, const char* name) {
        std::ofstream out(std::filesystem::path(directory) / name);
        if (!out) throw ConfigError(fmt::format("cannot write {}/{}", directory, name));
        m.write_text(out);
    };
    put(maps.q, "map_q.txt");
    if (maps.z) put(*maps.z, "map_z.txt");
}

MapBundle read_maps(const std::string& directory) {
    namespace fs = std::filesystem;
    auto get = [&](const char* name) {
        std::ifstream in(fs::path(directory) / name);
        if (!in) throw ConfigError(fmt::format("cannot read {}/{}", directory, name));
        return DirtMap::read_text(in);
    };
    MapBundle b{get("map_q.txt"), std::nullopt};
    if (fs::exists(fs::path(directory) / "map_z.txt")) b.z = get("map_z.txt");
    return b;
}

}  // namespace dirt
