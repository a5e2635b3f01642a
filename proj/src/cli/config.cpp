#include "dirt/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/core.h>
#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "dirt/baselines/cross_entropy.hpp"
#include "dirt/baselines/subset_simulation.hpp"
#include "dirt/common/errors.hpp"
#include "dirt/transport/schedule.hpp"

namespace dirt {
namespace {

const std::set<std::string> kTopKeys{"problem", "method", "repetitions", "seed", "output", "jobs"};
const std::set<std::string> kLinearKeys{"name", "dim", "alpha", "half_width"};
const std::set<std::string> kConstantKeys{"name", "dim", "value"};
const std::set<std::string> kBeamKeys{"name", "update", "inner_samples"};
const std::set<std::string> kCantileverKeys{"name",      "terms",      "correlation_length", "observations",
                                            "noise_std", "mesh_nodes", "noise_correlation_length", "data_seed"};
const std::set<std::string> kDirtKeys{"name",   "rank",    "grid_nodes",      "cross_iterations", "layers",
                                      "beta0",  "betas",   "gamma",           "samples",          "rebuild_per_run",
                                      "gamma_grid", "gamma_max", "gamma_repetitions"};
const std::set<std::string> kSusKeys{"name", "samples_per_level", "p0", "max_levels"};
const std::set<std::string> kCeKeys{"name", "samples_per_level", "elite_fraction", "max_levels"};
const std::set<std::string> kMcKeys{"name", "samples"};

class Reader {
public:
    explicit Reader(std::string origin) : origin_(std::move(origin)) {}

    [[noreturn]] void fail(const YAML::Node& n, const std::string& msg) const {
        throw ConfigError(fmt::format("{}:{}: {}", origin_, n.Mark().line + 1, msg));
    }

    void check_keys(const YAML::Node& block, const std::set<std::string>& allowed, const std::string& where) const {
        if (!block.IsMap()) fail(block, fmt::format("'{}' must be a mapping", where));
        for (const auto& kv : block) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.count(key)) fail(kv.first, fmt::format("unknown key '{}' in {}", key, where));
        }
    }

    template <class T>
    void read(const YAML::Node& block, const char* key, T& out) const {
        const YAML::Node n = block[key];
        if (!n) return;
        try {
            if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
                // Reject negatives before yaml-cpp wraps them around.
                const auto s = n.as<std::string>();
                if (!s.empty() && s[0] == '-') fail(n, fmt::format("'{}' must be nonnegative", key));
            }
            out = n.as<T>();
        } catch (const YAML::Exception&) {
            fail(n, fmt::format("invalid value for '{}'", key));
        }
    }

    void read_list(const YAML::Node& block, const char* key, std::vector<double>& out) const {
        const YAML::Node n = block[key];
        if (!n) return;
        if (!n.IsSequence()) fail(n, fmt::format("'{}' must be a list", key));
        out.clear();
        for (const auto& v : n) {
            try {
                out.push_back(v.as<double>());
            } catch (const YAML::Exception&) {
                fail(v, fmt::format("invalid number in '{}'", key));
            }
        }
    }

private:
    std::string origin_;
};

const std::set<std::string>& problem_keys(const std::string& name) {
    if (name == "linear") return kLinearKeys;
    if (name == "constant") return kConstantKeys;
    if (name == "corroded_beam") return kBeamKeys;
    if (name == "cantilever") return kCantileverKeys;
    throw ConfigError(fmt::format("unknown problem '{}'", name));
}

const std::set<std::string>& method_keys(const std::string& name) {
    if (name == "dirt") return kDirtKeys;
    if (name == "sus" || name == "bus_sus") return kSusKeys;
    if (name == "ce") return kCeKeys;
    if (name == "mc") return kMcKeys;
    throw ConfigError(fmt::format("unknown method '{}'", name));
}

std::string number(double v) { return fmt::format("{}", v); }

std::string list(const std::vector<double>& v) { return fmt::format("[{}]", fmt::join(v, ", ")); }

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(fmt::format("{}:{}: {}", origin, e.mark.line + 1, e.msg));
    }
    const Reader rd(origin);
    RunConfig c;
    if (!root.IsMap()) throw ConfigError(fmt::format("{}: top level must be a mapping", origin));
    rd.check_keys(root, kTopKeys, "top level");
    rd.read(root, "repetitions", c.repetitions);
    rd.read(root, "seed", c.seed);
    rd.read(root, "output", c.output);
    rd.read(root, "jobs", c.jobs);

    if (const YAML::Node p = root["problem"]) {
        if (!p.IsMap()) rd.fail(p, "'problem' must be a mapping");
        rd.read(p, "name", c.problem.name);
        try {
            rd.check_keys(p, problem_keys(c.problem.name), "problem '" + c.problem.name + "'");
        } catch (const ConfigError& e) {
            if (std::string(e.what()).rfind(origin, 0) == 0) throw;
            rd.fail(p["name"] ? p["name"] : p, e.what());
        }
        auto& q = c.problem;
        rd.read(p, "dim", q.dim);
        rd.read(p, "alpha", q.alpha);
        rd.read(p, "half_width", q.half_width);
        rd.read(p, "value", q.value);
        rd.read(p, "update", q.update);
        rd.read(p, "inner_samples", q.inner_samples);
        rd.read(p, "terms", q.terms);
        rd.read(p, "correlation_length", q.correlation_length);
        rd.read(p, "observations", q.observations);
        rd.read(p, "noise_std", q.noise_std);
        rd.read(p, "noise_correlation_length", q.noise_correlation_length);
        rd.read(p, "mesh_nodes", q.mesh_nodes);
        rd.read(p, "data_seed", q.data_seed);
    }
    if (const YAML::Node m = root["method"]) {
        if (!m.IsMap()) rd.fail(m, "'method' must be a mapping");
        rd.read(m, "name", c.method.name);
        try {
            rd.check_keys(m, method_keys(c.method.name), "method '" + c.method.name + "'");
        } catch (const ConfigError& e) {
            if (std::string(e.what()).rfind(origin, 0) == 0) throw;
            rd.fail(m["name"] ? m["name"] : m, e.what());
        }
        auto& q = c.method;
        rd.read(m, "rank", q.rank);
        rd.read(m, "grid_nodes", q.grid_nodes);
        rd.read(m, "cross_iterations", q.cross_iterations);
        rd.read(m, "layers", q.layers);
        rd.read(m, "beta0", q.beta0);
        rd.read_list(m, "betas", q.betas);
        rd.read(m, "gamma", q.gamma);
        rd.read(m, "samples", q.samples);
        rd.read(m, "rebuild_per_run", q.rebuild_per_run);
        rd.read_list(m, "gamma_grid", q.gamma_grid);
        rd.read(m, "gamma_max", q.gamma_max);
        rd.read(m, "gamma_repetitions", q.gamma_repetitions);
        rd.read(m, "samples_per_level", q.samples_per_level);
        rd.read(m, "p0", q.p0);
        rd.read(m, "max_levels", q.max_levels);
        rd.read(m, "elite_fraction", q.elite_fraction);
    }
    try {
        validate_config(c);
    } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("{}: {}", origin, e.what()));
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path));
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

void validate_config(const RunConfig& c) {
    const auto& p = c.problem;
    (void)problem_keys(p.name);
    if (p.name == "linear") {
        if (p.dim < 1) throw ConfigError("problem.dim must be at least 1");
        if (!std::isfinite(p.alpha)) throw ConfigError("problem.alpha must be finite");
        if (!(p.half_width > 0.0)) throw ConfigError("problem.half_width must be positive");
    } else if (p.name == "constant") {
        if (p.dim < 1) throw ConfigError("problem.dim must be at least 1");
        if (!std::isfinite(p.value)) throw ConfigError("problem.value must be finite");
    } else if (p.name == "corroded_beam") {
        if (p.update < 0 || p.update > 2) throw ConfigError("problem.update must be 0, 1 or 2");
        if (p.inner_samples < 1) throw ConfigError("problem.inner_samples must be positive");
    } else {
        if (p.terms < 1 || p.terms > p.mesh_nodes) throw ConfigError("problem.terms must lie in [1, mesh_nodes]");
        if (p.observations < 1) throw ConfigError("problem.observations must be positive");
        if (!(p.correlation_length > 0.0) || !(p.noise_std > 0.0) || !(p.noise_correlation_length > 0.0))
            throw ConfigError("cantilever lengths and noise level must be positive");
        if (p.mesh_nodes < 2) throw ConfigError("problem.mesh_nodes must be at least 2");
    }

    const auto& m = c.method;
    (void)method_keys(m.name);
    if (m.name == "dirt") {
        if (m.rank < 1) throw ConfigError("method.rank must be at least 1");
        if (m.grid_nodes < 2) throw ConfigError("method.grid_nodes must be at least 2");
        if (m.cross_iterations < 1) throw ConfigError("method.cross_iterations must be at least 1");
        if (m.samples < 1) throw ConfigError("method.samples must be positive");
        if (!(m.gamma > 0.0)) throw ConfigError("method.gamma must be positive");
        if (m.betas.empty()) {
            if (m.layers < 1) throw ConfigError("method.layers must be at least 1");
            if (m.layers > 1 && !(m.beta0 > 0.0 && m.beta0 < 1.0)) throw ConfigError("method.beta0 must lie in (0, 1)");
        } else {
            (void)TemperingSchedule(m.betas);
        }
        if (!m.gamma_grid.empty()) {
            for (double g : m.gamma_grid)
                if (!(g > 0.0)) throw ConfigError("method.gamma_grid values must be positive");
            if (!(m.gamma_max > *std::max_element(m.gamma_grid.begin(), m.gamma_grid.end())))
                throw ConfigError("method.gamma_max must exceed every gamma_grid value");
            if (m.gamma_repetitions < 2) throw ConfigError("method.gamma_repetitions must be at least 2");
        }
    } else if (m.name == "sus" || m.name == "bus_sus") {
        SusConfig s{m.samples_per_level, m.p0, m.max_levels};
        s.validate();
    } else if (m.name == "ce") {
        const std::size_t dim = p.name == "linear" || p.name == "constant" ? p.dim : p.name == "cantilever" ? p.terms + 1 : 9;
        CeConfig{m.samples_per_level, m.elite_fraction, m.max_levels}.validate(dim);
    } else if (m.samples < 1) {
        throw ConfigError("method.samples must be positive");
    }
    if (c.repetitions < 1) throw ConfigError("repetitions must be at least 1");
    if (c.jobs < 1) throw ConfigError("jobs must be at least 1");
}

std::string emit_config(const RunConfig& c) {
    std::string out;
    auto line = [&out](const std::string& s) { out += s + "\n"; };
    const auto& p = c.problem;
    line("problem:");
    line("  name: " + p.name);
    if (p.name == "linear") {
        line(fmt::format("  dim: {}", p.dim));
        line("  alpha: " + number(p.alpha));
        line("  half_width: " + number(p.half_width));
    } else if (p.name == "constant") {
        line(fmt::format("  dim: {}", p.dim));
        line("  value: " + number(p.value));
    } else if (p.name == "corroded_beam") {
        line(fmt::format("  update: {}", p.update));
        line(fmt::format("  inner_samples: {}", p.inner_samples));
    } else {
        line(fmt::format("  terms: {}", p.terms));
        line("  correlation_length: " + number(p.correlation_length));
        line(fmt::format("  observations: {}", p.observations));
        line("  noise_std: " + number(p.noise_std));
        line("  noise_correlation_length: " + number(p.noise_correlation_length));
        line(fmt::format("  mesh_nodes: {}", p.mesh_nodes));
        line(fmt::format("  data_seed: {}", p.data_seed));
    }
    const auto& m = c.method;
    line("method:");
    line("  name: " + m.name);
    if (m.name == "dirt") {
        line(fmt::format("  rank: {}", m.rank));
        line(fmt::format("  grid_nodes: {}", m.grid_nodes));
        line(fmt::format("  cross_iterations: {}", m.cross_iterations));
        line(fmt::format("  layers: {}", m.layers));
        line("  beta0: " + number(m.beta0));
        if (!m.betas.empty()) line("  betas: " + list(m.betas));
        line("  gamma: " + number(m.gamma));
        line(fmt::format("  samples: {}", m.samples));
        line(fmt::format("  rebuild_per_run: {}", m.rebuild_per_run));
        if (!m.gamma_grid.empty()) {
            line("  gamma_grid: " + list(m.gamma_grid));
            line("  gamma_max: " + number(m.gamma_max));
            line(fmt::format("  gamma_repetitions: {}", m.gamma_repetitions));
        }
    } else if (m.name == "mc") {
        line(fmt::format("  samples: {}", m.samples));
    } else {
        line(fmt::format("  samples_per_level: {}", m.samples_per_level));
        if (m.name == "ce") line("  elite_fraction: " + number(m.elite_fraction));
        else line("  p0: " + number(m.p0));
        line(fmt::format("  max_levels: {}", m.max_levels));
    }
    line(fmt::format("repetitions: {}", c.repetitions));
    line(fmt::format("seed: {}", c.seed));
    line("output: " + YAML::Dump(YAML::Node(c.output)));
    line(fmt::format("jobs: {}", c.jobs));
    return out;
}

}  // namespace dirt
