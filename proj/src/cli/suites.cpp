#include "dirt/cli/suites.hpp"

#include <fmt/core.h>

#include "dirt/cli/runner.hpp"
#include "dirt/common/errors.hpp"
#include "dirt/common/parallel.hpp"
#include "dirt/common/random.hpp"

namespace dirt {
namespace {

MethodConfig sus_method(const char* name, std::size_t n) {
    MethodConfig m;
    m.name = name;
    m.samples_per_level = n;
    m.p0 = 0.1;
    return m;
}

MethodConfig ce_method(std::size_t n) {
    MethodConfig m;
    m.name = "ce";
    m.samples_per_level = n;
    m.elite_fraction = 0.1;
    return m;
}

std::size_t linear_ce_samples(std::size_t d) {
    if (d <= 2) return 3000;
    if (d <= 25) return 10000;
    if (d <= 50) return 20000;
    if (d <= 75) return 50000;
    return 100000;
}

// Geometric tempering beta0 = 1e-4 with a factor 10 per layer.
MethodConfig tenfold_dirt(std::size_t rank, std::size_t nodes, double gamma) {
    MethodConfig m;
    m.name = "dirt";
    m.rank = rank;
    m.grid_nodes = nodes;
    m.layers = 5;
    m.beta0 = 1e-4;
    m.gamma = gamma;
    m.samples = 1000;
    return m;
}

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"linear_dim_sweep", "linear_alpha_sweep", "corroded_beam", "cantilever"};
    return names;
}

MethodConfig linear_dirt_method(std::size_t d) {
    MethodConfig m;
    m.name = "dirt";
    m.layers = 12;
    m.beta0 = 1e-4;
    m.gamma = 10.0;
    m.samples = 1000;
    if (d <= 25) {
        m.rank = 2;
        m.grid_nodes = 33;
        m.cross_iterations = 4;
        m.rebuild_per_run = true;
    } else {
        // A rank-4 build at d = 100 takes minutes; repetitions share one map.
        m.rank = 4;
        m.grid_nodes = 17;
        m.cross_iterations = 2;
        m.rebuild_per_run = false;
    }
    return m;
}

std::vector<SuiteCell> suite_cells(const std::string& suite, std::uint64_t master, std::size_t repetitions) {
    std::vector<SuiteCell> cells;
    auto add = [&](std::string row, std::string label, ProblemConfig p, MethodConfig m) {
        RunConfig c;
        c.problem = std::move(p);
        c.method = std::move(m);
        c.repetitions = repetitions;
        c.seed = derive_seed(master, cells.size());
        c.jobs = 1;
        const std::string column = c.method.name;
        cells.push_back({std::move(row), column, std::move(label), std::move(c)});
    };
    auto linear = [](std::size_t d, double alpha) {
        ProblemConfig p;
        p.name = "linear";
        p.dim = d;
        p.alpha = alpha;
        return p;
    };

    if (suite == "linear_dim_sweep") {
        for (std::size_t d : {2, 25, 50, 75, 100}) {
            const auto row = fmt::format("d={}", d);
            add(row, "3.5", linear(d, 3.5), linear_dirt_method(d));
            add(row, "3.5", linear(d, 3.5), sus_method("sus", 3000));
            add(row, "3.5", linear(d, 3.5), ce_method(linear_ce_samples(d)));
        }
    } else if (suite == "linear_alpha_sweep") {
        for (double a : {2.5, 3.5, 4.5, 5.5, 6.5, 7.5}) {
            const auto row = fmt::format("alpha={}", a);
            const auto label = fmt::format("{}", a);
            add(row, label, linear(100, a), linear_dirt_method(100));
            add(row, label, linear(100, a), sus_method("sus", 3000));
            add(row, label, linear(100, a), ce_method(linear_ce_samples(100)));
        }
    } else if (suite == "corroded_beam") {
        for (int u : {1, 2}) {
            ProblemConfig p;
            p.name = "corroded_beam";
            p.update = u;
            const auto row = fmt::format("update {}", u);
            const auto label = fmt::format("{}", u);
            add(row, label, p, tenfold_dirt(2, 17, 10.0));
            add(row, label, p, sus_method("bus_sus", 3000));
            add(row, label, p, ce_method(3000));
        }
    } else if (suite == "cantilever") {
        for (std::size_t m : {5, 10}) {
            ProblemConfig p;
            p.name = "cantilever";
            p.terms = m;
            p.correlation_length = 2.5;
            p.observations = 10;
            const auto row = fmt::format("M={}", m);
            const auto label = fmt::format("M{}", m);
            add(row, label, p, tenfold_dirt(4, 17, 1000.0));
            add(row, label, p, sus_method("bus_sus", 10000));
            add(row, label, p, ce_method(16384));
        }
    } else {
        throw ConfigError(fmt::format("unknown suite '{}' (expected linear_dim_sweep, linear_alpha_sweep, "
                                      "corroded_beam or cantilever)",
                                      suite));
    }
    return cells;
}

std::vector<CellResult> run_suite(const std::vector<SuiteCell>& cells, std::size_t jobs) {
    std::vector<CellResult> out(cells.size());
    parallel_for(cells.size(), jobs, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            out[i].cell = cells[i];
            try {
                out[i].summary = run_estimate(cells[i].config);
            } catch (const Error& err) {
                out[i].error = err.what();
                out[i].exit_code = exit_code(err.kind());
            } catch (const std::exception& err) {
                out[i].error = err.what();
                out[i].exit_code = 1;
            }
        }
    });
    return out;
}

}  // namespace dirt
