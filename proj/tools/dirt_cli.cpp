// dirt: build transport maps, run failure-probability estimators and benchmark suites.
//
// Exit codes: 0 success, 2 numerical failure, 3 configuration error, 4 budget/resource.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "dirt/cli/config.hpp"
#include "dirt/cli/output.hpp"
#include "dirt/cli/runner.hpp"
#include "dirt/cli/suites.hpp"
#include "dirt/common/errors.hpp"

namespace fs = std::filesystem;
using namespace dirt;

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> jobs;
    std::optional<std::size_t> repetitions;
    std::optional<std::string> out;
    std::string map;
    std::string suite;
    bool no_timing = false;
};

RunConfig load_with_overrides(const Options& o) {
    RunConfig c = load_config(o.config);
    if (o.seed) c.seed = *o.seed;
    if (o.jobs) c.jobs = *o.jobs;
    if (o.repetitions) c.repetitions = *o.repetitions;
    if (o.out) c.output = *o.out;
    validate_config(c);
    return c;
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError(fmt::format("cannot write {}", path.string()));
    out << text;
}

int cmd_build_map(const Options& o) {
    const RunConfig c = load_with_overrides(o);
    if (c.method.name != "dirt") throw ConfigError("build-map needs method dirt");
    const auto inst = make_problem(c.problem);
    const auto maps = build_maps(inst.problem, c.method, shared_build_seed(c.seed));
    write_maps(maps, c.output);
    auto report = build_report_json(maps);
    report["seed"] = c.seed;
    report["problem"] = inst.problem.name;
    write_file(fs::path(c.output) / "build_report.json", report.dump(2) + "\n");
    fmt::print("wrote {} (map_q: {} evaluations)\n", c.output, maps.q.stats().target_evaluations);
    return 0;
}

int cmd_estimate(const Options& o) {
    const RunConfig c = load_with_overrides(o);
    std::optional<MapBundle> maps;
    if (!o.map.empty()) {
        if (c.method.name != "dirt") throw ConfigError("--map only applies to method dirt");
        maps = read_maps(o.map);
    }
    const auto inst = make_problem(c.problem);
    const RunSummary s = run_estimate(c, maps ? &*maps : nullptr);
    const bool timing = !o.no_timing;
    const std::string csv = csv_header() + "\n" + csv_row("estimate", inst.label, s, timing) + "\n";
    write_file(fs::path(c.output) / "estimate.csv", csv);
    write_file(fs::path(c.output) / "estimate.json", summary_json(s, timing).dump(2) + "\n");
    std::fputs(csv.c_str(), stdout);
    return 0;
}

int cmd_benchmark(const Options& o) {
    const std::uint64_t seed = o.seed.value_or(1);
    const std::size_t reps = o.repetitions.value_or(10);
    const auto cells = suite_cells(o.suite, seed, reps);
    const auto results = run_suite(cells, o.jobs.value_or(1));
    const bool timing = !o.no_timing;

    std::string csv = csv_header() + "\n";
    nlohmann::json detail = nlohmann::json::array();
    std::vector<TableCell> table;
    int status = 0;
    for (const auto& r : results) {
        if (r.summary) {
            csv += csv_row(o.suite, r.cell.label, *r.summary, timing) + "\n";
            auto j = summary_json(*r.summary, timing);
            j["row"] = r.cell.row;
            detail.push_back(std::move(j));
            table.push_back({r.cell.row, r.cell.column, format_cell(*r.summary)});
        } else {
            detail.push_back({{"row", r.cell.row}, {"method", r.cell.column}, {"seed", r.cell.config.seed}, {"error", r.error}});
            table.push_back({r.cell.row, r.cell.column, "failed"});
            std::fprintf(stderr, "%s / %s: %s\n", r.cell.row.c_str(), r.cell.column.c_str(), r.error.c_str());
            if (status == 0) status = r.exit_code;
        }
    }
    const std::string text = format_table(fmt::format("{}: mean  CoV  (# evals)", o.suite), table);
    const fs::path dir = o.out.value_or("out");
    write_file(dir / (o.suite + ".csv"), csv);
    write_file(dir / (o.suite + ".json"), detail.dump(2) + "\n");
    write_file(dir / (o.suite + ".txt"), text);
    std::fputs(text.c_str(), stdout);
    return status;
}

int cmd_tune_gamma(const Options& o) {
    const RunConfig c = load_with_overrides(o);
    const auto sel = run_gamma_tuning(c);
    nlohmann::json j{{"gamma", sel.gamma},
                     {"reference_mean", sel.reference_mean},
                     {"standard_error", sel.standard_error},
                     {"grid", c.method.gamma_grid},
                     {"bias", sel.bias}};
    write_file(fs::path(c.output) / "tune_gamma.json", j.dump(2) + "\n");
    fmt::print("gamma* = {}\n", sel.gamma);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rare-event failure probabilities with deep inverse Rosenblatt transport"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        if (needs_config) sub->add_option("--config", o.config, "YAML run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "Master seed (overrides the config)");
        sub->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--out", o.out, "Output directory (overrides the config)");
    };
    auto* build = app.add_subcommand("build-map", "Build and save the transport map(s) of a dirt config");
    add_common(build, true);
    auto* estimate = app.add_subcommand("estimate", "Run the configured estimator");
    add_common(estimate, true);
    estimate->add_option("--map", o.map, "Directory written by build-map; reused instead of building");
    estimate->add_option("--repetitions", o.repetitions, "Repetitions (overrides the config)")->check(CLI::PositiveNumber);
    estimate->add_flag("--no-timing", o.no_timing, "Write 0 in the seconds column for byte-identical output");
    auto* bench = app.add_subcommand("benchmark", "Run a benchmark suite");
    add_common(bench, false);
    bench->add_option("suite", o.suite, "linear_dim_sweep | linear_alpha_sweep | corroded_beam | cantilever")->required();
    bench->add_option("--repetitions", o.repetitions, "Repetitions per cell (default 10)")->check(CLI::PositiveNumber);
    bench->add_flag("--no-timing", o.no_timing, "Write 0 in the seconds column");
    auto* tune = app.add_subcommand("tune-gamma", "Select the sigmoid sharpness from a grid");
    add_common(tune, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_code(ErrorKind::config);
    }

    try {
        if (*build) return cmd_build_map(o);
        if (*estimate) return cmd_estimate(o);
        if (*bench) return cmd_benchmark(o);
        return cmd_tune_gamma(o);
    } catch (const Error& e) {
        std::fprintf(stderr, "error (%s): %s\n", to_string(e.kind()), e.what());
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
