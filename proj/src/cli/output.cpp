#include "dirt/cli/output.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

namespace dirt {
namespace {

// Full round-trip precision so that equal CSV text means equal values.
std::string exact(double v) {
    if (std::isnan(v)) return "nan";
    return fmt::format("{}", v);
}

nlohmann::json cross_json(const CrossReport& r) {
    return {{"iterations", r.iterations}, {"evals", r.evaluations}, {"ranks", r.ranks}, {"final_change", r.final_change}};
}

nlohmann::json map_json(const DirtMap& m) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : m.stats().layers) layers.push_back(cross_json(l));
    std::size_t max_rank = 0;
    for (const auto& l : m.stats().layers)
        for (auto r : l.ranks) max_rank = std::max(max_rank, r);
    return {{"dim", m.dim()},
            {"layers", m.layer_count()},
            {"betas", m.schedule().betas()},
            {"target_evaluations", m.stats().target_evaluations},
            {"max_rank", max_rank},
            {"cross", layers}};
}

}  // namespace

std::string csv_header() {
    return "schema_version,suite,problem,method,d,alpha_or_update,estimate,cov,lsf_evals,seed,seconds";
}

std::string csv_row(const std::string& suite, const std::string& label, const RunSummary& s, bool timing) {
    return fmt::format("{},{},{},{},{},{},{},{},{},{},{}", kCsvSchemaVersion, suite, s.problem, s.method, s.dim, label,
                       exact(s.mean()), exact(s.cov()), exact(s.mean_lsf_evals()), s.seed,
                       timing ? fmt::format("{:.3f}", s.seconds()) : std::string("0"));
}

nlohmann::json summary_json(const RunSummary& s, bool timing) {
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& r : s.runs) {
        nlohmann::json j{{"estimate", r.estimate},
                         {"std_error", std::isnan(r.std_error) ? nlohmann::json() : nlohmann::json(r.std_error)},
                         {"lsf_evals", r.lsf_evals},
                         {"likelihood_evals", r.likelihood_evals},
                         {"seed", r.seed},
                         {"truncated", r.truncated},
                         {"levels", r.levels},
                         {"warnings", r.warnings}};
        if (!std::isnan(r.smoothed_estimate)) j["smoothed_estimate"] = r.smoothed_estimate;
        if (timing) j["seconds"] = r.seconds;
        runs.push_back(std::move(j));
    }
    const double cov = s.cov();
    return {{"problem", s.problem},
            {"method", s.method},
            {"d", s.dim},
            {"seed", s.seed},
            {"mean", s.mean()},
            {"cov", std::isnan(cov) ? nlohmann::json() : nlohmann::json(cov)},
            {"mean_lsf_evals", s.mean_lsf_evals()},
            {"runs", runs}};
}

nlohmann::json build_report_json(const MapBundle& maps) {
    nlohmann::json j{{"map_q", map_json(maps.q)}};
    if (maps.z) j["map_z"] = map_json(*maps.z);
    return j;
}

std::string format_cell(const RunSummary& s) {
    const double cov = s.cov();
    return fmt::format("{:.3e}  {}  ({:.0f})", s.mean(), std::isnan(cov) ? std::string("  -   ") : fmt::format("{:.4f}", cov),
                       s.mean_lsf_evals());
}

std::string format_table(const std::string& title, const std::vector<TableCell>& cells) {
    std::vector<std::string> rows, cols;
    auto note = [](std::vector<std::string>& v, const std::string& x) {
        if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
    };
    for (const auto& c : cells) {
        note(rows, c.row);
        note(cols, c.column);
    }
    auto lookup = [&](const std::string& r, const std::string& c) -> std::string {
        for (const auto& x : cells)
            if (x.row == r && x.column == c) return x.text;
        return "";
    };
    std::size_t w0 = 4;
    for (const auto& r : rows) w0 = std::max(w0, r.size());
    std::vector<std::size_t> w(cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        w[j] = cols[j].size();
        for (const auto& r : rows) w[j] = std::max(w[j], lookup(r, cols[j]).size());
    }
    std::string out = title + "\n";
    std::string head = fmt::format("{:<{}}", "", w0);
    for (std::size_t j = 0; j < cols.size(); ++j) head += fmt::format(" | {:<{}}", cols[j], w[j]);
    out += head + "\n" + std::string(head.size(), '-') + "\n";
    for (const auto& r : rows) {
        std::string line = fmt::format("{:<{}}", r, w0);
        for (std::size_t j = 0; j < cols.size(); ++j) line += fmt::format(" | {:<{}}", lookup(r, cols[j]), w[j]);
        out += line + "\n";
    }
    return out;
}

}  // namespace dirt
