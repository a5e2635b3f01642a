#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "dirt/cli/runner.hpp"
#include "dirt/estimators/report.hpp"

namespace dirt {

/// Bumped whenever a CSV column is added, removed or reinterpreted.
inline constexpr int kCsvSchemaVersion = 1;

/// schema_version,suite,problem,method,d,alpha_or_update,estimate,cov,lsf_evals,seed,seconds
std::string csv_header();

/// One row per RunSummary: mean estimate, CoV over runs, mean lsf_evals per run and the
/// master seed. Without timing the seconds column is 0 so reruns are byte-identical.
std::string csv_row(const std::string& suite, const std::string& label, const RunSummary& s, bool timing);

/// Per-run detail (estimates, standard errors, evaluations, seeds, warnings).
nlohmann::json summary_json(const RunSummary& s, bool timing);

/// Evaluations, ranks and layers of each map in the bundle.
nlohmann::json build_report_json(const MapBundle& maps);

/// One formatted cell: "mean  cov  (evals)".
struct TableCell {
    std::string row;
    std::string column;
    std::string text;
};

/// Rows and columns appear in first-seen order of `cells`.
std::string format_table(const std::string& title, const std::vector<TableCell>& cells);

/// "2.326e-04" style for table cells.
std::string format_cell(const RunSummary& s);

}  // namespace dirt
