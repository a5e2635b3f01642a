#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dirt/cli/config.hpp"
#include "dirt/estimators/report.hpp"

namespace dirt {

/// One (parameter row, method column) entry of a benchmark table.
struct SuiteCell {
    std::string row;     ///< e.g. "d=25", "alpha=4.5", "update 1", "M=10"
    std::string column;  ///< method name
    std::string label;   ///< alpha_or_update CSV column
    RunConfig config;    ///< carries the cell's own seed
};

struct CellResult {
    SuiteCell cell;
    std::optional<RunSummary> summary;
    std::string error;  ///< set when the cell failed; the suite continues
    int exit_code = 0;
};

const std::vector<std::string>& suite_names();

/// Cells in declaration order. Cell i uses seed derive_seed(master, i).
std::vector<SuiteCell> suite_cells(const std::string& suite, std::uint64_t master_seed, std::size_t repetitions);

/// Runs the cells on up to `jobs` workers; results keep declaration order.
std::vector<CellResult> run_suite(const std::vector<SuiteCell>& cells, std::size_t jobs);

/// Hyperparameters used for DIRT on the linear problem of dimension d (rank 2 below d = 50,
/// rank 4 with a shared map above).
MethodConfig linear_dirt_method(std::size_t d);

}  // namespace dirt
