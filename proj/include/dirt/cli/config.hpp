#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace dirt {

/// Problem block. Only the fields of the named problem are read or written.
struct ProblemConfig {
    std::string name = "linear";  ///< linear | constant | corroded_beam | cantilever

    // linear (dim also used by constant)
    std::size_t dim = 2;
    double alpha = 3.5;
    double half_width = 8.0;

    // constant: g(u) = value on a standard normal space (smoke tests)
    double value = -1.0;

    // corroded_beam
    int update = 1;  ///< 0 = prior only, 1 = first data set, 2 = both
    std::size_t inner_samples = 10000;

    // cantilever
    std::size_t terms = 10;
    double correlation_length = 2.5;
    std::size_t observations = 10;
    double noise_std = 1e-3;
    double noise_correlation_length = 1.0;
    std::size_t mesh_nodes = 201;
    std::uint64_t data_seed = 2024;

    bool operator==(const ProblemConfig&) const = default;
};

/// Method block. Only the fields of the named method are read or written.
struct MethodConfig {
    std::string name = "dirt";  ///< dirt | sus | bus_sus | ce | mc

    // dirt
    std::size_t rank = 2;
    std::size_t grid_nodes = 33;
    std::size_t cross_iterations = 4;
    std::size_t layers = 12;  ///< schedule beta_0 ... 1 with `layers` entries (geometric)
    double beta0 = 1e-4;
    std::vector<double> betas;  ///< explicit schedule; overrides layers / beta0 when set
    double gamma = 10.0;
    std::size_t samples = 1000;  ///< IS samples per run (also crude MC sample size)
    bool rebuild_per_run = true;
    std::vector<double> gamma_grid;  ///< tune-gamma only
    double gamma_max = 0.0;
    std::size_t gamma_repetitions = 10;

    // sus, bus_sus, ce
    std::size_t samples_per_level = 3000;
    double p0 = 0.1;
    std::size_t max_levels = 30;
    double elite_fraction = 0.1;

    bool operator==(const MethodConfig&) const = default;
};

struct RunConfig {
    ProblemConfig problem;
    MethodConfig method;
    std::size_t repetitions = 10;
    std::uint64_t seed = 1;
    std::string output = "out";
    std::size_t jobs = 1;

    bool operator==(const RunConfig&) const = default;
};

/// Parses the YAML grammar documented in the README. Unknown keys, keys that do not belong
/// to the named problem or method, and invalid values raise ConfigError with the origin and
/// line number.
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");
RunConfig load_config(const std::string& path);

/// Re-emits a config in canonical form. For c returned by parse_config,
/// parse_config(emit_config(c)) == c, so load-then-emit is idempotent.
std::string emit_config(const RunConfig& cfg);

/// Checks every hyperparameter against the preconditions of the module that consumes it.
void validate_config(const RunConfig& cfg);

}  // namespace dirt
