#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "dirt/common/errors.hpp"
#include "dirt/common/random.hpp"
#include "dirt/tt/grid.hpp"
#include "dirt/tt/tensor_train.hpp"

namespace dirt {

/// Points of a cross block: every (left[a], i, right[b]) for a < n_left, i < n_mid,
/// b < n_right. Prefixes have `core` entries each, suffixes d - core - 1, stored flat.
struct IndexBlock {
    std::size_t core = 0;
    std::span<const std::size_t> left;
    std::size_t n_left = 0;
    std::size_t n_mid = 0;
    std::span<const std::size_t> right;
    std::size_t n_right = 0;

    [[nodiscard]] std::size_t count() const noexcept { return n_left * n_mid * n_right; }
    /// Writes the full multi-index of block point (a, i, b) into idx (length d).
    void multi_index(std::size_t a, std::size_t i, std::size_t b, std::span<std::size_t> idx) const;
};

/// A function on the multi-indices of a tensor-product grid. Implementations must be
/// pure and safe to call concurrently.
class GridFunction {
public:
    virtual ~GridFunction() = default;
    [[nodiscard]] virtual std::size_t dim() const = 0;
    [[nodiscard]] virtual double operator()(std::span<const std::size_t> idx) const = 0;
    /// Values at all block points in [a][i][b] order. The default evaluates pointwise;
    /// overrides may share work across common prefixes.
    virtual void evaluate_block(const IndexBlock& block, std::span<double> out) const;
};

/// Adapts a callable to GridFunction.
class LambdaGridFunction final : public GridFunction {
public:
    using Fn = std::function<double(std::span<const std::size_t>)>;
    LambdaGridFunction(std::size_t d, Fn fn) : d_(d), fn_(std::move(fn)) {}
    [[nodiscard]] std::size_t dim() const override { return d_; }
    [[nodiscard]] double operator()(std::span<const std::size_t> idx) const override { return fn_(idx); }

private:
    std::size_t d_;
    Fn fn_;
};

struct CrossConfig {
    std::size_t max_rank = 4;
    double tolerance = 1e-6;          ///< stop when the probe-set relative change is at or below this
    std::size_t max_iterations = 4;   ///< one iteration = forward then backward sweep
    /// Hard cap on function evaluations; 0 means unlimited.
    std::size_t eval_budget = 0;
    /// Optional initial right index sets: entry k-1 holds the suffixes (i_k..i_{d-1})
    /// for interface k = 1..d-1, flattened. Empty means draw them.
    std::vector<std::vector<std::size_t>> initial_right;
    /// Draws a full multi-index; suffixes of max_rank draws seed the right index sets.
    /// Empty means uniform random indices.
    std::function<void(Rng&, std::span<std::size_t>)> index_sampler;
    std::uint64_t seed = 0;
    std::size_t probe_count = 1000;
    std::size_t workers = 1;

    /// Throws ConfigError when a field violates its precondition.
    void validate(std::span<const std::size_t> dims) const;
};

struct CrossReport {
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    double final_change = 0.0;
    std::vector<std::size_t> ranks;
};

struct CrossResult {
    TTTensor tt;
    CrossReport report;
};

/// Raised when the evaluation budget would be exceeded; carries the partial report.
struct CrossBudgetError : BudgetError {
    CrossBudgetError(const std::string& what, CrossReport partial)
        : BudgetError(what), report(std::move(partial)) {}
    CrossReport report;
};

/// Fixed-rank alternating TT-cross with maxvol pivoting. Each forward step orthogonalizes
/// the fiber matrix f(I_k, i_k, J_{k+1}) before maxvol so rank-deficient fibers stay
/// well posed; the backward sweep mirrors it and leaves the first core holding raw
/// function values f(i_1, J_1). Non-finite values raise EvaluationError naming the index.
CrossResult tt_cross(const GridFunction& f, const GridSpec& grid, const CrossConfig& cfg);

}  // namespace dirt
