#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dirt/tt/grid.hpp"

namespace dirt {

/// Tensor train with cores of shape (r_{k-1}, n_k, r_k), r_0 = r_d = 1.
/// Each core is stored row-major: element (a, i, b) sits at (a * n_k + i) * r_k + b.
/// Immutable after construction.
class TTTensor {
public:
    TTTensor() = default;
    TTTensor(std::vector<std::size_t> dims, std::vector<std::size_t> ranks,
             std::vector<std::vector<double>> cores);

    /// Rank-one tensor f(i_1..i_d) = prod_k fibers[k][i_k].
    static TTTensor rank_one(const std::vector<std::vector<double>>& fibers);

    [[nodiscard]] std::size_t dim() const noexcept { return dims_.size(); }
    [[nodiscard]] std::span<const std::size_t> dims() const noexcept { return dims_; }
    [[nodiscard]] std::span<const std::size_t> ranks() const noexcept { return ranks_; }
    [[nodiscard]] std::size_t size(std::size_t k) const { return dims_.at(k); }
    [[nodiscard]] std::size_t rank(std::size_t k) const { return ranks_.at(k); }
    [[nodiscard]] std::span<const double> core(std::size_t k) const { return cores_.at(k); }
    [[nodiscard]] double at(std::size_t k, std::size_t a, std::size_t i, std::size_t b) const {
        return cores_[k][(a * dims_[k] + i) * ranks_[k + 1] + b];
    }

    bool operator==(const TTTensor&) const = default;

private:
    std::vector<std::size_t> dims_;
    std::vector<std::size_t> ranks_;
    std::vector<std::vector<double>> cores_;
};

/// Chained product of core slices at a multi-index. Throws BoundsError.
double eval_discrete(const TTTensor& tt, std::span<const std::size_t> idx);

/// Chained product of core slices linearly interpolated between bracketing grid nodes.
/// Throws DomainError outside the grid bounds.
double eval_continuous(const TTTensor& tt, const GridSpec& grid, std::span<const double> x);

inline constexpr std::size_t kDefaultDenseCap = 10'000'000;

/// All entries in row-major order (last index fastest). Throws ResourceError above `cap`.
std::vector<double> full_tensor(const TTTensor& tt, std::size_t cap = kDefaultDenseCap);

/// sum_k r_{k-1} n_k r_k.
std::size_t storage_size(const TTTensor& tt) noexcept;

/// Structured text: header, dims, ranks, then one line per core of row-major values.
void write_text(std::ostream& os, const TTTensor& tt);
TTTensor read_tt_text(std::istream& is);
std::string to_text(const TTTensor& tt);
TTTensor tt_from_text(const std::string& text);

}  // namespace dirt
