#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace dirt {

struct Interval {
    double lo;
    double hi;
    [[nodiscard]] double width() const noexcept { return hi - lo; }
    [[nodiscard]] bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

/// Per-dimension strictly increasing node sequences; bounds are the first and last nodes.
class GridSpec {
public:
    GridSpec() = default;
    explicit GridSpec(std::vector<std::vector<double>> nodes);

    /// n uniformly spaced nodes per dimension, endpoints included.
    static GridSpec uniform(std::span<const Interval> bounds, std::size_t nodes_per_dim);

    [[nodiscard]] std::size_t dim() const noexcept { return nodes_.size(); }
    [[nodiscard]] std::size_t size(std::size_t k) const { return nodes_.at(k).size(); }
    [[nodiscard]] std::vector<std::size_t> sizes() const;
    [[nodiscard]] std::span<const double> nodes(std::size_t k) const { return nodes_.at(k); }
    [[nodiscard]] double node(std::size_t k, std::size_t i) const { return nodes_[k][i]; }
    [[nodiscard]] Interval bounds(std::size_t k) const {
        return {nodes_[k].front(), nodes_[k].back()};
    }

    /// Cell i and local coordinate t in [0,1] with x = (1-t) x_i + t x_{i+1}.
    /// Interior nodes map to t = 0 of the cell to their right; the last node to t = 1.
    /// Throws DomainError outside the bounds.
    [[nodiscard]] std::pair<std::size_t, double> locate(std::size_t k, double x) const;

    /// Index of the node nearest to x (x clamped to the bounds); lower index on ties.
    [[nodiscard]] std::size_t nearest(std::size_t k, double x) const;

    bool operator==(const GridSpec&) const = default;

private:
    std::vector<std::vector<double>> nodes_;
};

}  // namespace dirt
