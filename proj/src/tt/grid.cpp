#include "dirt/tt/grid.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "dirt/common/errors.hpp"

namespace dirt {

GridSpec::GridSpec(std::vector<std::vector<double>> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw DomainError("GridSpec: at least one dimension is required");
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        const auto& v = nodes_[k];
        if (v.size() < 2) throw DomainError(fmt::format("GridSpec: dimension {} has fewer than 2 nodes", k));
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!std::isfinite(v[i]))
                throw DomainError(fmt::format("GridSpec: dimension {} node {} is not finite", k, i));
            if (i > 0 && !(v[i] > v[i - 1]))
                throw DomainError(fmt::format("GridSpec: dimension {} nodes are not strictly increasing", k));
        }
    }
}

GridSpec GridSpec::uniform(std::span<const Interval> bounds, std::size_t nodes_per_dim) {
    if (nodes_per_dim < 2) throw DomainError("GridSpec::uniform: need at least 2 nodes per dimension");
    std::vector<std::vector<double>> nodes(bounds.size());
    for (std::size_t k = 0; k < bounds.size(); ++k) {
        const Interval b = bounds[k];
        if (!(b.hi > b.lo)) throw DomainError(fmt::format("GridSpec::uniform: empty interval in dimension {}", k));
        auto& v = nodes[k];
        v.resize(nodes_per_dim);
        const double last = static_cast<double>(nodes_per_dim - 1);
        for (std::size_t i = 0; i < nodes_per_dim; ++i)
            v[i] = b.lo + (b.hi - b.lo) * (static_cast<double>(i) / last);
        v.front() = b.lo;
        v.back() = b.hi;
    }
    return GridSpec(std::move(nodes));
}

std::vector<std::size_t> GridSpec::sizes() const {
    std::vector<std::size_t> s(nodes_.size());
    for (std::size_t k = 0; k < nodes_.size(); ++k) s[k] = nodes_[k].size();
    return s;
}

std::pair<std::size_t, double> GridSpec::locate(std::size_t k, double x) const {
    const auto& v = nodes_.at(k);
    if (!(x >= v.front() && x <= v.back()))
        throw DomainError(fmt::format("coordinate {} = {} outside [{}, {}]", k, x, v.front(), v.back()));
    const std::size_t n = v.size();
    auto it = std::upper_bound(v.begin(), v.end(), x);
    std::size_t i = it == v.begin() ? 0 : static_cast<std::size_t>(it - v.begin()) - 1;
    if (i >= n - 1) return {n - 2, 1.0};
    const double t = (x - v[i]) / (v[i + 1] - v[i]);
    return {i, std::clamp(t, 0.0, 1.0)};
}

std::size_t GridSpec::nearest(std::size_t k, double x) const {
    const auto& v = nodes_.at(k);
    if (x <= v.front()) return 0;
    if (x >= v.back()) return v.size() - 1;
    auto [i, t] = locate(k, x);
    return t <= 0.5 ? i : i + 1;
}

}  // namespace dirt
