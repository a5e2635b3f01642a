#pragma once

#include "dirt/common/random.hpp"
#include "dirt/tt/grid.hpp"

namespace dirt {

/// Product of identical zero-mean Gaussians truncated to [-half_width, half_width].
class ReferenceDensity {
public:
    explicit ReferenceDensity(double sigma = 3.0, double half_width = 4.0);

    [[nodiscard]] double sigma() const noexcept { return sigma_; }
    [[nodiscard]] double half_width() const noexcept { return half_width_; }
    [[nodiscard]] Interval box() const noexcept { return {-half_width_, half_width_}; }

    /// One-dimensional marginal; -inf outside the box.
    [[nodiscard]] double log_pdf(double u) const noexcept;
    [[nodiscard]] double cdf(double u) const noexcept;
    /// Inverse CDF on [0, 1]; endpoints map to the box edges.
    [[nodiscard]] double quantile(double z) const;
    [[nodiscard]] double sample(Rng& rng) const;

    bool operator==(const ReferenceDensity&) const = default;

private:
    double sigma_;
    double half_width_;
    double lower_mass_ = 0.0;  // Phi(-h / sigma)
    double mass_ = 1.0;        // Phi(h / sigma) - Phi(-h / sigma)
    double log_norm_ = 0.0;
};

}  // namespace dirt
