#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "dirt/tt/cross.hpp"
#include "dirt/tt/grid.hpp"
#include "dirt/tt/tensor_train.hpp"

namespace dirt {

inline constexpr double kDefaultFloorFraction = 1e-30;

/// Density p(x) = (S(x)^2 + eps) / Z on the grid box, where S is a tensor train with
/// piecewise-linear cores and eps = floor_fraction * mean(S^2). Conditionals come from
/// right-to-left Gram matrices G_k = int C_k(y) G_{k+1} C_k(y)^T dy / |box_k|, which keep
/// every partial marginal a sum of squares; all cell integrals are exact.
class SirtLayer {
public:
    SirtLayer() = default;
    SirtLayer(TTTensor sqrt_tt, GridSpec grid, double floor_fraction = kDefaultFloorFraction);

    [[nodiscard]] std::size_t dim() const noexcept { return tt_.dim(); }
    [[nodiscard]] const TTTensor& tt() const noexcept { return tt_; }
    [[nodiscard]] const GridSpec& grid() const noexcept { return grid_; }
    [[nodiscard]] double floor_fraction() const noexcept { return floor_fraction_; }
    /// log of int S^2 dx over the box (the squared tensor's mass).
    [[nodiscard]] double log_normalization() const noexcept { return log_mean_mass_ + log_volume_; }

    /// State of a sequential (coordinate-by-coordinate) evaluation. The prefix product
    /// C_1(x_1)...C_k(x_k) is kept rescaled; its true value is exp(log_scale) * prefix.
    struct Cursor {
        std::size_t k = 0;
        boost::container::small_vector<double, 8> prefix{1.0};
        double log_scale = 0.0;
    };

    [[nodiscard]] Cursor begin() const { return Cursor{}; }
    /// Conditional CDF of the next coordinate at x (cursor unchanged).
    [[nodiscard]] double cdf(const Cursor& c, double x) const;
    /// Sets the next coordinate to x; returns its conditional CDF value and adds the log
    /// conditional density at x to log_density.
    double forward_step(Cursor& c, double x, double& log_density) const;
    /// Sets the next coordinate to the conditional quantile of z in [0, 1]; returns it and
    /// adds the log conditional density there to log_density.
    double invert_step(Cursor& c, double z, double& log_density) const;

    /// log p(x) from the closed form (S(x)^2 + eps) / Z. Throws DomainError outside the box.
    [[nodiscard]] double log_density(std::span<const double> x) const;

private:
    struct Conditional;
    void conditional(const Cursor& c, Conditional& out) const;
    void advance(Cursor& c, std::size_t cell, double t) const;

    TTTensor tt_;
    GridSpec grid_;
    double floor_fraction_ = kDefaultFloorFraction;
    std::vector<std::vector<double>> weighted_;    // C_k(a, i, :) L_{k+1}, shape (r_k, n_k, r_{k+1})
    std::vector<std::vector<double>> cell_len_;    // cell lengths divided by the box width
    std::vector<double> log_gram_scale_;           // G_k = exp(log_gram_scale_[k]) * stored Gram
    double log_mean_mass_ = 0.0;                   // log mean of S^2 over the box
    double log_floor_ = 0.0;                       // log eps
    double log_volume_ = 0.0;
};

struct InverseResult {
    std::vector<double> x;
    double log_density = 0.0;
};

/// Cross-approximates sqrt(target_ratio) on the grid nodes and returns the layer.
/// Throws DomainError when the target is not strictly positive and finite at a node.
SirtLayer build_sirt_layer(const std::function<double(std::span<const double>)>& target_ratio,
                           const GridSpec& grid, const CrossConfig& cfg,
                           double floor_fraction = kDefaultFloorFraction);

/// F(x_k | x_{<k}); prefix holds x_0..x_{k-1}. Throws DomainError outside the box.
double conditional_cdf(const SirtLayer& layer, std::size_t k, std::span<const double> prefix, double x);

/// Sequential inversion of the conditional CDFs; u must lie in the open unit cube.
InverseResult irt_invert(const SirtLayer& layer, std::span<const double> u);

/// u_k = F(x_k | x_{<k}) for all k.
std::vector<double> rosenblatt_forward(const SirtLayer& layer, std::span<const double> x);

}  // namespace dirt
