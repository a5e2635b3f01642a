#include "dirt/transport/sirt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <fmt/core.h>

#include "dirt/common/errors.hpp"
#include "dirt/simd/kernels.hpp"

namespace dirt {
namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Slice i of a (r0, n, r1) core as an r0 x r1 matrix.
Eigen::MatrixXd slice(const TTTensor& tt, std::size_t k, std::size_t i) {
    const std::size_t r0 = tt.rank(k), n = tt.size(k), r1 = tt.rank(k + 1);
    Eigen::MatrixXd s(static_cast<Eigen::Index>(r0), static_cast<Eigen::Index>(r1));
    for (std::size_t a = 0; a < r0; ++a)
        for (std::size_t b = 0; b < r1; ++b)
            s(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = tt.core(k)[(a * n + i) * r1 + b];
    return s;
}

double log_add_exp(double a, double b) {
    if (a < b) std::swap(a, b);
    if (a == -std::numeric_limits<double>::infinity()) return a;
    return a + std::log1p(std::exp(b - a));
}

}  // namespace

/// Conditional of the next coordinate given the cursor's prefix, in the cursor's units.
struct SirtLayer::Conditional {
    std::size_t width = 0;
    std::vector<double> nodes;  // v_i = prefix C_k(i) L_{k+1}, n x width
    std::vector<double> cum;    // cumulative mass at each node, cum[0] = 0
    std::vector<double> mass;   // per-cell mass without the floor
    double floor = 0.0;
    double total = 0.0;

    // int_0^t |(1-s) a + s b|^2 ds / len + floor * t, in Bernstein form.
    [[nodiscard]] double cell_integral(std::size_t i, double t) const {
        const double* a = nodes.data() + i * width;
        const double* b = a + width;
        double aa = 0.0, ab = 0.0, bb = 0.0;
        for (std::size_t j = 0; j < width; ++j) {
            aa += a[j] * a[j];
            ab += a[j] * b[j];
            bb += b[j] * b[j];
        }
        const double u = 1.0 - t;
        return aa * (1.0 - u * u * u) / 3.0 + ab * (t * t - 2.0 * t * t * t / 3.0) + bb * t * t * t / 3.0 +
               floor * t;
    }

    [[nodiscard]] double density_numerator(std::size_t i, double t) const {
        const double* a = nodes.data() + i * width;
        const double* b = a + width;
        double s = 0.0;
        for (std::size_t j = 0; j < width; ++j) {
            const double v = (1.0 - t) * a[j] + t * b[j];
            s += v * v;
        }
        return s + floor;
    }

    // CDF at local position t of cell i; stays inside [cum_i, cum_{i+1}].
    [[nodiscard]] double cdf_at(std::size_t i, double t) const {
        const double full = cell_integral(i, 1.0);
        const double frac = full > 0.0 ? std::clamp(cell_integral(i, t) / full, 0.0, 1.0) : t;
        return std::min(cum[i] + frac * (cum[i + 1] - cum[i]), cum[i + 1]);
    }
};

SirtLayer::SirtLayer(TTTensor sqrt_tt, GridSpec grid, double floor_fraction)
    : tt_(std::move(sqrt_tt)), grid_(std::move(grid)), floor_fraction_(floor_fraction) {
    const std::size_t d = tt_.dim();
    if (grid_.dim() != d) throw DomainError("SirtLayer: grid and tensor dimensions differ");
    for (std::size_t k = 0; k < d; ++k)
        if (grid_.size(k) != tt_.size(k)) throw DomainError("SirtLayer: grid node counts differ from tensor dims");
    if (!(floor_fraction_ > 0.0)) throw ConfigError("SirtLayer: floor fraction must be positive");
    for (std::size_t k = 0; k < d; ++k)
        for (double v : tt_.core(k))
            if (!std::isfinite(v)) throw NumericalError(fmt::format("SirtLayer: core {} has non-finite entries", k));

    cell_len_.resize(d);
    log_volume_ = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        const Interval b = grid_.bounds(k);
        log_volume_ += std::log(b.width());
        const auto nodes = grid_.nodes(k);
        cell_len_[k].resize(nodes.size() - 1);
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i) cell_len_[k][i] = (nodes[i + 1] - nodes[i]) / b.width();
    }

    weighted_.resize(d);
    log_gram_scale_.assign(d + 1, 0.0);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Ones(1, 1);  // stored G_{k+1}
    for (std::size_t k = d; k-- > 0;) {
        const std::size_t r0 = tt_.rank(k), n = tt_.size(k), r1 = tt_.rank(k + 1);

        // G_{k+1} = L L^T from the symmetric eigendecomposition; negative round-off clamped.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
        const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        const Eigen::MatrixXd factor = eig.eigenvectors() * lam.asDiagonal();
        weighted_[k].resize(r0 * n * r1);
        for (std::size_t i = 0; i < n; ++i) {
            const Eigen::MatrixXd w = slice(tt_, k, i) * factor;
            for (std::size_t a = 0; a < r0; ++a)
                for (std::size_t b = 0; b < r1; ++b)
                    weighted_[k][(a * n + i) * r1 + b] = w(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        }

        // Exact Galerkin mass of the hat basis: diag (l_{i-1} + l_i)/3, off-diagonal l_i/6.
        const auto& len = cell_len_[k];
        Eigen::MatrixXd next = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(r0), static_cast<Eigen::Index>(r0));
        Eigen::MatrixXd ci = slice(tt_, k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const double diag = ((i > 0 ? len[i - 1] : 0.0) + (i + 1 < n ? len[i] : 0.0)) / 3.0;
            const Eigen::MatrixXd cg = ci * gram;
            next.noalias() += diag * cg * ci.transpose();
            if (i + 1 < n) {
                const Eigen::MatrixXd cn = slice(tt_, k, i + 1);
                const Eigen::MatrixXd off = cg * cn.transpose();
                next.noalias() += (len[i] / 6.0) * (off + off.transpose());
                ci = cn;
            }
        }
        next = 0.5 * (next + next.transpose());
        const double scale = next.cwiseAbs().maxCoeff();
        if (!(scale > 0.0) || !std::isfinite(scale))
            throw NumericalError(fmt::format("SirtLayer: squared tensor has no mass below dimension {}", k));
        gram = next / scale;
        log_gram_scale_[k] = log_gram_scale_[k + 1] + std::log(scale);
    }
    const double g0 = gram(0, 0);
    if (!(g0 > 0.0)) throw NumericalError("SirtLayer: squared tensor has zero mass");
    log_mean_mass_ = std::log(g0) + log_gram_scale_[0];
    log_floor_ = std::log(floor_fraction_) + log_mean_mass_;
}

void SirtLayer::conditional(const Cursor& c, Conditional& cond) const {
    const std::size_t k = c.k;
    if (k >= dim()) throw DomainError("SirtLayer: cursor already past the last coordinate");
    const std::size_t r0 = tt_.rank(k), n = tt_.size(k), r1 = tt_.rank(k + 1);
    const auto& kern = simd::active_kernels();

    cond.width = r1;
    cond.nodes.resize(n * r1);
    kern.vecmat(c.prefix.data(), weighted_[k].data(), r0, n * r1, n * r1, cond.nodes.data());
    auto& mass = cond.mass;
    mass.resize(n - 1);
    kern.cell_masses(cond.nodes.data(), n, r1, cell_len_[k].data(), mass.data());

    const double log_floor = log_floor_ - 2.0 * c.log_scale - log_gram_scale_[k + 1];
    cond.floor = std::exp(std::min(log_floor, 700.0));
    cond.cum.resize(n);
    cond.cum[0] = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) cond.cum[i + 1] = cond.cum[i] + mass[i] + cond.floor * cell_len_[k][i];
    cond.total = cond.cum[n - 1];
    if (!(cond.total > 0.0) || !std::isfinite(cond.total))
        throw NumericalError(fmt::format("SirtLayer: conditional mass of coordinate {} is {}", k, cond.total));
}

void SirtLayer::advance(Cursor& c, std::size_t cell, double t) const {
    const std::size_t k = c.k;
    const std::size_t r0 = tt_.rank(k), n = tt_.size(k), r1 = tt_.rank(k + 1);
    const auto& kern = simd::active_kernels();
    thread_local std::vector<double> lo, hi;
    lo.resize(r1);
    hi.resize(r1);
    const double* core = tt_.core(k).data();
    kern.vecmat(c.prefix.data(), core + cell * r1, r0, r1, n * r1, lo.data());
    kern.vecmat(c.prefix.data(), core + (cell + 1) * r1, r0, r1, n * r1, hi.data());
    double scale = 0.0;
    for (std::size_t b = 0; b < r1; ++b) {
        lo[b] = (1.0 - t) * lo[b] + t * hi[b];
        scale = std::max(scale, std::abs(lo[b]));
    }
    if (scale > 0.0 && std::isfinite(scale)) {
        for (double& v : lo) v /= scale;
        c.log_scale += std::log(scale);
    }
    c.prefix.assign(lo.begin(), lo.end());
    ++c.k;
}

double SirtLayer::cdf(const Cursor& c, double x) const {
    thread_local Conditional cond;
    conditional(c, cond);
    const auto [i, t] = grid_.locate(c.k, x);
    return std::clamp(cond.cdf_at(i, t) / cond.total, 0.0, 1.0);
}

double SirtLayer::forward_step(Cursor& c, double x, double& log_density) const {
    thread_local Conditional cond;
    conditional(c, cond);
    const auto [i, t] = grid_.locate(c.k, x);
    const double z = std::clamp(cond.cdf_at(i, t) / cond.total, 0.0, 1.0);
    log_density += std::log(cond.density_numerator(i, t)) - std::log(cond.total) -
                   std::log(grid_.bounds(c.k).width());
    advance(c, i, t);
    return z;
}

double SirtLayer::invert_step(Cursor& c, double z, double& log_density) const {
    if (!(z >= 0.0 && z <= 1.0)) throw DomainError(fmt::format("SirtLayer: CDF value {} outside [0, 1]", z));
    const std::size_t k = c.k;
    thread_local Conditional cond;
    conditional(c, cond);
    const std::size_t n = grid_.size(k);
    const double target = z * cond.total;

    // Bracketing cell: last node whose cumulative mass does not exceed the target.
    auto it = std::upper_bound(cond.cum.begin(), cond.cum.end(), target);
    std::size_t i = it == cond.cum.begin() ? 0 : static_cast<std::size_t>(it - cond.cum.begin()) - 1;
    i = std::min(i, n - 2);

    double t;
    const double span = cond.cum[i + 1] - cond.cum[i];
    const double full = cond.cell_integral(i, 1.0);
    if (!(span > 0.0) || !(full > 0.0)) {
        t = 0.5;
    } else {
        const double goal = std::clamp((target - cond.cum[i]) / span, 0.0, 1.0) * full;
        double lo = 0.0, hi = 1.0;
        t = goal / full;
        const double tol = 1e-14 * full;
        for (int iter = 0; iter < 200; ++iter) {
            const double g = cond.cell_integral(i, t) - goal;
            if (std::abs(g) <= tol) break;
            if (g > 0.0)
                hi = t;
            else
                lo = t;
            if (hi - lo <= 1e-16) break;
            const double slope = cond.density_numerator(i, t);
            double next = slope > 0.0 ? t - g / slope : 0.5 * (lo + hi);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            t = next;
        }
    }
    const double x0 = grid_.node(k, i), x1 = grid_.node(k, i + 1);
    const double x = std::clamp(x0 + t * (x1 - x0), grid_.bounds(k).lo, grid_.bounds(k).hi);
    log_density += std::log(cond.density_numerator(i, t)) - std::log(cond.total) - std::log(grid_.bounds(k).width());
    advance(c, i, t);
    return x;
}

double SirtLayer::log_density(std::span<const double> x) const {
    const double s = eval_continuous(tt_, grid_, x);
    const double log_sq = s == 0.0 ? -std::numeric_limits<double>::infinity() : 2.0 * std::log(std::abs(s));
    return log_add_exp(log_sq, log_floor_) - log_add_exp(log_mean_mass_, log_floor_) - log_volume_;
}

SirtLayer build_sirt_layer(const std::function<double(std::span<const double>)>& target_ratio,
                           const GridSpec& grid, const CrossConfig& cfg, double floor_fraction) {
    const std::size_t d = grid.dim();
    LambdaGridFunction f(d, [&](std::span<const std::size_t> idx) {
        std::vector<double> x(d);
        for (std::size_t k = 0; k < d; ++k) x[k] = grid.node(k, idx[k]);
        const double v = target_ratio(x);
        if (!(v > 0.0) || !std::isfinite(v))
            throw DomainError(fmt::format("build_sirt_layer: target ratio is {} at a grid node", v));
        return std::sqrt(v);
    });
    auto res = tt_cross(f, grid, cfg);
    return SirtLayer(std::move(res.tt), grid, floor_fraction);
}

double conditional_cdf(const SirtLayer& layer, std::size_t k, std::span<const double> prefix, double x) {
    if (k >= layer.dim() || prefix.size() != k) throw DomainError("conditional_cdf: prefix length must equal k");
    auto c = layer.begin();
    double ignored = 0.0;
    for (std::size_t j = 0; j < k; ++j) (void)layer.forward_step(c, prefix[j], ignored);
    return layer.cdf(c, x);
}

InverseResult irt_invert(const SirtLayer& layer, std::span<const double> u) {
    if (u.size() != layer.dim()) throw DomainError("irt_invert: dimension mismatch");
    InverseResult out;
    out.x.resize(u.size());
    auto c = layer.begin();
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (!(u[k] > 0.0 && u[k] < 1.0))
            throw DomainError(fmt::format("irt_invert: u[{}] = {} not in the open unit interval", k, u[k]));
        out.x[k] = layer.invert_step(c, u[k], out.log_density);
    }
    return out;
}

std::vector<double> rosenblatt_forward(const SirtLayer& layer, std::span<const double> x) {
    if (x.size() != layer.dim()) throw DomainError("rosenblatt_forward: dimension mismatch");
    std::vector<double> u(x.size());
    auto c = layer.begin();
    double ignored = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) u[k] = layer.forward_step(c, x[k], ignored);
    return u;
}

}  // namespace dirt
