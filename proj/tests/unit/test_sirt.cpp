#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dirt/common/errors.hpp"
#include "dirt/common/math.hpp"
#include "dirt/transport/sirt.hpp"

namespace {

using dirt::GridSpec;
using dirt::Interval;
using dirt::SirtLayer;
using dirt::TTTensor;

TTTensor random_tt(std::mt19937_64& rng, std::vector<std::size_t> dims, std::vector<std::size_t> ranks) {
    std::normal_distribution<double> dist;
    std::vector<std::vector<double>> cores(dims.size());
    for (std::size_t k = 0; k < dims.size(); ++k) {
        cores[k].resize(ranks[k] * dims[k] * ranks[k + 1]);
        for (double& v : cores[k]) v = dist(rng);
    }
    return TTTensor(dims, ranks, cores);
}

GridSpec box_grid(std::vector<Interval> box, std::size_t n) { return GridSpec::uniform(box, n); }

GridSpec mixed_grid(std::vector<std::pair<Interval, std::size_t>> spec) {
    std::vector<std::vector<double>> nodes;
    for (auto [b, n] : spec) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = b.lo + b.width() * static_cast<double>(i) / static_cast<double>(n - 1);
        nodes.push_back(v);
    }
    return GridSpec(nodes);
}

// Simpson's rule per cell is exact for S^2 + eps, which is quadratic in each coordinate
// inside a cell. Integrates p over [lo_k, hi_k] along dimension `axis` with the other
// coordinates fixed by x.
double simpson_line(const SirtLayer& layer, std::vector<double> x, std::size_t axis, double lo, double hi) {
    const auto nodes = layer.grid().nodes(axis);
    std::vector<double> cuts{lo};
    for (double v : nodes)
        if (v > lo && v < hi) cuts.push_back(v);
    cuts.push_back(hi);
    double total = 0.0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double a = cuts[c], b = cuts[c + 1];
        double s = 0.0;
        for (auto [t, w] : {std::pair{0.0, 1.0}, std::pair{0.5, 4.0}, std::pair{1.0, 1.0}}) {
            x[axis] = a + t * (b - a);
            s += w * std::exp(layer.log_density(x));
        }
        total += s * (b - a) / 6.0;
    }
    return total;
}

// Exact integral of p over the whole box (any dimension) by tensor-product Simpson.
double simpson_total(const SirtLayer& layer, std::vector<double> x, std::size_t axis) {
    const auto b = layer.grid().bounds(axis);
    if (axis + 1 == layer.dim()) return simpson_line(layer, x, axis, b.lo, b.hi);
    const auto nodes = layer.grid().nodes(axis);
    double total = 0.0;
    for (std::size_t c = 0; c + 1 < nodes.size(); ++c) {
        const double a = nodes[c], e = nodes[c + 1];
        double s = 0.0;
        for (auto [t, w] : {std::pair{0.0, 1.0}, std::pair{0.5, 4.0}, std::pair{1.0, 1.0}}) {
            x[axis] = a + t * (e - a);
            s += w * simpson_total(layer, x, axis + 1);
        }
        total += s * (e - a) / 6.0;
    }
    return total;
}

TEST(Sirt, ConstantTensorIsUniformAndInverseIsAffine) {
    const auto tt = TTTensor::rank_one({{1, 1, 1, 1}, {1, 1, 1, 1, 1}});
    const SirtLayer layer(tt, mixed_grid({{{-1, 3}, 4}, {{0, 2}, 5}}));
    const GridSpec grid({{-1.0, 0.0, 1.0, 3.0}, {0.0, 0.5, 1.0, 1.5, 2.0}});
    const SirtLayer uneven(TTTensor::rank_one({{1, 1, 1, 1}, {1, 1, 1, 1, 1}}), grid);
    for (const SirtLayer* l : {&layer, &uneven}) {
        for (double u0 : {0.1, 0.5, 0.77})
            for (double u1 : {0.03, 0.6}) {
                const std::vector<double> u{u0, u1};
                const auto r = dirt::irt_invert(*l, u);
                EXPECT_NEAR(r.x[0], -1.0 + 4.0 * u0, 1e-12);
                EXPECT_NEAR(r.x[1], 2.0 * u1, 1e-12);
                EXPECT_NEAR(r.log_density, -std::log(8.0), 1e-12);
                EXPECT_NEAR(l->log_density(r.x), -std::log(8.0), 1e-12);
            }
    }
}

TEST(Sirt, SeparableTensorFactorsIntoMarginals) {
    // S = a(x0) b(x1): x0 and x1 are independent, so F(x1 | x0) must not depend on x0.
    const auto tt = TTTensor::rank_one({{1.0, 3.0, 0.5, 2.0, 1.0}, {0.2, 1.0, 4.0, 1.0, 0.3}});
    const SirtLayer layer(tt, box_grid({{0, 1}, {0, 1}}, 5));
    for (double x1 : {0.1, 0.37, 0.8}) {
        const std::vector<double> p0{0.05}, p1{0.61};
        EXPECT_NEAR(dirt::conditional_cdf(layer, 1, p0, x1), dirt::conditional_cdf(layer, 1, p1, x1), 1e-13);
    }
}

TEST(Sirt, NormalizationIsOne) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const SirtLayer l2(random_tt(rng, {9, 7}, {1, 3, 1}), mixed_grid({{{-2, 1}, 9}, {{0, 5}, 7}}));
        EXPECT_NEAR(simpson_total(l2, {0, 0}, 0), 1.0, 1e-8) << "trial " << trial;
    }
    const SirtLayer l3(random_tt(rng, {6, 5, 7}, {1, 2, 3, 1}), mixed_grid({{{0, 1}, 6}, {{-1, 1}, 5}, {{2, 5}, 7}}));
    EXPECT_NEAR(simpson_total(l3, {0, 0, 0}, 0), 1.0, 1e-8);
}

TEST(Sirt, ConditionalCdfMatchesQuadrature) {
    std::mt19937_64 rng(12);
    const auto tt = random_tt(rng, {8, 8}, {1, 3, 1});
    const SirtLayer layer(tt, box_grid({{0, 1}, {0, 1}}, 8));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int p = 0; p < 10; ++p) {
        const double x0 = unif(rng), x1 = unif(rng);
        // Marginal CDF of x0: double integral of p over [0, x0] x [0, 1].
        double marg = 0.0;
        {
            std::vector<double> cuts{0.0};
            for (double v : layer.grid().nodes(0))
                if (v > 0.0 && v < x0) cuts.push_back(v);
            cuts.push_back(x0);
            for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
                const double a = cuts[c], b = cuts[c + 1];
                double s = 0.0;
                for (auto [t, w] : {std::pair{0.0, 1.0}, std::pair{0.5, 4.0}, std::pair{1.0, 1.0}})
                    s += w * simpson_line(layer, {a + t * (b - a), 0.0}, 1, 0.0, 1.0);
                marg += s * (b - a) / 6.0;
            }
        }
        EXPECT_NEAR(dirt::conditional_cdf(layer, 0, {}, x0), marg, 1e-10);
        const std::vector<double> prefix{x0};
        const double cond = simpson_line(layer, {x0, 0.0}, 1, 0.0, x1) / simpson_line(layer, {x0, 0.0}, 1, 0.0, 1.0);
        EXPECT_NEAR(dirt::conditional_cdf(layer, 1, prefix, x1), cond, 1e-10);
    }
}

TEST(Sirt, RoundTripAndDensityAgreeWithClosedForm) {
    std::mt19937_64 rng(13);
    const auto tt = random_tt(rng, {9, 9, 9, 9}, {1, 3, 4, 2, 1});
    const SirtLayer layer(tt, box_grid({{-4, 4}, {-4, 4}, {0, 1}, {-1, 2}}, 9));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int p = 0; p < 200; ++p) {
        std::vector<double> u(4);
        for (double& v : u) v = unif(rng);
        const auto r = dirt::irt_invert(layer, u);
        const auto back = dirt::rosenblatt_forward(layer, r.x);
        for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(back[k], u[k], 1e-10);
        EXPECT_NEAR(r.log_density, layer.log_density(r.x), 1e-10);
    }
}

TEST(Sirt, ConditionalCdfIsMonotoneWithExactEndpoints) {
    std::mt19937_64 rng(14);
    const auto tt = random_tt(rng, {17, 17, 17}, {1, 4, 4, 1});
    const SirtLayer layer(tt, box_grid({{-4, 4}, {-4, 4}, {-4, 4}}, 17));
    std::uniform_real_distribution<double> unif(-4.0, 4.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t k = static_cast<std::size_t>(trial % 3);
        std::vector<double> prefix(k);
        for (double& v : prefix) v = unif(rng);
        EXPECT_EQ(dirt::conditional_cdf(layer, k, prefix, -4.0), 0.0);
        EXPECT_EQ(dirt::conditional_cdf(layer, k, prefix, 4.0), 1.0);
        double prev = 0.0;
        for (int s = 0; s <= 200; ++s) {
            const double f = dirt::conditional_cdf(layer, k, prefix, -4.0 + 8.0 * s / 200.0);
            ASSERT_GE(f, prev) << "trial " << trial << " step " << s;
            prev = f;
        }
    }
}

TEST(Sirt, FloorKeepsDensityPositiveWhereTensorVanishes) {
    // S is zero on the left half of x0; the floor keeps log p finite there.
    const auto tt = TTTensor::rank_one({{0, 0, 0, 1, 2}, {1, 1, 1, 1, 1}});
    const SirtLayer layer(tt, box_grid({{0, 1}, {0, 1}}, 5), 1e-6);
    const std::vector<double> x{0.1, 0.5};
    const double lp = layer.log_density(x);
    EXPECT_TRUE(std::isfinite(lp));
    // Mean of S^2 over the box: hat-basis mass terms of the nodes with values 1 and 2.
    const double mean_sq = (0.25 / 3.0) * (1.0 + 1.0 + 4.0) + (0.25 / 6.0) * 2.0 * 2.0;
    EXPECT_NEAR(lp, std::log(1e-6 * mean_sq) - std::log(mean_sq * (1 + 1e-6)), 1e-12);
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int p = 0; p < 100; ++p) {
        const std::vector<double> u{unif(rng), unif(rng)};
        EXPECT_TRUE(std::isfinite(dirt::irt_invert(layer, u).log_density));
    }
}

TEST(Sirt, GaussianTargetHasGaussianMarginals) {
    const double rho = 0.6;
    const auto grid = box_grid({{-6, 6}, {-6, 6}}, 65);
    dirt::CrossConfig cfg;
    cfg.max_rank = 8;
    const auto layer = dirt::build_sirt_layer(
        [&](std::span<const double> x) {
            return std::exp(-0.5 * (x[0] * x[0] - 2 * rho * x[0] * x[1] + x[1] * x[1]) / (1 - rho * rho));
        },
        grid, cfg);
    for (double x : {-2.0, -0.7, 0.0, 0.4, 1.9}) {
        EXPECT_NEAR(dirt::conditional_cdf(layer, 0, {}, x), dirt::normal_cdf(x), 2e-3);
        const std::vector<double> prefix{1.0};
        EXPECT_NEAR(dirt::conditional_cdf(layer, 1, prefix, x),
                    dirt::normal_cdf((x - rho) / std::sqrt(1 - rho * rho)), 2e-3);
    }
}

TEST(Sirt, InvalidInputsAreRejected) {
    const auto tt = TTTensor::rank_one({{1, 1}, {1, 1}});
    const SirtLayer layer(tt, box_grid({{0, 1}, {0, 1}}, 2));
    const std::vector<double> edge{0.0, 0.5}, outside{0.5, 1.5};
    EXPECT_THROW(dirt::irt_invert(layer, edge), dirt::DomainError);
    EXPECT_THROW(dirt::rosenblatt_forward(layer, outside), dirt::DomainError);
    EXPECT_THROW(SirtLayer(tt, box_grid({{0, 1}}, 2)), dirt::DomainError);
    EXPECT_THROW(SirtLayer(TTTensor::rank_one({{0, 0}, {1, 1}}), box_grid({{0, 1}, {0, 1}}, 2)),
                 dirt::NumericalError);
    dirt::CrossConfig cfg;
    EXPECT_THROW(dirt::build_sirt_layer([](std::span<const double> x) { return x[0] - 0.5; },
                                        box_grid({{0, 1}, {0, 1}}, 5), cfg),
                 dirt::DomainError);
}

}  // namespace
