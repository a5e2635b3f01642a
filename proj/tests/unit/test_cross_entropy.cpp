#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "dirt/baselines/cross_entropy.hpp"
#include "dirt/common/errors.hpp"
#include "dirt/common/math.hpp"
#include "dirt/models/linear.hpp"

namespace {

using dirt::CeConfig;

TEST(CrossEntropy, CertainFailureAfterOneLevel) {
    const auto r = dirt::cross_entropy([](std::span<const double>) { return -1.0; }, 2, CeConfig{}, 1);
    EXPECT_EQ(r.estimate, 1.0);
    EXPECT_EQ(r.levels.size(), 1u);
}

TEST(CrossEntropy, OneDimensionalTailWithinThreeStandardErrors) {
    const dirt::ScalarFn g = [](std::span<const double> u) { return 2.0 - u[0]; };
    const auto r = dirt::cross_entropy(g, 1, CeConfig{}, 3);
    EXPECT_NEAR(r.estimate, dirt::normal_cdf(-2.0), 3 * r.std_error);
}

TEST(CrossEntropy, LinearTwoDimensionalWithinFactorTwo) {
    const auto p = dirt::linear_problem(2, 3.5);
    const double truth = dirt::normal_cdf(-3.5);
    // Single runs are noisy (CoV near 0.3); the mean over runs is the checked quantity.
    std::vector<double> est;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto r = dirt::cross_entropy(p, CeConfig{}, seed);
        est.push_back(r.estimate);
        EXPECT_GT(r.estimate, 0.0);
        for (std::size_t i = 1; i < r.levels.size(); ++i) EXPECT_LE(r.levels[i], r.levels[i - 1]);
        EXPECT_EQ(r.levels.back(), 0.0);
        EXPECT_EQ(r.lsf_evals, 3000 * r.levels.size());
    }
    EXPECT_GT(dirt::mean(est), truth / 2);
    EXPECT_LT(dirt::mean(est), truth * 2);
}

TEST(CrossEntropy, ElitesMustDetermineTheCovariance) {
    CeConfig c;
    c.samples_per_level = 100;
    EXPECT_THROW(c.validate(10), dirt::ConfigError);
    EXPECT_NO_THROW(c.validate(9));
    c.elite_fraction = 1.5;
    EXPECT_THROW(c.validate(1), dirt::ConfigError);
}

}  // namespace
