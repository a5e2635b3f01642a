#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <memory>
#include <vector>

#include "dirt/baselines/subset_simulation.hpp"
#include "dirt/common/errors.hpp"
#include "dirt/common/math.hpp"
#include "dirt/models/linear.hpp"

namespace {

using dirt::SusConfig;

TEST(SubsetSimulation, ConfigValidation) {
    SusConfig c;
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(c.seeds_per_level(), 300u);
    c.p0 = 0.1234;
    EXPECT_THROW(c.validate(), dirt::ConfigError);
    c.p0 = 1.0;
    EXPECT_THROW(c.validate(), dirt::ConfigError);
    c = SusConfig{};
    c.samples_per_level = 10;
    EXPECT_THROW(c.validate(), dirt::ConfigError);  // N p0 = 1
}

TEST(SubsetSimulation, CertainFailureStopsAfterOneLevel) {
    const auto r = dirt::subset_simulation([](std::span<const double>) { return -1.0; }, 3, SusConfig{}, 1);
    EXPECT_EQ(r.estimate, 1.0);
    EXPECT_TRUE(r.levels.empty());
    EXPECT_EQ(r.lsf_evals, 3000u);
}

TEST(SubsetSimulation, OneDimensionalTail) {
    const dirt::ScalarFn g = [](std::span<const double> u) { return 3.5 - u[0]; };
    const double truth = dirt::normal_cdf(-3.5);
    EXPECT_NEAR(truth, 2.326e-4, 5e-8);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto r = dirt::subset_simulation(g, 1, SusConfig{}, seed);
        EXPECT_NEAR(r.estimate, truth, 0.3 * truth);
    }
}

TEST(SubsetSimulation, EstimateIsAProductOfLevelProbabilities) {
    const dirt::ScalarFn g = [](std::span<const double> u) { return dirt::linear_lsf(u, 4.0); };
    SusConfig c;
    c.samples_per_level = 1000;
    const auto r = dirt::subset_simulation(g, 10, c, 4);
    ASSERT_GE(r.levels.size(), 2u);
    for (std::size_t i = 1; i < r.levels.size(); ++i) EXPECT_LT(r.levels[i], r.levels[i - 1]);
    // estimate / p0^(m-1) is a count of final-level failures over N.
    const double count = r.estimate / std::pow(0.1, static_cast<double>(r.levels.size())) * 1000.0;
    EXPECT_NEAR(count, std::round(count), 1e-6);
    EXPECT_GE(std::round(count), 100.0);
}

TEST(SubsetSimulation, HundredDimensionalLinearMeanOverTenRuns) {
    auto counter = std::make_shared<std::atomic<std::size_t>>(0);
    const dirt::ScalarFn g = [counter](std::span<const double> u) {
        counter->fetch_add(1);
        return dirt::linear_lsf(u, 3.5);
    };
    std::vector<double> est;
    std::size_t evals = 0;
    for (std::uint64_t run = 0; run < 10; ++run) {
        const auto r = dirt::subset_simulation(g, 100, SusConfig{}, dirt::derive_seed(7, run));
        est.push_back(r.estimate);
        evals += r.lsf_evals;
    }
    EXPECT_EQ(evals, counter->load());
    EXPECT_GT(dirt::mean(est), 1.5e-4);
    EXPECT_LT(dirt::mean(est), 3.5e-4);
}

TEST(SubsetSimulation, TruncatedRunIsFlagged) {
    SusConfig c;
    c.max_levels = 2;
    const auto r = dirt::subset_simulation([](std::span<const double> u) { return 6.0 - u[0]; }, 1, c, 2);
    EXPECT_TRUE(r.truncated);
    EXPECT_FALSE(r.warnings.empty());
}

TEST(BusSus, FlatLikelihoodReducesToPriorSubsetSimulation) {
    auto p = dirt::linear_problem(2, 2.5);
    p.log_likelihood = [](std::span<const double>) { return -1.3; };
    const auto post = dirt::bus_sus_posterior(p, SusConfig{}, 11);
    const auto prior = dirt::subset_simulation(p, SusConfig{}, 12);
    EXPECT_NEAR(post.estimate, prior.estimate, 3 * std::hypot(post.std_error, prior.std_error));
    EXPECT_NEAR(post.estimate, dirt::normal_cdf(-2.5), 3 * post.std_error);
}

TEST(BusSus, GaussianUpdateOfOneCoordinate) {
    // Posterior of x_1 is N(0.8, 0.2); g = 2 - x_1 gives Phi(-1.2 / sqrt(0.2)) = 3.6e-3.
    auto p = dirt::standard_normal_problem("shifted", 2, [](std::span<const double> x) { return 2.0 - x[0]; });
    p.log_likelihood = [](std::span<const double> x) { return -0.5 * (1.0 - x[0]) * (1.0 - x[0]) / 0.25; };
    const double truth = dirt::normal_cdf(-1.2 / std::sqrt(0.2));
    std::vector<double> est;
    // Single-run CoV is about 0.23 here; 25% on a 10-run mean is over 3 standard errors.
    for (std::uint64_t s = 0; s < 10; ++s) est.push_back(dirt::bus_sus_posterior(p, SusConfig{}, s).estimate);
    EXPECT_NEAR(dirt::mean(est), truth, 0.25 * truth);
    // Same with the exact bound supplied instead of the adaptive constant.
    p.likelihood_bound = 1.0;
    est.clear();
    for (std::uint64_t s = 20; s < 30; ++s) est.push_back(dirt::bus_sus_posterior(p, SusConfig{}, s).estimate);
    EXPECT_NEAR(dirt::mean(est), truth, 0.25 * truth);
}

TEST(BusSus, LikelihoodAboveTheSuppliedBoundIsReported) {
    auto p = dirt::linear_problem(2, 2.0);
    p.log_likelihood = [](std::span<const double> x) { return x[0]; };
    p.likelihood_bound = 1.0;
    EXPECT_THROW((void)dirt::bus_sus_posterior(p, SusConfig{}, 1), dirt::NumericalError);
    p.likelihood_bound = 0.0;
    p.log_likelihood = {};
    EXPECT_THROW((void)dirt::bus_sus_posterior(p, SusConfig{}, 1), dirt::ConfigError);
}

}  // namespace
