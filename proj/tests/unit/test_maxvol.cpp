#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "dirt/common/errors.hpp"
#include "dirt/tt/maxvol.hpp"

namespace {

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index m, Eigen::Index n) {
    std::normal_distribution<double> dist;
    Eigen::MatrixXd a(m, n);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = dist(rng);
    return a;
}

double abs_det_rows(const Eigen::MatrixXd& a, const std::vector<Eigen::Index>& rows) {
    Eigen::MatrixXd s(static_cast<Eigen::Index>(rows.size()), a.cols());
    for (std::size_t j = 0; j < rows.size(); ++j) s.row(static_cast<Eigen::Index>(j)) = a.row(rows[j]);
    return std::abs(s.determinant());
}

double dominance(const Eigen::MatrixXd& a, const std::vector<Eigen::Index>& rows) {
    Eigen::MatrixXd s(a.cols(), a.cols());
    for (std::size_t j = 0; j < rows.size(); ++j) s.row(static_cast<Eigen::Index>(j)) = a.row(rows[j]);
    return (a * s.inverse()).cwiseAbs().maxCoeff();
}

TEST(Maxvol, IdentityOverZerosPicksIdentityRows) {
    const Eigen::Index r = 3;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * r, r);
    a.topRows(r).setIdentity();
    auto res = dirt::maxvol(a);
    std::sort(res.rows.begin(), res.rows.end());
    EXPECT_EQ(res.rows, (std::vector<Eigen::Index>{0, 1, 2}));
    EXPECT_EQ(res.swaps, 0u);
}

TEST(Maxvol, SingleColumnPicksLargestMagnitude) {
    Eigen::MatrixXd a(3, 1);
    a << 1, 3, 2;
    EXPECT_EQ(dirt::maxvol(a).rows, (std::vector<Eigen::Index>{1}));
}

TEST(Maxvol, TiesGoToLowestIndex) {
    Eigen::MatrixXd a(4, 1);
    a << 2, -3, 3, 1;
    EXPECT_EQ(dirt::maxvol(a).rows, (std::vector<Eigen::Index>{1}));
}

TEST(Maxvol, BeatsRandomSubsetsOnVolume) {
    std::mt19937_64 rng(11);
    const Eigen::MatrixXd a = random_matrix(rng, 50, 4);
    const auto res = dirt::maxvol(a);
    const double vol = abs_det_rows(a, res.rows);
    std::vector<Eigen::Index> all(50);
    std::iota(all.begin(), all.end(), 0);
    for (int t = 0; t < 1000; ++t) {
        std::shuffle(all.begin(), all.end(), rng);
        const std::vector<Eigen::Index> subset(all.begin(), all.begin() + 4);
        EXPECT_GE(vol, abs_det_rows(a, subset));
    }
}

TEST(Maxvol, DominanceOnHundredRandomMatrices) {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 100; ++t) {
        const Eigen::Index r = 1 + static_cast<Eigen::Index>(rng() % 6);
        const Eigen::Index m = r + static_cast<Eigen::Index>(rng() % 60);
        const Eigen::MatrixXd a = random_matrix(rng, m, r);
        const auto res = dirt::maxvol(a);
        ASSERT_TRUE(res.converged);
        EXPECT_LE(dominance(a, res.rows), 1.01 + 1e-12) << "trial " << t;
    }
}

TEST(Maxvol, EachSwapIncreasesVolume) {
    std::mt19937_64 rng(13);
    const Eigen::MatrixXd a = random_matrix(rng, 80, 5);
    // Re-run with growing swap caps: the volume sequence must strictly increase.
    double previous = 0.0;
    const auto full = dirt::maxvol(a);
    for (std::size_t cap = 0; cap <= full.swaps; ++cap) {
        const auto partial = dirt::maxvol(a, dirt::kMaxvolTolerance, cap);
        const double vol = abs_det_rows(a, partial.rows);
        if (cap > 0) {
            EXPECT_GT(vol, previous);
        }
        previous = vol;
    }
}

TEST(Maxvol, SwapCapReturnsBestSoFarWithFlag) {
    std::mt19937_64 rng(14);
    const Eigen::MatrixXd a = random_matrix(rng, 200, 6);
    const auto full = dirt::maxvol(a);
    ASSERT_GT(full.swaps, 0u);
    const auto capped = dirt::maxvol(a, dirt::kMaxvolTolerance, 0);
    EXPECT_FALSE(capped.converged);
    EXPECT_EQ(capped.rows.size(), 6u);
}

TEST(Maxvol, RankDeficientIsNumericalError) {
    Eigen::MatrixXd a(5, 2);
    a << 1, 2, 2, 4, 3, 6, 4, 8, 5, 10;
    EXPECT_THROW(dirt::maxvol(a), dirt::NumericalError);
}

TEST(Skeleton, RankOneIsExact) {
    Eigen::MatrixXd a(2, 2);
    a << 3, 4, 6, 8;
    const auto s = dirt::skeleton(a, 1);
    EXPECT_EQ((s.reconstruct() - a).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Skeleton, IdentityIsExact) {
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 3);
    const auto s = dirt::skeleton(a, 3);
    EXPECT_LE((s.reconstruct() - a).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(s.effective_rank, 3);
}

TEST(Skeleton, ExactRankFiveRecovery) {
    std::mt19937_64 rng(15);
    const Eigen::MatrixXd a = random_matrix(rng, 30, 5) * random_matrix(rng, 20, 5).transpose();
    const auto s = dirt::skeleton(a, 5);
    EXPECT_LE((s.reconstruct() - a).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Skeleton, OverSpecifiedRankUsesPseudoInverse) {
    std::mt19937_64 rng(16);
    const Eigen::MatrixXd a = random_matrix(rng, 12, 2) * random_matrix(rng, 10, 2).transpose();
    const auto s = dirt::skeleton(a, 4);
    EXPECT_EQ(s.effective_rank, 2);
    EXPECT_LE((s.reconstruct() - a).cwiseAbs().maxCoeff(), 1e-10);
}

}  // namespace
