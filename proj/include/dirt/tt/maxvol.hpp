#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace dirt {

struct MaxvolResult {
    /// rows[j] is the row of A placed at position j of the square submatrix.
    std::vector<Eigen::Index> rows;
    bool converged = true;   ///< false when the swap cap was hit first
    std::size_t swaps = 0;
    double max_coefficient = 1.0;  ///< max |A A[I,:]^{-1}| at return
};

inline constexpr double kMaxvolTolerance = 0.01;
inline constexpr std::size_t kMaxvolSwapCap = 200;

/// Row subset I, |I| = cols(A), of locally maximal |det A[I,:]|: on return every
/// entry of A A[I,:]^{-1} is at most 1 + tau in magnitude (unless the swap cap was hit).
/// Ties in pivot magnitude go to the lowest index. Throws NumericalError if A is
/// rank deficient.
MaxvolResult maxvol(const Eigen::MatrixXd& a, double tau = kMaxvolTolerance,
                    std::size_t max_swaps = kMaxvolSwapCap);

struct Skeleton {
    Eigen::MatrixXd c;  ///< selected columns, m x r
    Eigen::MatrixXd u;  ///< intersection, r x r
    Eigen::MatrixXd r;  ///< selected rows, r x n
    std::vector<Eigen::Index> row_index;
    std::vector<Eigen::Index> col_index;
    Eigen::MatrixXd u_pinv;
    Eigen::Index effective_rank = 0;  ///< numerical rank of u at the drop tolerance

    [[nodiscard]] Eigen::MatrixXd reconstruct() const { return c * u_pinv * r; }
};

inline constexpr double kPseudoInverseDropTolerance = 1e-12;

/// Cross (CUR) approximation A ~ C U^+ R from r columns and r rows chosen by maxvol
/// on orthonormal bases of the selected fibers. U^+ drops singular directions below
/// 1e-12 relative to the largest. Exact when rank(A) <= r.
Skeleton skeleton(const Eigen::MatrixXd& a, Eigen::Index r);

}  // namespace dirt
