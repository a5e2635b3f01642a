#include "dirt/tt/maxvol.hpp"

#include <cmath>

#include <fmt/core.h>

#include "dirt/common/errors.hpp"

namespace dirt {
namespace {

// Rows chosen by Gaussian elimination with partial pivoting, lowest index on ties.
std::vector<Eigen::Index> initial_pivots(const Eigen::MatrixXd& a) {
    const Eigen::Index m = a.rows(), r = a.cols();
    Eigen::MatrixXd w = a;
    std::vector<bool> used(static_cast<std::size_t>(m), false);
    std::vector<Eigen::Index> rows;
    const double scale = a.cwiseAbs().maxCoeff();
    const double floor = scale * 1e-14 * static_cast<double>(std::max(m, r));
    for (Eigen::Index j = 0; j < r; ++j) {
        Eigen::Index p = -1;
        double best = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (used[static_cast<std::size_t>(i)]) continue;
            const double v = std::abs(w(i, j));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        if (p < 0 || !(best > floor))
            throw NumericalError(fmt::format(
                "maxvol: matrix ({} x {}) is rank deficient; no pivot above {:.3g} in column {}", m, r, floor, j));
        used[static_cast<std::size_t>(p)] = true;
        rows.push_back(p);
        if (j + 1 < r) {
            const double piv = w(p, j);
            for (Eigen::Index i = 0; i < m; ++i) {
                if (used[static_cast<std::size_t>(i)]) continue;
                const double f = w(i, j) / piv;
                if (f != 0.0) w.row(i).tail(r - j - 1) -= f * w.row(p).tail(r - j - 1);
            }
        }
    }
    return rows;
}

}  // namespace

MaxvolResult maxvol(const Eigen::MatrixXd& a, double tau, std::size_t max_swaps) {
    const Eigen::Index m = a.rows(), r = a.cols();
    if (r == 0 || m < r) throw DomainError(fmt::format("maxvol: need rows >= cols > 0, got {} x {}", m, r));
    if (!a.allFinite()) throw NumericalError("maxvol: matrix has non-finite entries");

    MaxvolResult res;
    res.rows = initial_pivots(a);

    Eigen::MatrixXd sub(r, r);
    for (Eigen::Index j = 0; j < r; ++j) sub.row(j) = a.row(res.rows[static_cast<std::size_t>(j)]);
    // B = A sub^{-1}, solved as sub^T B^T = A^T.
    Eigen::MatrixXd b = sub.transpose().partialPivLu().solve(a.transpose()).transpose();

    while (true) {
        Eigen::Index bi = 0, bj = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < r; ++j) {
                const double v = std::abs(b(i, j));
                if (v > best) {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        res.max_coefficient = best;
        if (best <= 1.0 + tau) break;
        if (res.swaps >= max_swaps) {
            res.converged = false;
            break;
        }
        // Replacing row rows[bj] by bi scales |det| by |b(bi, bj)| > 1 + tau.
        res.rows[static_cast<std::size_t>(bj)] = bi;
        const Eigen::VectorXd col = b.col(bj);
        Eigen::RowVectorXd row = b.row(bi);
        row(bj) -= 1.0;
        b.noalias() -= (col / col(bi)) * row;
        ++res.swaps;
    }
    return res;
}

Skeleton skeleton(const Eigen::MatrixXd& a, Eigen::Index r) {
    const Eigen::Index m = a.rows(), n = a.cols();
    if (r < 1 || r > std::min(m, n))
        throw DomainError(fmt::format("skeleton: rank {} not in [1, {}]", r, std::min(m, n)));

    // Starting columns: leading pivots of a column-pivoted QR.
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> cqr(a);
    std::vector<Eigen::Index> cols(static_cast<std::size_t>(r));
    for (Eigen::Index j = 0; j < r; ++j) cols[static_cast<std::size_t>(j)] = cqr.colsPermutation().indices()(j);

    auto orthonormal_basis = [r](const Eigen::MatrixXd& fibers) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(fibers);
        return Eigen::MatrixXd(qr.householderQ() * Eigen::MatrixXd::Identity(fibers.rows(), r));
    };

    std::vector<Eigen::Index> rows;
    for (int sweep = 0; sweep < 2; ++sweep) {
        Eigen::MatrixXd c(m, r);
        for (Eigen::Index j = 0; j < r; ++j) c.col(j) = a.col(cols[static_cast<std::size_t>(j)]);
        rows = maxvol(orthonormal_basis(c)).rows;
        Eigen::MatrixXd rt(n, r);
        for (Eigen::Index i = 0; i < r; ++i) rt.col(i) = a.row(rows[static_cast<std::size_t>(i)]).transpose();
        cols = maxvol(orthonormal_basis(rt)).rows;
    }

    Skeleton s;
    s.row_index = rows;
    s.col_index = cols;
    s.c.resize(m, r);
    s.r.resize(r, n);
    s.u.resize(r, r);
    for (Eigen::Index j = 0; j < r; ++j) s.c.col(j) = a.col(cols[static_cast<std::size_t>(j)]);
    for (Eigen::Index i = 0; i < r; ++i) s.r.row(i) = a.row(rows[static_cast<std::size_t>(i)]);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < r; ++j)
            s.u(i, j) = a(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]);

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(kPseudoInverseDropTolerance);
    cod.compute(s.u);
    s.effective_rank = cod.rank();
    s.u_pinv = cod.pseudoInverse();
    return s;
}

}  // namespace dirt
