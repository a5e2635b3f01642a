#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dirt {

struct CovarianceKernel {
    enum class Kind { exponential, constant };
    Kind kind = Kind::exponential;
    double sigma = 1.0;               ///< marginal standard deviation
    double correlation_length = 1.0;  ///< unused by the constant kernel

    /// C(x, x') = sigma^2 exp(-|x - x'| / l_c), or sigma^2 for the constant kernel.
    [[nodiscard]] double operator()(double x, double xp) const;
};

/// Truncated Karhunen-Loeve expansion on a uniform 1-D mesh of [0, length].
/// phi columns are orthonormal under the trapezoid weights; lambda is nonincreasing.
struct KLField {
    std::vector<double> mesh;
    std::vector<double> weights;  ///< trapezoid quadrature weights
    std::vector<double> mean;     ///< mean of the (underlying Gaussian) field on the mesh
    std::vector<double> lambda;   ///< M retained eigenvalues
    Eigen::MatrixXd phi;          ///< n_mesh x M
    std::vector<double> all_lambda;  ///< full discrete spectrum, for trace checks
    CovarianceKernel kernel;
    bool lognormal = false;  ///< realizations are exp of the Gaussian expansion

    [[nodiscard]] std::size_t terms() const noexcept { return lambda.size(); }
    [[nodiscard]] std::size_t mesh_size() const noexcept { return mesh.size(); }
};

/// Nystrom discretization of the Fredholm eigenproblem with trapezoid weights; keeps the top M
/// eigenpairs. Zero mean. Throws NumericalError on an eigenvalue below -1e-10.
KLField kl_expand(const CovarianceKernel& kernel, double length, std::size_t n_mesh, std::size_t M);

/// Lognormal field with physical mean and standard deviation matched through the standard
/// transform: sigma_ln^2 = log(1 + (std/mean)^2), mu_ln = log(mean) - sigma_ln^2 / 2.
KLField lognormal_kl(double mean, double stddev, double correlation_length, double length, std::size_t n_mesh,
                     std::size_t M);

/// mean + sum_i sqrt(lambda_i) phi_i xi_i on the mesh, exponentiated for lognormal fields.
std::vector<double> field_realize(const KLField& kl, std::span<const double> xi);
void field_realize(const KLField& kl, std::span<const double> xi, std::span<double> out);

}  // namespace dirt
