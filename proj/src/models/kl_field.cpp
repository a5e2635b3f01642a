#include "dirt/models/kl_field.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "dirt/common/errors.hpp"

namespace dirt {

double CovarianceKernel::operator()(double x, double xp) const {
    if (kind == Kind::constant) return sigma * sigma;
    return sigma * sigma * std::exp(-std::abs(x - xp) / correlation_length);
}

KLField kl_expand(const CovarianceKernel& kernel, double length, std::size_t n_mesh, std::size_t M) {
    if (n_mesh < 2) throw ConfigError("kl_expand: mesh needs at least two points");
    if (M < 1 || M > n_mesh) throw ConfigError(fmt::format("kl_expand: M = {} outside [1, {}]", M, n_mesh));
    if (!(length > 0.0) || !(kernel.sigma > 0.0)) throw ConfigError("kl_expand: length and sigma must be positive");
    if (kernel.kind == CovarianceKernel::Kind::exponential && !(kernel.correlation_length > 0.0))
        throw ConfigError("kl_expand: correlation length must be positive");

    KLField kl;
    kl.kernel = kernel;
    kl.mesh.resize(n_mesh);
    kl.weights.assign(n_mesh, length / static_cast<double>(n_mesh - 1));
    kl.weights.front() *= 0.5;
    kl.weights.back() *= 0.5;
    for (std::size_t i = 0; i < n_mesh; ++i) kl.mesh[i] = length * static_cast<double>(i) / static_cast<double>(n_mesh - 1);
    kl.mean.assign(n_mesh, 0.0);

    // Symmetrized weighted problem W^1/2 C W^1/2 psi = lambda psi, phi = W^-1/2 psi.
    Eigen::VectorXd sw(n_mesh);
    for (std::size_t i = 0; i < n_mesh; ++i) sw[i] = std::sqrt(kl.weights[i]);
    Eigen::MatrixXd A(n_mesh, n_mesh);
    for (std::size_t i = 0; i < n_mesh; ++i)
        for (std::size_t j = 0; j <= i; ++j) A(i, j) = A(j, i) = sw[i] * kernel(kl.mesh[i], kl.mesh[j]) * sw[j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success) throw NumericalError("kl_expand: eigensolver failed");

    // Eigen returns ascending order.
    const Eigen::VectorXd& ev = es.eigenvalues();
    if (ev[0] < -1e-10) throw NumericalError(fmt::format("kl_expand: negative eigenvalue {}", ev[0]));
    kl.all_lambda.resize(n_mesh);
    for (std::size_t i = 0; i < n_mesh; ++i) kl.all_lambda[i] = std::max(ev[static_cast<Eigen::Index>(n_mesh - 1 - i)], 0.0);
    kl.lambda.assign(kl.all_lambda.begin(), kl.all_lambda.begin() + static_cast<std::ptrdiff_t>(M));
    kl.phi.resize(static_cast<Eigen::Index>(n_mesh), static_cast<Eigen::Index>(M));
    for (std::size_t m = 0; m < M; ++m) {
        Eigen::VectorXd psi = es.eigenvectors().col(static_cast<Eigen::Index>(n_mesh - 1 - m));
        // Sign convention: positive weighted mean, else positive first nonzero entry.
        const double s = sw.dot(psi);
        if (s < -1e-12 || (std::abs(s) <= 1e-12 && psi[0] < 0.0)) psi = -psi;
        kl.phi.col(static_cast<Eigen::Index>(m)) = psi.cwiseQuotient(sw);
    }
    return kl;
}

KLField lognormal_kl(double mean, double stddev, double correlation_length, double length, std::size_t n_mesh,
                     std::size_t M) {
    if (!(mean > 0.0) || !(stddev > 0.0)) throw ConfigError("lognormal_kl: mean and stddev must be positive");
    const double cv = stddev / mean;
    const double s2 = std::log1p(cv * cv);
    KLField kl = kl_expand({CovarianceKernel::Kind::exponential, std::sqrt(s2), correlation_length}, length, n_mesh, M);
    kl.mean.assign(n_mesh, std::log(mean) - 0.5 * s2);
    kl.lognormal = true;
    return kl;
}

void field_realize(const KLField& kl, std::span<const double> xi, std::span<double> out) {
    if (xi.size() != kl.terms())
        throw DomainError(fmt::format("field_realize: {} coefficients for {} terms", xi.size(), kl.terms()));
    if (out.size() != kl.mesh_size()) throw DomainError("field_realize: output size differs from mesh");
    const auto n = static_cast<Eigen::Index>(kl.mesh_size());
    for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = kl.mean[static_cast<std::size_t>(i)];
    for (std::size_t m = 0; m < kl.terms(); ++m) {
        const double c = std::sqrt(kl.lambda[m]) * xi[m];
        const auto col = kl.phi.col(static_cast<Eigen::Index>(m));
        for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] += c * col[i];
    }
    if (kl.lognormal)
        for (double& v : out) v = std::exp(v);
}

std::vector<double> field_realize(const KLField& kl, std::span<const double> xi) {
    std::vector<double> out(kl.mesh_size());
    field_realize(kl, xi, out);
    return out;
}

}  // namespace dirt
