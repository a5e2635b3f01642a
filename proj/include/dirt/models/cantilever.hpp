#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dirt/models/kl_field.hpp"
#include "dirt/models/problem.hpp"

namespace dirt {

/// Euler-Bernoulli cantilever clamped at x = 0: w'' = F(x) P (L - x), w(0) = w'(0) = 0, on a
/// uniform mesh of [0, L] with one node per flexibility value. Trapezoid rule twice, so the
/// error is second order in the mesh spacing. Units: F in 1/(kN m^2), P in kN, w in m.
std::vector<double> cantilever_deflection(std::span<const double> flexibility, double P, double L);

/// Linear interpolation of mesh values at x in [0, L].
double interpolate_on_mesh(std::span<const double> values, double L, double x);

struct CantileverOptions {
    std::size_t terms = 10;            ///< KL terms M of the prior field
    double correlation_length = 2.5;   ///< prior field
    std::size_t observations = 10;     ///< sensors at x_j = j L / m
    double noise_std = 1e-3;
    double noise_correlation_length = 1.0;
    bool add_noise = true;
    std::uint64_t seed = 2024;         ///< synthetic truth and noise

    double length = 2.0;
    double load = 20.0;
    double flexibility_mean = 1e-4;
    double flexibility_std = 3.5e-5;
    double true_correlation_length = 2.0;
    std::size_t true_terms = 100;
    std::size_t mesh_nodes = 201;
    double half_width = 8.0;  ///< transport bounds in xi-space

    /// When set (length `terms`), the truth is the prior field at these coefficients.
    std::optional<std::vector<double>> xi_true;

    [[nodiscard]] double deflection_limit() const noexcept { return length / 55.0; }
    void validate() const;
};

struct CantileverInstance {
    BayesianReliabilityProblem problem;  ///< xi in R^M, standard normal prior
    KLField prior_field;
    std::vector<double> sensors;
    std::vector<double> data;
    std::vector<double> true_flexibility;
    Eigen::MatrixXd noise_covariance;
};

CantileverInstance cantilever_instance(const CantileverOptions& opts);
BayesianReliabilityProblem cantilever_problem(const CantileverOptions& opts);

}  // namespace dirt
