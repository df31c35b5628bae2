#pragma once

// Simulation designs for two-sample differential networks.
//
// Both designs share the true differential network
//   Delta*[1,2] = Delta*[2,1] = -1, Delta*[2,2] = 2 (1-indexed), zero elsewhere,
// and set Omega_2 = Omega_1 + Delta*, Sigma_k = Omega_k^{-1}.
//
// sparse:       Omega_1 tridiagonal with diagonal (4/3, 5/3, ..., 5/3, 4/3) and
//               off-diagonal +2/3. The exact inverse of (0.5^|i-j|) has -2/3
//               off-diagonals; the two are similar under the alternating sign
//               flip diag(1, -1, 1, ...), so they share a spectrum and both
//               are positive definite. The +2/3 values are used as published.
// asymsparse:   Omega_1 = (0.5^|i-j|).

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "diffnet/matcore.hpp"

namespace diffnet {

enum class SimCase { sparse, asymptotic_sparse };

std::string_view to_string(SimCase c) noexcept;
// Accepts "sparse" and "asymsparse".
SimCase parse_sim_case(std::string_view name);

struct SimDesign {
    SimCase variant = SimCase::sparse;
    Eigen::Index p = 0;
    Matrix omega1;
    Matrix delta_star;
    Matrix sigma1;
    Matrix sigma2;
};

struct SupportMetrics {
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;
    std::size_t false_negatives = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

Matrix tridiagonal_precision(Eigen::Index p);
Matrix ar1_matrix(Eigen::Index p, double rho = 0.5);
Matrix true_delta(Eigen::Index p);

SimDesign build_design(SimCase variant, Eigen::Index p);

// n draws from N(0, sigma) as rows z L^T, L the Cholesky factor of sigma.
Matrix sample_gaussian(const Matrix& sigma, Eigen::Index n, std::uint64_t seed);

// Support = entries with |value| > zero_tol, counted over all p^2 positions.
// Undefined precision or recall (nothing predicted / nothing true) reads as 0.
SupportMetrics support_metrics(const Matrix& delta_hat, const Matrix& delta_star,
                               double zero_tol = 0.0);

}  // namespace diffnet
