#pragma once

// ADMM for the asymmetric D-trace estimator. Used as an independent optimum
// oracle for the FISTA solver and as the timing baseline; restricted to
// p <= kAdmmMaxDim because every run starts with two dense eigendecompositions.
//
// Splitting D = A with scaled dual B, each iteration is
//   D <- solve  S1 D S2 + rho D = (S1 - S2) + rho (A - B)
//   A <- soft(D + B, lambda / rho)
//   B <- B + D - A
// and the sparse iterate A is reported.

#include <cstddef>
#include <span>
#include <vector>

#include "diffnet/lossgrad.hpp"
#include "diffnet/matcore.hpp"
#include "diffnet/solver.hpp"

namespace diffnet {

inline constexpr Eigen::Index kAdmmMaxDim = 200;

struct AdmmConfig {
    double lambda = 0.0;
    double rho = 1.0;
    std::size_t max_iter = 10000;
    double rel_tol = 1e-5;
    // Convergence also needs ||D - A||_F <= primal_tol * (1 + ||A||_F).
    double primal_tol = 1e-3;

    void validate() const;
};

struct EigenDecomposition {
    Vector values;   // descending
    Matrix vectors;  // orthonormal columns, matching values
};

// Cyclic Jacobi rotations until the off-diagonal Frobenius mass drops below
// tol * ||S||_F. Throws EigensolverFailure after 100 sweeps.
EigenDecomposition symmetric_eigen(const Matrix& s, double tol = 1e-14);

// Solves S1 D S2 + rho D = C for symmetric PSD S1, S2 via their spectral
// decompositions, which are computed once and reused for every right-hand side.
class SylvesterRidgeSolver {
public:
    SylvesterRidgeSolver(const Matrix& s1, const Matrix& s2);

    Matrix solve(const Matrix& c, double rho) const;

    const EigenDecomposition& first() const noexcept { return first_; }
    const EigenDecomposition& second() const noexcept { return second_; }

private:
    EigenDecomposition first_;
    EigenDecomposition second_;
};

Matrix solve_sylvester_ridge(const Matrix& s1, const Matrix& s2, const Matrix& c, double rho);

class AdmmSolver {
public:
    AdmmSolver(const Matrix& s1, const Matrix& s2);

    // A0 = delta0 (zero when omitted), B0 = 0. For lambda >= max|S1 - S2|
    // the zero matrix is returned without iterating.
    SolverResult solve(const AdmmConfig& config) const;
    SolverResult solve(const AdmmConfig& config, const Matrix& delta0) const;

    // Largest lambda first; with warm_start each solve resumes from the
    // previous primal and dual iterates.
    PathResult solve_path(std::span<const double> grid, const AdmmConfig& config,
                          bool warm_start = true) const;

    const GradientEngine& engine() const noexcept { return engine_; }

private:
    SolverResult run(const AdmmConfig& config, Matrix a, Matrix b, Matrix* dual_out) const;

    GradientEngine engine_;  // asymmetric loss, dense; supplies objective values
    SylvesterRidgeSolver sylvester_;
};

SolverResult admm_solve(const Matrix& s1, const Matrix& s2, const AdmmConfig& config);
SolverResult admm_solve(const Matrix& s1, const Matrix& s2, const AdmmConfig& config,
                        const Matrix& delta0);

}  // namespace diffnet
