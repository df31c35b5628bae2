#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "diffnet/lossgrad.hpp"
#include "diffnet/matcore.hpp"

namespace diffnet {

struct SolverConfig {
    double lambda = 0.0;
    std::size_t max_iter = 10000;
    // Stop once |F_k - F_{k+1}| < rel_tol * (|F_k| + 1).
    double rel_tol = 1e-5;
    // Return (D + D^T) / 2 instead of D; meant for the asymmetric loss.
    bool symmetrize_output = false;

    void validate() const;
};

struct SolverResult {
    Matrix delta_hat;
    std::size_t iterations = 0;
    double objective = 0.0;
    // F after each iteration; the last entry equals `objective`.
    std::vector<double> objective_trace;
    bool converged = false;
    double lipschitz_used = 0.0;
    // ADMM only: ||D - A||_F at the last iteration.
    double primal_residual = 0.0;
};

struct PathResult {
    std::vector<double> grid;  // strictly decreasing
    std::vector<SolverResult> solutions;
    double lambda_max = 0.0;
};

// Step size is 1 / (kLipschitzInflation * L) so a slightly low power-iteration
// estimate of L cannot push the step past the stability limit.
inline constexpr double kLipschitzInflation = 1.0 + 1e-6;

// t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2; requires t_k >= 1.
double momentum_next(double t);

bool objective_converged(double previous, double next, double rel_tol) noexcept;

// Accelerated proximal gradient (FISTA) for min L(D) + lambda ||D||_1,
// starting from delta0 (zero when omitted). Throws DivergenceError when an
// objective value becomes non-finite.
SolverResult fista_solve(const GradientEngine& engine, const SolverConfig& config);
SolverResult fista_solve(const GradientEngine& engine, const SolverConfig& config,
                         const Matrix& delta0);

// n_lambda values linearly spaced from lambda_max down to
// min_ratio * lambda_max. Both end points are exact.
std::vector<double> lambda_grid(double lambda_max, std::size_t n_lambda = 50,
                                double min_ratio = 0.5);

void require_decreasing(std::span<const double> grid);

// Solves the grid from the largest lambda down. The first solve starts at
// zero; with warm_start each later solve starts from the previous estimate.
// Without warm_start, threads > 1 spreads the grid over worker threads.
// Solver errors are rethrown with the offending lambda in the message.
PathResult solve_path(const GradientEngine& engine, std::span<const double> grid,
                      const SolverConfig& config, bool warm_start = true,
                      unsigned threads = 1);

}  // namespace diffnet
