#pragma once

// Dense linear-algebra kernels shared by the estimators.
//
// Matrices are plain Eigen dense matrices. Data matrices are laid out with
// observations as rows and variables as columns, so an n x p data matrix X
// gives the p x p covariance (1/n) X^T X.

#include <cstddef>
#include <string_view>

#include <Eigen/Dense>

namespace diffnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kSymmetryTolerance = 1e-10;

// Throws ShapeError unless `m` is non-empty and square.
void require_square(const Matrix& m, std::string_view what);
// Throws InvalidArgument if any entry is NaN or infinite.
void require_finite(const Matrix& m, std::string_view what);

double max_asymmetry(const Matrix& m);
bool is_symmetric(const Matrix& m, double tol = kSymmetryTolerance);
// Copies the upper triangle onto the lower one so mirrored entries are
// bitwise equal.
void mirror_upper(Matrix& m);

// Elementwise sign(m) * max(|m| - tau, 0).
Matrix soft_threshold(const Matrix& m, double tau);

Matrix matmul(const Matrix& a, const Matrix& b);
// a^T b
Matrix matmul_tn(const Matrix& a, const Matrix& b);
// a b^T
Matrix matmul_nt(const Matrix& a, const Matrix& b);

struct Norms {
    double frobenius = 0.0;
    double l1 = 0.0;       // sum of absolute entries
    double max_abs = 0.0;  // largest absolute entry
};

Norms norms(const Matrix& m);

// Column means of an n x p matrix subtracted from every row.
Matrix center_columns(const Matrix& x);

// (1/n) X~^T X~ where X~ is X, optionally column-centred. Divisor is n, not
// n - 1. The result is exactly symmetric.
Matrix sample_covariance(const Matrix& x, bool center);

struct PowerIterationResult {
    double value = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

// Largest eigenvalue of a symmetric PSD matrix by power iteration with
// Rayleigh-quotient stopping (relative change below tol). Starts from the
// normalised all-ones vector, then repeats from a second fixed vector with
// alternating signs and keeps the larger quotient, so a start vector that
// happens to be orthogonal to the leading eigenvector cannot hide it.
PowerIterationResult lambda_max_power(const Matrix& s, double tol = 1e-8,
                                      std::size_t max_iter = 1000);

class CholeskyFactor {
public:
    const Matrix& lower() const noexcept { return lower_; }
    Eigen::Index size() const noexcept { return lower_.rows(); }

    // Solves S X = B.
    Matrix solve(const Matrix& b) const;
    // S^{-1}, exactly symmetric.
    Matrix inverse() const;

private:
    friend CholeskyFactor cholesky(const Matrix& s);
    explicit CholeskyFactor(Matrix lower) : lower_(std::move(lower)) {}

    Matrix lower_;
};

// Lower-triangular L with L L^T = S. Throws NotPositiveDefinite naming the
// first pivot that falls to 1e-12 or below.
CholeskyFactor cholesky(const Matrix& s);

Matrix inverse_spd(const Matrix& s);

}  // namespace diffnet
