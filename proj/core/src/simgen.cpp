#include "diffnet/simgen.hpp"

#include <cmath>
#include <string>

#include "diffnet/error.hpp"
#include "diffnet/rng.hpp"

namespace diffnet {

namespace {

void require_dimension(Eigen::Index p) {
    if (p < 2) {
        throw InvalidArgument("simulation dimension must be at least 2, got " + std::to_string(p));
    }
}

}  // namespace

std::string_view to_string(SimCase c) noexcept {
    return c == SimCase::sparse ? "sparse" : "asymsparse";
}

SimCase parse_sim_case(std::string_view name) {
    if (name == "sparse") return SimCase::sparse;
    if (name == "asymsparse") return SimCase::asymptotic_sparse;
    throw InvalidArgument("unknown simulation case '" + std::string(name) +
                          "' (expected sparse or asymsparse)");
}

Matrix tridiagonal_precision(Eigen::Index p) {
    require_dimension(p);
    Matrix omega = Matrix::Zero(p, p);
    for (Eigen::Index i = 0; i < p; ++i) omega(i, i) = 5.0 / 3.0;
    omega(0, 0) = 4.0 / 3.0;
    omega(p - 1, p - 1) = 4.0 / 3.0;
    for (Eigen::Index i = 0; i + 1 < p; ++i) {
        omega(i, i + 1) = 2.0 / 3.0;
        omega(i + 1, i) = 2.0 / 3.0;
    }
    return omega;
}

Matrix ar1_matrix(Eigen::Index p, double rho) {
    if (p < 1) throw InvalidArgument("dimension must be positive");
    if (!(std::abs(rho) < 1.0)) {
        throw InvalidArgument("AR(1) correlation must satisfy |rho| < 1");
    }
    Matrix m(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = 0; i < p; ++i) {
            m(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
        }
    }
    return m;
}

Matrix true_delta(Eigen::Index p) {
    require_dimension(p);
    Matrix delta = Matrix::Zero(p, p);
    delta(0, 1) = -1.0;
    delta(1, 0) = -1.0;
    delta(1, 1) = 2.0;
    return delta;
}

SimDesign build_design(SimCase variant, Eigen::Index p) {
    require_dimension(p);
    SimDesign design;
    design.variant = variant;
    design.p = p;
    design.omega1 = variant == SimCase::sparse ? tridiagonal_precision(p) : ar1_matrix(p, 0.5);
    design.delta_star = true_delta(p);
    const Matrix omega2 = design.omega1 + design.delta_star;
    design.sigma1 = inverse_spd(design.omega1);
    design.sigma2 = inverse_spd(omega2);
    return design;
}

Matrix sample_gaussian(const Matrix& sigma, Eigen::Index n, std::uint64_t seed) {
    if (n < 1) throw InvalidArgument("sample size must be at least 1");
    const CholeskyFactor factor = cholesky(sigma);
    const Eigen::Index p = sigma.rows();
    NormalRng rng(seed);
    Matrix z(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) z(i, j) = rng.normal();
    }
    Matrix x(n, p);
    x.noalias() = z * factor.lower().transpose();
    return x;
}

SupportMetrics support_metrics(const Matrix& delta_hat, const Matrix& delta_star,
                               double zero_tol) {
    if (delta_hat.rows() != delta_star.rows() || delta_hat.cols() != delta_star.cols()) {
        throw ShapeError("estimate and truth have different shapes");
    }
    if (!(zero_tol >= 0.0)) throw InvalidArgument("zero tolerance must be nonnegative");
    SupportMetrics m;
    for (Eigen::Index j = 0; j < delta_hat.cols(); ++j) {
        for (Eigen::Index i = 0; i < delta_hat.rows(); ++i) {
            const bool predicted = std::abs(delta_hat(i, j)) > zero_tol;
            const bool actual = std::abs(delta_star(i, j)) > 0.0;
            if (predicted && actual) ++m.true_positives;
            if (predicted && !actual) ++m.false_positives;
            if (!predicted && actual) ++m.false_negatives;
        }
    }
    const auto tp = static_cast<double>(m.true_positives);
    const std::size_t predicted = m.true_positives + m.false_positives;
    const std::size_t actual = m.true_positives + m.false_negatives;
    m.precision = predicted > 0 ? tp / static_cast<double>(predicted) : 0.0;
    m.recall = actual > 0 ? tp / static_cast<double>(actual) : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

}  // namespace diffnet
