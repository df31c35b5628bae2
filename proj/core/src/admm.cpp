#include "diffnet/admm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "diffnet/error.hpp"

namespace diffnet {

namespace {

constexpr int kMaxSweeps = 100;

double off_diagonal_norm(const Matrix& a) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            if (i != j) sum += a(i, j) * a(i, j);
        }
    }
    return std::sqrt(sum);
}

// Columns (p, q) <- (c col_p - s col_q, s col_p + c col_q)
void rotate_columns(Matrix& m, Eigen::Index p, Eigen::Index q, double c, double s) {
    for (Eigen::Index k = 0; k < m.rows(); ++k) {
        const double mp = m(k, p);
        const double mq = m(k, q);
        m(k, p) = c * mp - s * mq;
        m(k, q) = s * mp + c * mq;
    }
}

void rotate_rows(Matrix& m, Eigen::Index p, Eigen::Index q, double c, double s) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
        const double mp = m(p, k);
        const double mq = m(q, k);
        m(p, k) = c * mp - s * mq;
        m(q, k) = s * mp + c * mq;
    }
}

const Matrix& within_oracle_limit(const Matrix& s) {
    if (s.rows() > kAdmmMaxDim) {
        throw InvalidArgument("the ADMM oracle is limited to p <= " +
                              std::to_string(kAdmmMaxDim) + ", got p = " +
                              std::to_string(s.rows()));
    }
    return s;
}

std::string lambda_tag(double lambda) {
    std::ostringstream os;
    os.precision(17);
    os << "lambda=" << lambda << ": ";
    return os.str();
}

}  // namespace

void AdmmConfig::validate() const {
    if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be nonnegative");
    if (!(rho > 0.0)) throw InvalidArgument("ADMM step size rho must be positive");
    if (!(rel_tol > 0.0)) throw InvalidArgument("rel_tol must be positive");
    if (!(primal_tol > 0.0)) throw InvalidArgument("primal_tol must be positive");
    if (max_iter < 1) throw InvalidArgument("max_iter must be at least 1");
}

EigenDecomposition symmetric_eigen(const Matrix& s, double tol) {
    require_square(s, "eigensolver input");
    require_finite(s, "eigensolver input");
    if (!is_symmetric(s)) throw InvalidArgument("eigensolver input must be symmetric");

    const Eigen::Index n = s.rows();
    Matrix a = s;
    Matrix v = Matrix::Identity(n, n);
    const double target = tol * s.norm();

    bool converged = off_diagonal_norm(a) <= target;
    for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
        for (Eigen::Index p = 0; p + 1 < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = t * c;
                rotate_columns(a, p, q, c, sn);
                rotate_rows(a, p, q, c, sn);
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                rotate_columns(v, p, q, c, sn);
            }
        }
        converged = off_diagonal_norm(a) <= target;
    }
    if (!converged) {
        throw EigensolverFailure("Jacobi eigensolver did not converge in " +
                                 std::to_string(kMaxSweeps) + " sweeps");
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&a](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });

    EigenDecomposition out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        out.values(k) = a(src, src);
        out.vectors.col(k) = v.col(src);
    }
    return out;
}

SylvesterRidgeSolver::SylvesterRidgeSolver(const Matrix& s1, const Matrix& s2)
    : first_(symmetric_eigen(s1)), second_(symmetric_eigen(s2)) {
    if (s1.rows() != s2.rows()) throw ShapeError("S1 and S2 must have the same size");
}

Matrix SylvesterRidgeSolver::solve(const Matrix& c, double rho) const {
    if (!(rho > 0.0)) throw InvalidArgument("rho must be positive");
    const Eigen::Index p = first_.values.size();
    if (c.rows() != p || c.cols() != p) {
        throw ShapeError("right-hand side must be " + std::to_string(p) + "x" + std::to_string(p));
    }
    const Matrix& u1 = first_.vectors;
    const Matrix& u2 = second_.vectors;
    Matrix w(p, p);
    w.noalias() = u1.transpose() * c;
    Matrix rotated(p, p);
    rotated.noalias() = w * u2;
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = 0; i < p; ++i) {
            rotated(i, j) /= first_.values(i) * second_.values(j) + rho;
        }
    }
    w.noalias() = u1 * rotated;
    Matrix out(p, p);
    out.noalias() = w * u2.transpose();
    return out;
}

Matrix solve_sylvester_ridge(const Matrix& s1, const Matrix& s2, const Matrix& c, double rho) {
    if (!(rho > 0.0)) throw InvalidArgument("rho must be positive");
    return SylvesterRidgeSolver(s1, s2).solve(c, rho);
}

AdmmSolver::AdmmSolver(const Matrix& s1, const Matrix& s2)
    : engine_(GradientEngine::from_covariances(LossKind::asymmetric, s1, s2)),
      sylvester_(within_oracle_limit(s1), s2) {}

SolverResult AdmmSolver::solve(const AdmmConfig& config) const {
    const Eigen::Index p = engine_.dim();
    return run(config, Matrix::Zero(p, p), Matrix::Zero(p, p), nullptr);
}

SolverResult AdmmSolver::solve(const AdmmConfig& config, const Matrix& delta0) const {
    const Eigen::Index p = engine_.dim();
    if (delta0.rows() != p || delta0.cols() != p) {
        throw ShapeError("initial Delta has the wrong shape");
    }
    return run(config, delta0, Matrix::Zero(p, p), nullptr);
}

SolverResult AdmmSolver::run(const AdmmConfig& config, Matrix a, Matrix b,
                             Matrix* dual_out) const {
    config.validate();
    const double lambda = config.lambda;
    const double rho = config.rho;
    const Matrix& diff = engine_.diff();

    SolverResult result;
    if (lambda >= engine_.lambda_max()) {
        // Zero satisfies the optimality conditions, and (0, diff / rho) is the
        // matching fixed point. Starting from B = 0 the iterates only approach
        // it, so jump there directly.
        const Eigen::Index p = engine_.dim();
        result.delta_hat = Matrix::Zero(p, p);
        result.objective_trace.push_back(0.0);
        result.converged = true;
        if (dual_out) *dual_out = diff / rho;
        return result;
    }
    double f_current = engine_.objective(a, lambda);
    for (std::size_t iter = 1; iter <= config.max_iter; ++iter) {
        const Matrix delta = sylvester_.solve(diff + rho * (a - b), rho);
        Matrix a_next = soft_threshold(delta + b, lambda / rho);
        b += delta - a_next;
        a = std::move(a_next);

        const double f_next = engine_.objective(a, lambda);
        if (!std::isfinite(f_next) || !b.allFinite()) throw DivergenceError(iter);
        result.objective_trace.push_back(f_next);
        result.iterations = iter;

        const bool flat = objective_converged(f_current, f_next, config.rel_tol);
        f_current = f_next;
        result.primal_residual = (delta - a).norm();
        if (flat && result.primal_residual <= config.primal_tol * (1.0 + a.norm())) {
            result.converged = true;
            break;
        }
    }
    result.delta_hat = std::move(a);
    result.objective = f_current;
    if (result.objective_trace.empty()) result.objective_trace.push_back(f_current);
    if (dual_out) *dual_out = std::move(b);
    return result;
}

PathResult AdmmSolver::solve_path(std::span<const double> grid, const AdmmConfig& config,
                                  bool warm_start) const {
    require_decreasing(grid);
    const Eigen::Index p = engine_.dim();
    PathResult path;
    path.grid.assign(grid.begin(), grid.end());
    path.lambda_max = engine_.lambda_max();
    path.solutions.reserve(grid.size());

    Matrix a = Matrix::Zero(p, p);
    Matrix b = Matrix::Zero(p, p);
    for (double lambda : grid) {
        AdmmConfig at = config;
        at.lambda = lambda;
        Matrix dual;
        try {
            path.solutions.push_back(run(at, warm_start ? a : Matrix::Zero(p, p),
                                         warm_start ? b : Matrix::Zero(p, p), &dual));
        } catch (const Error& e) {
            throw Error(e.kind(), lambda_tag(lambda) + e.what());
        }
        a = path.solutions.back().delta_hat;
        b = std::move(dual);
    }
    return path;
}

SolverResult admm_solve(const Matrix& s1, const Matrix& s2, const AdmmConfig& config) {
    config.validate();
    return AdmmSolver(s1, s2).solve(config);
}

SolverResult admm_solve(const Matrix& s1, const Matrix& s2, const AdmmConfig& config,
                        const Matrix& delta0) {
    config.validate();
    return AdmmSolver(s1, s2).solve(config, delta0);
}

}  // namespace diffnet
