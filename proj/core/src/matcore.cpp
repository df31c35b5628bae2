#include "diffnet/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "diffnet/error.hpp"

namespace diffnet {

namespace {

std::string dims(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

// Power iteration from a single start vector.
PowerIterationResult power_from(const Matrix& s, Vector v, double tol,
                                std::size_t max_iter) {
    PowerIterationResult out;
    v.normalize();
    double rayleigh = v.dot(s * v);
    for (std::size_t it = 1; it <= max_iter; ++it) {
        Vector w = s * v;
        const double norm = w.norm();
        out.iterations = it;
        if (norm == 0.0) {
            // v lies in the null space; the quotient there is exactly 0.
            out.value = std::max(rayleigh, 0.0);
            out.converged = true;
            return out;
        }
        v = w / norm;
        const double next = v.dot(s * v);
        if (std::abs(next - rayleigh) <= tol * std::abs(next)) {
            out.value = next;
            out.converged = true;
            return out;
        }
        rayleigh = next;
    }
    out.value = rayleigh;
    return out;
}

}  // namespace

void require_square(const Matrix& m, std::string_view what) {
    if (m.rows() == 0 || m.cols() == 0 || m.rows() != m.cols()) {
        throw ShapeError(std::string(what) + " must be a non-empty square matrix, got " +
                         dims(m));
    }
}

void require_finite(const Matrix& m, std::string_view what) {
    if (!m.allFinite()) {
        throw InvalidArgument(std::string(what) + " contains NaN or infinite entries");
    }
}

double max_asymmetry(const Matrix& m) {
    if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
    double gap = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = j + 1; i < m.rows(); ++i) {
            gap = std::max(gap, std::abs(m(i, j) - m(j, i)));
        }
    }
    return gap;
}

bool is_symmetric(const Matrix& m, double tol) { return max_asymmetry(m) <= tol; }

void mirror_upper(Matrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = j + 1; i < m.rows(); ++i) m(i, j) = m(j, i);
    }
}

Matrix soft_threshold(const Matrix& m, double tau) {
    if (!(tau >= 0.0)) {
        throw InvalidArgument("soft-threshold level must be nonnegative, got " +
                              std::to_string(tau));
    }
    return m.unaryExpr([tau](double v) {
        if (v > tau) return v - tau;
        if (v < -tau) return v + tau;
        return 0.0;
    });
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: cannot multiply " + dims(a) + " by " + dims(b));
    }
    Matrix out(a.rows(), b.cols());
    out.noalias() = a * b;
    return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw ShapeError("matmul_tn: cannot multiply (" + dims(a) + ")^T by " + dims(b));
    }
    Matrix out(a.cols(), b.cols());
    out.noalias() = a.transpose() * b;
    return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw ShapeError("matmul_nt: cannot multiply " + dims(a) + " by (" + dims(b) + ")^T");
    }
    Matrix out(a.rows(), b.rows());
    out.noalias() = a * b.transpose();
    return out;
}

Norms norms(const Matrix& m) {
    Norms out;
    if (m.size() == 0) return out;
    out.frobenius = m.norm();
    out.l1 = m.cwiseAbs().sum();
    out.max_abs = m.cwiseAbs().maxCoeff();
    return out;
}

Matrix center_columns(const Matrix& x) {
    if (x.rows() == 0) throw EmptyDataError("cannot centre a matrix with no rows");
    const Eigen::RowVectorXd means = x.colwise().mean();
    return x.rowwise() - means;
}

Matrix sample_covariance(const Matrix& x, bool center) {
    if (x.rows() == 0 || x.cols() == 0) {
        throw EmptyDataError("sample covariance needs at least one observation and one variable");
    }
    const Matrix xc = center ? center_columns(x) : x;
    Matrix s(x.cols(), x.cols());
    s.setZero();
    s.selfadjointView<Eigen::Upper>().rankUpdate(xc.transpose(),
                                                 1.0 / static_cast<double>(x.rows()));
    mirror_upper(s);
    return s;
}

PowerIterationResult lambda_max_power(const Matrix& s, double tol, std::size_t max_iter) {
    require_square(s, "power iteration input");
    if (!is_symmetric(s)) {
        throw InvalidArgument("power iteration requires a symmetric matrix (max asymmetry " +
                              std::to_string(max_asymmetry(s)) + ")");
    }
    if (!(tol > 0.0)) throw InvalidArgument("power iteration tolerance must be positive");
    if (max_iter == 0) throw InvalidArgument("power iteration needs max_iter >= 1");

    const Eigen::Index p = s.rows();
    PowerIterationResult first = power_from(s, Vector::Ones(p), tol, max_iter);
    if (p == 1) return first;

    Vector alt(p);
    for (Eigen::Index i = 0; i < p; ++i) {
        alt(i) = (i % 2 == 0 ? 1.0 : -1.0) * (1.0 + static_cast<double>(i) / static_cast<double>(p));
    }
    PowerIterationResult second = power_from(s, alt, tol, max_iter);
    PowerIterationResult best = second.value > first.value ? second : first;
    best.iterations = first.iterations + second.iterations;
    best.converged = first.converged && second.converged;
    return best;
}

CholeskyFactor cholesky(const Matrix& s) {
    require_square(s, "Cholesky input");
    if (!is_symmetric(s)) {
        throw InvalidArgument("Cholesky factorisation requires a symmetric matrix");
    }
    const Eigen::Index p = s.rows();
    Matrix l = Matrix::Zero(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        double diag = s(j, j) - l.row(j).head(j).squaredNorm();
        if (!(diag > 1e-12)) throw NotPositiveDefinite(static_cast<std::size_t>(j));
        const double ljj = std::sqrt(diag);
        l(j, j) = ljj;
        for (Eigen::Index i = j + 1; i < p; ++i) {
            l(i, j) = (s(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / ljj;
        }
    }
    return CholeskyFactor(std::move(l));
}

Matrix CholeskyFactor::solve(const Matrix& b) const {
    if (b.rows() != lower_.rows()) {
        throw ShapeError("Cholesky solve: right-hand side has " + std::to_string(b.rows()) +
                         " rows, expected " + std::to_string(lower_.rows()));
    }
    const auto l = lower_.triangularView<Eigen::Lower>();
    Matrix y = l.solve(b);
    return l.transpose().solve(y);
}

Matrix CholeskyFactor::inverse() const {
    Matrix inv = solve(Matrix::Identity(size(), size()));
    mirror_upper(inv);
    return inv;
}

Matrix inverse_spd(const Matrix& s) { return cholesky(s).inverse(); }

}  // namespace diffnet
