#include "diffnet/lossgrad.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include "diffnet/error.hpp"

namespace diffnet {

struct GradientEngine::LipschitzCache {
    std::once_flag once;
    double value = 0.0;
};

namespace {

constexpr double kPowerTol = 1e-12;
constexpr std::size_t kPowerMaxIter = 20000;

// Largest eigenvalue of a PSD covariance. Falls back to min(trace, largest
// absolute row sum), both upper bounds, if power iteration stalls.
double top_eigenvalue(const Matrix& s) {
    const PowerIterationResult power = lambda_max_power(s, kPowerTol, kPowerMaxIter);
    if (power.converged) return power.value;
    const double row_bound = s.cwiseAbs().rowwise().sum().maxCoeff();
    return std::min(s.trace(), row_bound);
}

}  // namespace

std::string_view to_string(LossKind kind) noexcept {
    return kind == LossKind::asymmetric ? "asym" : "sym";
}

std::string_view to_string(GradientMode mode) noexcept {
    return mode == GradientMode::dense ? "dense" : "lowrank";
}

GradientMode select_mode(ModeSelection selection, Eigen::Index n1, Eigen::Index n2,
                         Eigen::Index p) noexcept {
    switch (selection) {
        case ModeSelection::dense: return GradientMode::dense;
        case ModeSelection::low_rank: return GradientMode::low_rank;
        case ModeSelection::automatic: break;
    }
    return n1 + n2 < p ? GradientMode::low_rank : GradientMode::dense;
}

GradientEngine::GradientEngine(LossKind kind, GradientMode mode, Matrix s1, Matrix s2,
                               Matrix x, Matrix y)
    : kind_(kind),
      mode_(mode),
      s1_(std::move(s1)),
      s2_(std::move(s2)),
      x_(std::move(x)),
      y_(std::move(y)),
      diff_(s1_ - s2_),
      lipschitz_(std::make_shared<LipschitzCache>()) {
    lambda_max_ = diff_.cwiseAbs().maxCoeff();
    if (mode_ == GradientMode::low_rank) {
        inv_n1n2_ = 1.0 / (static_cast<double>(x_.rows()) * static_cast<double>(y_.rows()));
    }
}

GradientEngine GradientEngine::from_covariances(LossKind kind, Matrix s1, Matrix s2) {
    require_square(s1, "S1");
    require_square(s2, "S2");
    if (s1.rows() != s2.rows()) {
        throw ShapeError("S1 is " + std::to_string(s1.rows()) + "x" + std::to_string(s1.rows()) +
                         " but S2 is " + std::to_string(s2.rows()) + "x" +
                         std::to_string(s2.rows()));
    }
    require_finite(s1, "S1");
    require_finite(s2, "S2");
    if (!is_symmetric(s1) || !is_symmetric(s2)) {
        throw InvalidArgument("covariance matrices must be symmetric");
    }
    return GradientEngine(kind, GradientMode::dense, std::move(s1), std::move(s2), Matrix(),
                          Matrix());
}

GradientEngine GradientEngine::from_centered_data(LossKind kind, Matrix x, Matrix y,
                                                  GradientMode mode) {
    if (x.rows() == 0 || y.rows() == 0 || x.cols() == 0) {
        throw EmptyDataError("both groups need at least one observation and one variable");
    }
    if (x.cols() != y.cols()) {
        throw ShapeError("groups have different variable counts: " + std::to_string(x.cols()) +
                         " vs " + std::to_string(y.cols()));
    }
    require_finite(x, "X");
    require_finite(y, "Y");
    Matrix s1 = sample_covariance(x, false);
    Matrix s2 = sample_covariance(y, false);
    if (mode == GradientMode::dense) {
        return GradientEngine(kind, mode, std::move(s1), std::move(s2), Matrix(), Matrix());
    }
    return GradientEngine(kind, mode, std::move(s1), std::move(s2), std::move(x), std::move(y));
}

GradientEngine GradientEngine::from_data(LossKind kind, const Matrix& x, const Matrix& y,
                                         ModeSelection selection) {
    if (x.rows() == 0 || y.rows() == 0) {
        throw EmptyDataError("both groups need at least one observation");
    }
    const GradientMode mode = select_mode(selection, x.rows(), y.rows(), x.cols());
    return from_centered_data(kind, center_columns(x), center_columns(y), mode);
}

void GradientEngine::check_delta(const Matrix& delta) const {
    if (delta.rows() != dim() || delta.cols() != dim()) {
        throw ShapeError("Delta must be " + std::to_string(dim()) + "x" +
                         std::to_string(dim()) + ", got " + std::to_string(delta.rows()) +
                         "x" + std::to_string(delta.cols()));
    }
}

Matrix GradientEngine::dense_product(const Matrix& delta) const {
    Matrix tmp(dim(), dim());
    tmp.noalias() = s1_ * delta;
    Matrix out(dim(), dim());
    out.noalias() = tmp * s2_;
    return out;
}

Matrix GradientEngine::low_rank_product(const Matrix& delta) const {
    const Matrix xd = x_ * delta;                 // n1 x p
    Matrix inner(x_.rows(), y_.rows());
    inner.noalias() = xd * y_.transpose();        // n1 x n2
    const Matrix left = x_.transpose() * inner;   // p x n2
    Matrix out(dim(), dim());
    out.noalias() = left * y_;
    out *= inv_n1n2_;
    return out;
}

Matrix GradientEngine::curvature(const Matrix& delta) const {
    check_delta(delta);
    auto product = [this](const Matrix& d) {
        return mode_ == GradientMode::dense ? dense_product(d) : low_rank_product(d);
    };
    if (kind_ == LossKind::asymmetric) return product(delta);
    // S2 D S1 = (S1 D^T S2)^T
    const Matrix forward = product(delta);
    const Matrix backward = product(delta.transpose());
    return 0.5 * (forward + backward.transpose());
}

Matrix GradientEngine::gradient(const Matrix& delta) const {
    return curvature(delta) - diff_;
}

double GradientEngine::loss(const Matrix& delta) const {
    check_delta(delta);
    const double linear = delta.cwiseProduct(diff_).sum();  // tr(D (S1 - S2)), S1 - S2 symmetric
    if (mode_ == GradientMode::dense) {
        const double forward = delta.cwiseProduct(dense_product(delta)).sum();
        if (kind_ == LossKind::asymmetric) return 0.5 * forward - linear;
        const Matrix dt = delta.transpose();
        const double backward = dt.cwiseProduct(dense_product(dt)).sum();
        return 0.25 * (forward + backward) - linear;
    }
    // tr(D^T S1 D S2) = ||X D Y^T||_F^2 / (n1 n2)
    Matrix xdy(x_.rows(), y_.rows());
    xdy.noalias() = (x_ * delta) * y_.transpose();
    const double forward = xdy.squaredNorm() * inv_n1n2_;
    if (kind_ == LossKind::asymmetric) return 0.5 * forward - linear;
    // tr(D^T S2 D S1) = ||X D^T Y^T||_F^2 / (n1 n2)
    xdy.noalias() = (x_ * delta.transpose()) * y_.transpose();
    const double backward = xdy.squaredNorm() * inv_n1n2_;
    return 0.25 * (forward + backward) - linear;
}

GradientEngine::Evaluation GradientEngine::evaluate(const Matrix& delta) const {
    Evaluation out;
    out.curvature = curvature(delta);
    out.loss = 0.5 * delta.cwiseProduct(out.curvature).sum() - delta.cwiseProduct(diff_).sum();
    return out;
}

double GradientEngine::objective(const Matrix& delta, double lambda) const {
    if (!(lambda >= 0.0)) {
        throw InvalidArgument("penalty lambda must be nonnegative, got " + std::to_string(lambda));
    }
    return loss(delta) + lambda * delta.cwiseAbs().sum();
}

double GradientEngine::lipschitz() const {
    std::call_once(lipschitz_->once, [this] {
        const double top1 = top_eigenvalue(s1_);
        const double top2 = top_eigenvalue(s2_);
        if (!(top1 > 0.0) || !(top2 > 0.0)) {
            throw DegenerateDataError(
                "a sample covariance is zero (all observations constant in one group)");
        }
        lipschitz_->value = top1 * top2;
    });
    return lipschitz_->value;
}

}  // namespace diffnet
