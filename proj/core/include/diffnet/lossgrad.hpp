#pragma once

// D-trace losses for the differential network Delta = Omega_2 - Omega_1.
//
//   asymmetric:  L(D) = 1/2 tr(D^T S1 D S2) - tr(D (S1 - S2))
//   symmetric:   L(D) = 1/4 tr(D^T S1 D S2) + 1/4 tr(D^T S2 D S1) - tr(D (S1 - S2))
//
// Both are convex quadratics, L(D) = 1/2 <D, H(D)> - <D, S1 - S2>, where the
// curvature operator H is S1 D S2 (asymmetric) or (S1 D S2 + S2 D S1) / 2
// (symmetric). The engine evaluates H either densely, in O(p^3), or through
// the centred n x p data matrices, in O(n p^2):
//
//   S1 D S2 = X^T (X D Y^T) Y / (n1 n2).

#include <memory>
#include <string_view>

#include "diffnet/matcore.hpp"

namespace diffnet {

enum class LossKind { asymmetric, symmetric };
enum class GradientMode { dense, low_rank };
enum class ModeSelection { automatic, dense, low_rank };

std::string_view to_string(LossKind kind) noexcept;
std::string_view to_string(GradientMode mode) noexcept;

// Low-rank evaluation pays off once the pooled sample size is below p.
GradientMode select_mode(ModeSelection selection, Eigen::Index n1, Eigen::Index n2,
                         Eigen::Index p) noexcept;

class GradientEngine {
public:
    struct Evaluation {
        double loss = 0.0;
        Matrix curvature;  // H(D); the gradient is curvature - diff()
    };

    // Dense engine from two symmetric p x p covariance matrices.
    static GradientEngine from_covariances(LossKind kind, Matrix s1, Matrix s2);

    // Engine over already-centred n1 x p and n2 x p data. Covariances are
    // formed once for diff() and the Lipschitz constant.
    static GradientEngine from_centered_data(LossKind kind, Matrix x, Matrix y,
                                             GradientMode mode);

    // Centres x and y, then picks the evaluation mode.
    static GradientEngine from_data(LossKind kind, const Matrix& x, const Matrix& y,
                                    ModeSelection selection = ModeSelection::automatic);

    LossKind kind() const noexcept { return kind_; }
    GradientMode mode() const noexcept { return mode_; }
    Eigen::Index dim() const noexcept { return s1_.rows(); }

    const Matrix& s1() const noexcept { return s1_; }
    const Matrix& s2() const noexcept { return s2_; }
    // S1 - S2
    const Matrix& diff() const noexcept { return diff_; }
    // max |S1 - S2|, the smallest penalty with an all-zero solution
    double lambda_max() const noexcept { return lambda_max_; }

    double loss(const Matrix& delta) const;
    Matrix curvature(const Matrix& delta) const;
    Matrix gradient(const Matrix& delta) const;
    // Loss and H(delta) sharing one curvature product.
    Evaluation evaluate(const Matrix& delta) const;
    // loss + lambda * ||delta||_1
    double objective(const Matrix& delta, double lambda) const;

    // lambda_max(S1) * lambda_max(S2), computed on first use and cached.
    // Thread-safe. Throws DegenerateDataError when either covariance is zero.
    double lipschitz() const;

private:
    struct LipschitzCache;

    GradientEngine(LossKind kind, GradientMode mode, Matrix s1, Matrix s2, Matrix x,
                   Matrix y);

    void check_delta(const Matrix& delta) const;
    Matrix dense_product(const Matrix& delta) const;      // S1 D S2
    Matrix low_rank_product(const Matrix& delta) const;   // X^T (X D Y^T) Y / (n1 n2)

    LossKind kind_;
    GradientMode mode_;
    Matrix s1_;
    Matrix s2_;
    Matrix x_;
    Matrix y_;
    Matrix diff_;
    double lambda_max_ = 0.0;
    double inv_n1n2_ = 0.0;
    std::shared_ptr<LipschitzCache> lipschitz_;
};

}  // namespace diffnet
