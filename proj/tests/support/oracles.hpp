#pragma once

// Test-only reference computations. Everything here is written the slow,
// obvious way and must not call into the code paths it is used to check.

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace diffnet::testing {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline Mat random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(gen);
    }
    return m;
}

inline Mat random_symmetric(Eigen::Index p, std::uint64_t seed) {
    Mat a = random_matrix(p, p, seed);
    Mat s = 0.5 * (a + a.transpose());
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = j + 1; i < p; ++i) s(i, j) = s(j, i);
    }
    return s;
}

// (1/n) sum_i x_i x_i^T accumulated observation by observation.
inline Mat outer_product_covariance(const Mat& x) {
    const Eigen::Index p = x.cols();
    Mat s = Mat::Zero(p, p);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        for (Eigen::Index i = 0; i < p; ++i) {
            for (Eigen::Index j = 0; j < p; ++j) s(i, j) += x(r, i) * x(r, j);
        }
    }
    return s / static_cast<double>(x.rows());
}

inline Mat random_psd(Eigen::Index p, Eigen::Index n, std::uint64_t seed) {
    return outer_product_covariance(random_matrix(n, p, seed));
}

inline Mat naive_matmul(const Mat& a, const Mat& b) {
    Mat c = Mat::Zero(a.rows(), b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (Eigen::Index k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
            c(i, j) = acc;
        }
    }
    return c;
}

// Column-stacking vectorisation.
inline Vec vec(const Mat& m) {
    Vec v(m.size());
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) v(k++) = m(i, j);
    }
    return v;
}

inline Mat kronecker(const Mat& a, const Mat& b) {
    Mat k(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            for (Eigen::Index r = 0; r < b.rows(); ++r) {
                for (Eigen::Index c = 0; c < b.cols(); ++c) {
                    k(i * b.rows() + r, j * b.cols() + c) = a(i, j) * b(r, c);
                }
            }
        }
    }
    return k;
}

// 1/2 vec(D)^T (S2 (x) S1) vec(D) - vec(D)^T vec(S1 - S2)
inline double kronecker_asym_loss(const Mat& s1, const Mat& s2, const Mat& d) {
    const Vec v = vec(d);
    return 0.5 * v.dot(kronecker(s2, s1) * v) - v.dot(vec(s1 - s2));
}

// Symmetric loss as the average of the asymmetric loss at D and D^T.
inline double kronecker_sym_loss(const Mat& s1, const Mat& s2, const Mat& d) {
    return 0.5 * (kronecker_asym_loss(s1, s2, d) + kronecker_asym_loss(s1, s2, d.transpose()));
}

// Largest eigenvalue from a library eigensolver, independent of the power
// iteration and Jacobi code under test.
inline double reference_lambda_max(const Mat& s) {
    Eigen::SelfAdjointEigenSolver<Mat> solver(s, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().maxCoeff();
}

inline double sum_abs(const Mat& m) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) acc += std::abs(m(i, j));
    }
    return acc;
}

inline double relative_frobenius(const Mat& a, const Mat& b) {
    const double scale = std::max(a.norm(), b.norm());
    return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

}  // namespace diffnet::testing
