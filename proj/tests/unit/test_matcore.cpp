#include <cmath>

#include <gtest/gtest.h>

#include "diffnet/error.hpp"
#include "diffnet/matcore.hpp"
#include "diffnet/simgen.hpp"
#include "support/oracles.hpp"

namespace diffnet {
namespace {

using testing::random_matrix;
using testing::random_psd;
using testing::random_symmetric;

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        Eigen::Index j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

TEST(SoftThreshold, HandExample) {
    EXPECT_EQ(soft_threshold(mat({{3, -2}, {0.5, 0}}), 1.0), mat({{2, -1}, {0, 0}}));
}

TEST(SoftThreshold, ZeroTauIsIdentity) {
    const Matrix m = random_matrix(4, 3, 1);
    EXPECT_EQ(soft_threshold(m, 0.0), m);
}

TEST(SoftThreshold, LargeTauGivesZero) {
    const Matrix m = random_matrix(5, 5, 2);
    EXPECT_TRUE(soft_threshold(m, m.cwiseAbs().maxCoeff()).isZero(0.0));
}

TEST(SoftThreshold, NegativeTauThrows) {
    EXPECT_THROW(soft_threshold(Matrix::Ones(2, 2), -0.1), InvalidArgument);
}

TEST(SoftThreshold, IsContraction) {
    for (std::uint64_t s = 0; s < 50; ++s) {
        const Matrix a = random_matrix(6, 6, 100 + s);
        const Matrix b = random_matrix(6, 6, 200 + s);
        const double tau = 0.05 * static_cast<double>(s % 20);
        EXPECT_LE((soft_threshold(a, tau) - soft_threshold(b, tau)).norm(),
                  (a - b).norm() + 1e-15);
    }
}

TEST(Matmul, IdentityAndHandExample) {
    const Matrix m = random_matrix(2, 3, 3);
    EXPECT_EQ(matmul(Matrix::Identity(2, 2), m), m);
    EXPECT_EQ(matmul(mat({{1, 2}, {3, 4}}), mat({{0, 1}, {1, 0}})), mat({{2, 1}, {4, 3}}));
}

TEST(Matmul, MatchesTripleLoop) {
    const Matrix a = random_matrix(5, 4, 4);
    const Matrix b = random_matrix(4, 3, 5);
    EXPECT_LE((matmul(a, b) - testing::naive_matmul(a, b)).cwiseAbs().maxCoeff(), 1e-12);
    const Matrix c = random_matrix(5, 3, 6);
    EXPECT_LE((matmul_tn(a, c) - testing::naive_matmul(a.transpose(), c)).cwiseAbs().maxCoeff(),
              1e-12);
    const Matrix d = random_matrix(2, 4, 7);
    EXPECT_LE((matmul_nt(a, d) - testing::naive_matmul(a, d.transpose())).cwiseAbs().maxCoeff(),
              1e-12);
}

TEST(Matmul, ShapeMismatchThrows) {
    EXPECT_THROW(matmul(Matrix::Ones(2, 3), Matrix::Ones(2, 3)), ShapeError);
    EXPECT_THROW(matmul_tn(Matrix::Ones(2, 3), Matrix::Ones(3, 3)), ShapeError);
    EXPECT_THROW(matmul_nt(Matrix::Ones(2, 3), Matrix::Ones(3, 2)), ShapeError);
}

TEST(Matmul, KroneckerVecIdentity) {
    const Matrix a = random_matrix(3, 3, 8);
    const Matrix d = random_matrix(3, 3, 9);
    const Matrix b = random_matrix(3, 3, 10);
    const Vector lhs = testing::vec(matmul(matmul(a, d), b));
    const Vector rhs = testing::kronecker(b.transpose(), a) * testing::vec(d);
    EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Norms, Examples) {
    const Norms zero = norms(Matrix::Zero(3, 2));
    EXPECT_EQ(zero.frobenius, 0.0);
    EXPECT_EQ(zero.l1, 0.0);
    EXPECT_EQ(zero.max_abs, 0.0);

    const Norms eye = norms(Matrix::Identity(3, 3));
    EXPECT_DOUBLE_EQ(eye.frobenius, std::sqrt(3.0));
    EXPECT_EQ(eye.l1, 3.0);
    EXPECT_EQ(eye.max_abs, 1.0);

    const Norms m = norms(mat({{1, -2}, {3, -4}}));
    EXPECT_DOUBLE_EQ(m.frobenius, std::sqrt(30.0));
    EXPECT_EQ(m.l1, 10.0);
    EXPECT_EQ(m.max_abs, 4.0);
}

TEST(SampleCovariance, PrecenteredExample) {
    EXPECT_EQ(sample_covariance(mat({{1, -1}, {-1, 1}}), false), mat({{1, -1}, {-1, 1}}));
}

TEST(SampleCovariance, ConstantColumnCentredIsZero) {
    Matrix x = random_matrix(8, 3, 11);
    x.col(1).setConstant(4.5);
    const Matrix s = sample_covariance(x, true);
    EXPECT_LE(s.row(1).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE(s.col(1).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SampleCovariance, MatchesOuterProductSum) {
    const Matrix x = random_matrix(10, 4, 12);
    EXPECT_LE((sample_covariance(x, false) - testing::outer_product_covariance(x))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-12);
    const Matrix centred = center_columns(x);
    EXPECT_LE(centred.colwise().sum().cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((sample_covariance(x, true) - testing::outer_product_covariance(centred))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-12);
}

TEST(SampleCovariance, ExactlySymmetricAndPsd) {
    const Matrix s = sample_covariance(random_matrix(7, 12, 13), true);
    EXPECT_EQ(s, s.transpose());
    for (std::uint64_t k = 0; k < 100; ++k) {
        const Vector v = random_matrix(12, 1, 500 + k);
        EXPECT_GE(v.dot(s * v), -1e-10);
    }
}

TEST(SampleCovariance, NoRowsThrows) {
    EXPECT_THROW(sample_covariance(Matrix(0, 3), true), EmptyDataError);
}

TEST(PowerIteration, Examples) {
    EXPECT_NEAR(lambda_max_power(Matrix::Identity(5, 5)).value, 1.0, 1e-12);
    Matrix d = Matrix::Zero(3, 3);
    d.diagonal() << 1, 2, 3;
    EXPECT_NEAR(lambda_max_power(d, 1e-12, 10000).value, 3.0, 1e-8);
    const PowerIterationResult r = lambda_max_power(mat({{1, 0.5}, {0.5, 1}}));
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, 1.5, 1e-8);
}

TEST(PowerIteration, MatchesEigensolverOnSmallMatrices) {
    for (Eigen::Index p = 2; p <= 6; ++p) {
        for (std::uint64_t s = 0; s < 5; ++s) {
            const Matrix m = random_psd(p, p + 3, 1000 * p + s);
            const double ref = testing::reference_lambda_max(m);
            const PowerIterationResult r = lambda_max_power(m, 1e-13, 100000);
            EXPECT_LE(std::abs(r.value - ref) / ref, 1e-8) << "p=" << p << " seed=" << s;
        }
    }
}

TEST(PowerIteration, StartOrthogonalToLeadingVector) {
    // leading eigenvector (1,-1)/sqrt 2 is orthogonal to the all-ones start
    const PowerIterationResult r = lambda_max_power(mat({{1, -0.5}, {-0.5, 1}}));
    EXPECT_NEAR(r.value, 1.5, 1e-8);
}

TEST(PowerIteration, RejectsAsymmetric) {
    EXPECT_THROW(lambda_max_power(mat({{1, 0.2}, {0.1, 1}})), InvalidArgument);
}

TEST(PowerIteration, FlagsNonConvergence) {
    const Matrix m = random_psd(20, 25, 14);
    EXPECT_FALSE(lambda_max_power(m, 1e-15, 2).converged);
}

TEST(Cholesky, Examples) {
    EXPECT_EQ(cholesky(Matrix::Identity(3, 3)).lower(), Matrix::Identity(3, 3));
    const CholeskyFactor f = cholesky(mat({{4, 2}, {2, 5}}));
    EXPECT_LE((f.lower() - mat({{2, 0}, {1, 2}})).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(f.size(), 2);
}

TEST(Cholesky, ReconstructsTridiagonalPrecision) {
    const Matrix omega = tridiagonal_precision(5);
    const Matrix l = cholesky(omega).lower();
    EXPECT_LE((l * l.transpose() - omega).cwiseAbs().maxCoeff(), 1e-12);
    for (Eigen::Index i = 0; i < 5; ++i) {
        EXPECT_GT(l(i, i), 0.0);
        for (Eigen::Index j = i + 1; j < 5; ++j) EXPECT_EQ(l(i, j), 0.0);
    }
}

TEST(Cholesky, InverseAndSolve) {
    const Eigen::Index p = 8;
    const Matrix s = random_psd(p, 20, 15) + 0.1 * Matrix::Identity(p, p);
    const Matrix inv = inverse_spd(s);
    EXPECT_EQ(inv, inv.transpose());
    EXPECT_LE((s * inv - Matrix::Identity(p, p)).norm(), 1e-8 * p);
    const Matrix b = random_matrix(p, 2, 16);
    EXPECT_LE((s * cholesky(s).solve(b) - b).norm(), 1e-10 * b.norm());
}

TEST(Cholesky, NotPositiveDefiniteNamesPivot) {
    try {
        cholesky(mat({{1, 0, 0}, {0, 1, 1}, {0, 1, 1}}));
        FAIL() << "expected NotPositiveDefinite";
    } catch (const NotPositiveDefinite& e) {
        EXPECT_EQ(e.pivot(), 2u);
        EXPECT_EQ(e.kind(), ErrorKind::not_positive_definite);
    }
}

TEST(Validation, SymmetryAndFinite) {
    Matrix s = random_symmetric(4, 17);
    EXPECT_TRUE(is_symmetric(s));
    s(0, 1) += 1e-9;
    EXPECT_FALSE(is_symmetric(s));
    EXPECT_NEAR(max_asymmetry(s), 1e-9, 1e-15);
    mirror_upper(s);
    EXPECT_EQ(s, s.transpose());

    Matrix bad = Matrix::Ones(2, 2);
    bad(1, 0) = std::nan("");
    EXPECT_THROW(require_finite(bad, "m"), InvalidArgument);
    EXPECT_THROW(require_square(Matrix::Ones(2, 3), "m"), ShapeError);
    EXPECT_THROW(require_square(Matrix(0, 0), "m"), ShapeError);
}

}  // namespace
}  // namespace diffnet
