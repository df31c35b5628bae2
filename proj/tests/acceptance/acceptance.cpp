// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "diffnet/admm.hpp"
#include "diffnet/lossgrad.hpp"
#include "diffnet/matcore.hpp"
#include "diffnet/simgen.hpp"
#include "diffnet/solver.hpp"
#include "support/oracles.hpp"

namespace {

using namespace diffnet;
using diffnet::testing::random_matrix;

struct Verdict {
    bool pass = true;
    std::string detail;
};

constexpr std::uint64_t kSecondGroupOffset = 1000003;

struct Sample {
    Matrix x;
    Matrix y;
};

Sample draw(const SimDesign& design, Eigen::Index n1, Eigen::Index n2, std::uint64_t seed) {
    return {sample_gaussian(design.sigma1, n1, seed),
            sample_gaussian(design.sigma2, n2, seed + kSecondGroupOffset)};
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// 1. dense and low-rank gradients agree
Verdict gradient_modes() {
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const Matrix x = random_matrix(20, 50, 10 + s);
        const Matrix y = random_matrix(20, 50, 50 + s);
        const Matrix delta = random_matrix(50, 50, 90 + s);
        for (LossKind kind : {LossKind::asymmetric, LossKind::symmetric}) {
            const auto dense = GradientEngine::from_data(kind, x, y, ModeSelection::dense);
            const auto low = GradientEngine::from_data(kind, x, y, ModeSelection::low_rank);
            worst = std::max(worst, testing::relative_frobenius(dense.gradient(delta),
                                                                low.gradient(delta)));
        }
    }
    return {worst <= 1e-10, fmt("max relative Frobenius gap %.3g over 40 comparisons", worst)};
}

// 2. Lipschitz inequality and Kronecker eigenvalue
Verdict lipschitz_property() {
    const Matrix x = random_matrix(45, 30, 200);
    const Matrix y = random_matrix(38, 30, 201);
    double worst_ratio = 0.0;
    for (LossKind kind : {LossKind::asymmetric, LossKind::symmetric}) {
        const auto engine = GradientEngine::from_data(kind, x, y);
        const double l = engine.lipschitz();
        for (std::uint64_t s = 0; s < 100; ++s) {
            const Matrix a = random_matrix(30, 30, 1000 + s);
            const Matrix b = random_matrix(30, 30, 2000 + s);
            const double ratio =
                (engine.gradient(a) - engine.gradient(b)).norm() / (l * (a - b).norm());
            worst_ratio = std::max(worst_ratio, ratio);
        }
    }
    const Matrix s1 = testing::random_psd(4, 9, 300);
    const Matrix s2 = testing::random_psd(4, 7, 301);
    const double l4 =
        GradientEngine::from_covariances(LossKind::asymmetric, s1, s2).lipschitz();
    const double kron = testing::reference_lambda_max(testing::kronecker(s2, s1));
    const double rel = std::abs(l4 - kron) / kron;
    return {worst_ratio <= 1.0 && rel <= 1e-8,
            fmt("max ||dG||/(L ||dD||) = %.6f over 200 pairs; p=4 Kronecker gap %.3g", worst_ratio,
                rel)};
}

// 3. FISTA and ADMM reach the same optimum
Verdict solver_agreement() {
    // Both solvers run to rel_tol 1e-10 so the comparison measures the
    // optimum rather than where the objective-change rule happens to stop.
    const SimDesign design = build_design(SimCase::sparse, 40);
    double worst = 0.0;
    double worst_default = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Sample data = draw(design, 60, 60, seed);
        const auto engine = GradientEngine::from_data(LossKind::asymmetric, data.x, data.y,
                                                      ModeSelection::dense);
        const double lambda = 0.75 * engine.lambda_max();
        for (double tol : {1e-10, 1e-5}) {
            SolverConfig fc;
            fc.lambda = lambda;
            fc.rel_tol = tol;
            AdmmConfig ac;
            ac.lambda = lambda;
            ac.rel_tol = tol;
            const double f = fista_solve(engine, fc).objective;
            const double a = admm_solve(engine.s1(), engine.s2(), ac).objective;
            double& slot = tol == 1e-10 ? worst : worst_default;
            slot = std::max(slot, std::abs(f - a) / std::abs(a));
        }
    }
    return {worst <= 1e-4,
            fmt("max relative objective gap %.3g at rel_tol 1e-10 (%.3g at the default 1e-5)",
                worst, worst_default)};
}

// 4. accelerated rate against an ADMM optimum
Verdict convergence_rate() {
    const SimDesign design = build_design(SimCase::sparse, 30);
    const Sample data = draw(design, 60, 60, 77);
    const auto engine = GradientEngine::from_data(LossKind::asymmetric, data.x, data.y,
                                                  ModeSelection::dense);
    const double lambda = 0.75 * engine.lambda_max();

    AdmmConfig ac;
    ac.lambda = lambda;
    ac.rel_tol = 1e-10;
    ac.max_iter = 200000;
    const SolverResult star = admm_solve(engine.s1(), engine.s2(), ac);

    SolverConfig fc;
    fc.lambda = lambda;
    fc.rel_tol = 1e-12;
    fc.max_iter = 5000;
    const SolverResult run = fista_solve(engine, fc);

    const double l = run.lipschitz_used;
    const double r0 = star.delta_hat.squaredNorm();  // Delta_0 = 0
    std::size_t violations = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < run.objective_trace.size(); ++i) {
        const double k = static_cast<double>(i + 1);
        const double bound = 2.0 * l * r0 / ((k + 1.0) * (k + 1.0));
        const double gap = run.objective_trace[i] - star.objective;
        if (gap > bound) ++violations;
        worst = std::max(worst, gap / bound);
    }
    return {violations == 0 && star.converged,
            fmt("%g of %g iterates above the bound; max gap/bound %.4f", double(violations),
                double(run.objective_trace.size()), worst)};
}

// 5. exact zeros
Verdict zero_cases() {
    const SimDesign design = build_design(SimCase::sparse, 25);
    const Sample data = draw(design, 50, 50, 5);
    bool ok = true;
    for (LossKind kind : {LossKind::asymmetric, LossKind::symmetric}) {
        const auto engine = GradientEngine::from_data(kind, data.x, data.y);
        for (double scale : {1.0, 1.5}) {
            SolverConfig c;
            c.lambda = scale * engine.lambda_max();
            ok = ok && fista_solve(engine, c).delta_hat.isZero(0.0);
        }
        const auto same = GradientEngine::from_data(kind, data.x, data.x);
        for (double lambda : {1e-4, 0.1}) {
            SolverConfig c;
            c.lambda = lambda;
            ok = ok && fista_solve(same, c).delta_hat.isZero(0.0);
        }
    }
    const auto asym = GradientEngine::from_data(LossKind::asymmetric, data.x, data.y);
    AdmmConfig ac;
    ac.lambda = asym.lambda_max();
    ok = ok && admm_solve(asym.s1(), asym.s2(), ac).delta_hat.isZero(0.0);
    ac.lambda = 0.01;
    ok = ok && admm_solve(asym.s1(), asym.s1(), ac).delta_hat.isZero(0.0);
    return {ok, "lambda >= lambda_max and identical groups, FISTA (both losses) and ADMM"};
}

// 6. support recovery along the default path
Verdict support_recovery() {
    const SimDesign design = build_design(SimCase::sparse, 100);
    int recovered = 0;
    std::string per;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Sample data = draw(design, 200, 200, seed);
        const auto engine = GradientEngine::from_data(LossKind::symmetric, data.x, data.y);
        const auto grid = lambda_grid(engine.lambda_max());
        const PathResult path = solve_path(engine, grid, SolverConfig{});
        bool hit = false;
        double best_f1 = 0.0;
        for (const auto& s : path.solutions) {
            const SupportMetrics m = support_metrics(s.delta_hat, design.delta_star);
            best_f1 = std::max(best_f1, m.f1);
            if (m.true_positives == 3 && m.false_positives <= 5) hit = true;
        }
        recovered += hit ? 1 : 0;
        per += fmt(" %.2f", best_f1);
    }
    return {recovered >= 8,
            fmt("%g of 10 replicates recover the support; best F1 per replicate:", recovered) + per};
}

// 7. timing order
Verdict complexity_order() {
    using Clock = std::chrono::steady_clock;

    const SimDesign big = build_design(SimCase::sparse, 400);
    const Sample d400 = draw(big, 100, 100, 4);
    const Matrix x400 = center_columns(d400.x);
    const Matrix y400 = center_columns(d400.y);
    double mode_time[2];
    std::size_t mode_iters[2];
    int slot = 0;
    for (GradientMode mode : {GradientMode::low_rank, GradientMode::dense}) {
        const auto start = Clock::now();
        const auto engine = GradientEngine::from_centered_data(LossKind::symmetric, x400, y400, mode);
        const PathResult path = solve_path(engine, lambda_grid(engine.lambda_max()), SolverConfig{});
        mode_time[slot] = seconds_since(start);
        mode_iters[slot] = 0;
        for (const auto& s : path.solutions) mode_iters[slot] += s.iterations;
        ++slot;
    }

    const SimDesign mid = build_design(SimCase::sparse, 200);
    const Sample d200 = draw(mid, 100, 100, 4);
    const Matrix x200 = center_columns(d200.x);
    const Matrix y200 = center_columns(d200.y);
    auto start = Clock::now();
    {
        const auto engine = GradientEngine::from_centered_data(LossKind::asymmetric, x200, y200,
                                                               GradientMode::dense);
        solve_path(engine, lambda_grid(engine.lambda_max()), SolverConfig{});
    }
    const double fista_time = seconds_since(start);
    start = Clock::now();
    {
        const AdmmSolver admm(sample_covariance(x200, false), sample_covariance(y200, false));
        admm.solve_path(lambda_grid(admm.engine().lambda_max()), AdmmConfig{});
    }
    const double admm_time = seconds_since(start);

    const bool ok = mode_time[0] < mode_time[1] && fista_time < admm_time;
    return {ok, fmt("p=400 lowrank %.2fs vs dense %.2fs; ", mode_time[0], mode_time[1]) +
                    fmt("p=200 fista %.2fs vs admm %.2fs", fista_time, admm_time) +
                    fmt(" (iterations lowrank %g, dense %g)", double(mode_iters[0]),
                        double(mode_iters[1]))};
}

// 8. oracle checks
Verdict oracle_suites() {
    std::vector<std::string> failed;

    const Matrix a = random_matrix(3, 3, 400);
    const Matrix d = random_matrix(3, 3, 401);
    const Matrix b = random_matrix(3, 3, 402);
    const double kron = (testing::vec(matmul(matmul(a, d), b)) -
                         testing::kronecker(b.transpose(), a) * testing::vec(d))
                            .cwiseAbs()
                            .maxCoeff();
    if (kron > 1e-12) failed.push_back("kronecker");

    double sylvester = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        const Matrix s1 = testing::random_psd(5, 4, 500 + s);
        const Matrix s2 = testing::random_psd(5, 8, 600 + s);
        const Matrix c = random_matrix(5, 5, 700 + s);
        const Matrix x = solve_sylvester_ridge(s1, s2, c, 0.7);
        sylvester = std::max(sylvester, (s1 * x * s2 + 0.7 * x - c).norm() / c.norm());
    }
    if (sylvester > 1e-8) failed.push_back("sylvester");

    const Matrix sym = testing::random_symmetric(6, 800);
    const EigenDecomposition eig = symmetric_eigen(sym);
    const double jacobi =
        (eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose() - sym).norm();
    if (jacobi > 1e-10) failed.push_back("jacobi");

    const Matrix omega = tridiagonal_precision(5);
    const Matrix l = cholesky(omega).lower();
    const double chol = (l * l.transpose() - omega).cwiseAbs().maxCoeff();
    if (chol > 1e-12) failed.push_back("cholesky");

    double fd = 0.0;
    for (LossKind kind : {LossKind::asymmetric, LossKind::symmetric}) {
        const auto engine = GradientEngine::from_covariances(kind, testing::random_psd(5, 8, 900),
                                                             testing::random_psd(5, 9, 901));
        const Matrix delta = random_matrix(5, 5, 902);
        const Matrix g = engine.gradient(delta);
        const double h = 1e-5;
        for (Eigen::Index i = 0; i < 5; ++i) {
            for (Eigen::Index j = 0; j < 5; ++j) {
                Matrix plus = delta;
                Matrix minus = delta;
                plus(i, j) += h;
                minus(i, j) -= h;
                fd = std::max(fd, std::abs((engine.loss(plus) - engine.loss(minus)) / (2 * h) - g(i, j)));
            }
        }
    }
    if (fd > 1e-5) failed.push_back("finite-difference");

    std::string detail = fmt("kron %.2g, sylvester %.2g, jacobi %.2g", kron, sylvester, jacobi) +
                         fmt(", cholesky %.2g, finite-difference %.2g", chol, fd);
    for (const auto& f : failed) detail += " [" + f + " failed]";
    return {failed.empty(), detail};
}

// 9. design values and grid
Verdict design_fidelity() {
    bool ok = true;
    for (Eigen::Index p : {2, 3, 10, 100}) {
        const Matrix omega = build_design(SimCase::sparse, p).omega1;
        for (Eigen::Index i = 0; i < p; ++i) {
            for (Eigen::Index j = 0; j < p; ++j) {
                double expected = 0.0;
                if (i == j) expected = (i == 0 || i == p - 1) ? 4.0 / 3.0 : 5.0 / 3.0;
                if (std::abs(i - j) == 1) expected = 2.0 / 3.0;
                ok = ok && omega(i, j) == expected;
            }
        }
        Matrix star = Matrix::Zero(p, p);
        star(0, 1) = -1.0;
        star(1, 0) = -1.0;
        star(1, 1) = 2.0;
        ok = ok && build_design(SimCase::sparse, p).delta_star == star &&
             build_design(SimCase::asymptotic_sparse, p).delta_star == star;
    }
    const Sample data = draw(build_design(SimCase::sparse, 20), 40, 40, 9);
    const auto engine = GradientEngine::from_data(LossKind::symmetric, data.x, data.y);
    const double lmax = (engine.s1() - engine.s2()).cwiseAbs().maxCoeff();
    const auto grid = lambda_grid(engine.lambda_max());
    ok = ok && grid.size() == 50 && grid.front() == lmax && grid.back() == lmax / 2.0;
    return {ok, "Omega_1 pattern, Delta* and 50-point grid end points compared exactly"};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"AC1 gradient modes agree", gradient_modes},
        {"AC2 Lipschitz constant", lipschitz_property},
        {"AC3 FISTA/ADMM optimum agreement", solver_agreement},
        {"AC4 accelerated convergence bound", convergence_rate},
        {"AC5 exact zero estimates", zero_cases},
        {"AC6 support recovery", support_recovery},
        {"AC7 complexity ordering", complexity_order},
        {"AC8 oracle suites", oracle_suites},
        {"AC9 design fidelity", design_fidelity},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s  %s: %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
        std::fflush(stdout);
        failures += v.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures == 0 ? 0 : 1;
}
