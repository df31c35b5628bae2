#include "diffnet/solver.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>
#include <string>
#include <thread>

#include "diffnet/error.hpp"

namespace diffnet {

namespace {

std::string lambda_tag(double lambda) {
    std::ostringstream os;
    os.precision(17);
    os << "lambda=" << lambda << ": ";
    return os.str();
}

SolverResult solve_at(const GradientEngine& engine, const SolverConfig& base, double lambda,
                      const Matrix* start) {
    SolverConfig config = base;
    config.lambda = lambda;
    try {
        return start ? fista_solve(engine, config, *start) : fista_solve(engine, config);
    } catch (const Error& e) {
        throw Error(e.kind(), lambda_tag(lambda) + e.what());
    }
}

}  // namespace

void SolverConfig::validate() const {
    if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be nonnegative");
    if (!(rel_tol > 0.0)) throw InvalidArgument("rel_tol must be positive");
    if (max_iter < 1) throw InvalidArgument("max_iter must be at least 1");
}

double momentum_next(double t) {
    if (!(t >= 1.0)) {
        throw InvalidArgument("momentum parameter must be >= 1, got " + std::to_string(t));
    }
    return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
}

bool objective_converged(double previous, double next, double rel_tol) noexcept {
    return std::abs(previous - next) < rel_tol * (std::abs(previous) + 1.0);
}

SolverResult fista_solve(const GradientEngine& engine, const SolverConfig& config) {
    return fista_solve(engine, config, Matrix::Zero(engine.dim(), engine.dim()));
}

SolverResult fista_solve(const GradientEngine& engine, const SolverConfig& config,
                         const Matrix& delta0) {
    config.validate();
    if (delta0.rows() != engine.dim() || delta0.cols() != engine.dim()) {
        throw ShapeError("initial Delta has the wrong shape");
    }
    require_finite(delta0, "initial Delta");

    const double step_l = kLipschitzInflation * engine.lipschitz();
    const double lambda = config.lambda;
    const double threshold = lambda / step_l;

    // H is linear, so the curvature at the extrapolated point is the same
    // extrapolation of the curvatures at the last two iterates. One product
    // per iteration then serves both the objective at D_{k+1} and the next
    // gradient.
    Matrix previous = delta0;
    Matrix current = delta0;
    GradientEngine::Evaluation eval = engine.evaluate(current);
    Matrix curv_previous = eval.curvature;
    Matrix curv_current = std::move(eval.curvature);
    double f_current = eval.loss + lambda * current.cwiseAbs().sum();

    SolverResult result;
    result.lipschitz_used = step_l;
    result.objective_trace.reserve(std::min<std::size_t>(config.max_iter, 1024));

    double t_previous = 1.0;
    double t = 1.0;
    for (std::size_t iter = 1; iter <= config.max_iter; ++iter) {
        const double beta = (t_previous - 1.0) / t;
        Matrix lookahead = current;
        Matrix curv_lookahead = curv_current;
        if (beta != 0.0) {
            lookahead += beta * (current - previous);
            curv_lookahead += beta * (curv_current - curv_previous);
        }
        // D' - grad / L with grad = H(D') - (S1 - S2)
        lookahead -= (curv_lookahead - engine.diff()) / step_l;
        Matrix next = soft_threshold(lookahead, threshold);

        GradientEngine::Evaluation next_eval = engine.evaluate(next);
        const double f_next = next_eval.loss + lambda * next.cwiseAbs().sum();
        if (!std::isfinite(f_next)) throw DivergenceError(iter);
        result.objective_trace.push_back(f_next);
        result.iterations = iter;

        t_previous = t;
        t = momentum_next(t);
        previous = std::move(current);
        current = std::move(next);
        curv_previous = std::move(curv_current);
        curv_current = std::move(next_eval.curvature);

        const bool done = objective_converged(f_current, f_next, config.rel_tol);
        f_current = f_next;
        if (done) {
            result.converged = true;
            break;
        }
    }

    if (config.symmetrize_output) {
        result.delta_hat = 0.5 * (current + current.transpose());
        mirror_upper(result.delta_hat);
    } else {
        result.delta_hat = std::move(current);
    }
    result.objective = engine.objective(result.delta_hat, lambda);
    if (result.objective_trace.empty()) {
        result.objective_trace.push_back(result.objective);
    } else {
        result.objective_trace.back() = result.objective;
    }
    return result;
}

std::vector<double> lambda_grid(double lambda_max, std::size_t n_lambda, double min_ratio) {
    if (n_lambda < 1) throw InvalidArgument("lambda grid needs at least one value");
    if (!(min_ratio > 0.0 && min_ratio <= 1.0)) {
        throw InvalidArgument("lambda min ratio must lie in (0, 1], got " +
                              std::to_string(min_ratio));
    }
    if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) {
        throw InvalidArgument("lambda_max must be positive and finite");
    }
    if (n_lambda > 1 && min_ratio == 1.0) {
        throw InvalidArgument("a grid with more than one value needs min ratio < 1");
    }
    std::vector<double> grid(n_lambda);
    grid.front() = lambda_max;
    if (n_lambda == 1) return grid;
    const double lambda_min = min_ratio * lambda_max;
    const double span = lambda_max - lambda_min;
    const double last = static_cast<double>(n_lambda - 1);
    for (std::size_t i = 1; i + 1 < n_lambda; ++i) {
        grid[i] = lambda_max - span * (static_cast<double>(i) / last);
    }
    grid.back() = lambda_min;
    return grid;
}

void require_decreasing(std::span<const double> grid) {
    if (grid.empty()) throw InvalidArgument("lambda grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0.0) || !std::isfinite(grid[i])) {
            throw InvalidArgument("lambda grid values must be finite and nonnegative");
        }
        if (i > 0 && !(grid[i] < grid[i - 1])) {
            throw InvalidArgument("lambda grid must be strictly decreasing");
        }
    }
}

PathResult solve_path(const GradientEngine& engine, std::span<const double> grid,
                      const SolverConfig& config, bool warm_start, unsigned threads) {
    require_decreasing(grid);
    config.validate();

    PathResult path;
    path.grid.assign(grid.begin(), grid.end());
    path.lambda_max = engine.lambda_max();
    path.solutions.resize(grid.size());

    if (warm_start || threads <= 1 || grid.size() == 1) {
        const Matrix* start = nullptr;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            path.solutions[i] = solve_at(engine, config, grid[i], start);
            if (warm_start) start = &path.solutions[i].delta_hat;
        }
        return path;
    }

    engine.lipschitz();  // surface degenerate-data errors before fanning out
    const std::size_t workers = std::min<std::size_t>(threads, grid.size());
    std::vector<std::exception_ptr> failures(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < grid.size(); i += workers) {
                        path.solutions[i] = solve_at(engine, config, grid[i], nullptr);
                    }
                } catch (...) {
                    failures[w] = std::current_exception();
                }
            });
        }
    }
    for (const auto& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }
    return path;
}

}  // namespace diffnet
