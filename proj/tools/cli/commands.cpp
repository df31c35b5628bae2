#include "cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli/metadata.hpp"
#include "diffnet/admm.hpp"
#include "diffnet/datapipe.hpp"
#include "diffnet/error.hpp"
#include "diffnet/lossgrad.hpp"
#include "diffnet/simgen.hpp"
#include "diffnet/solver.hpp"

namespace diffnet::cli {

namespace fs = std::filesystem;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Second-group stream for simulated data; the first group uses the seed as is.
std::uint64_t second_group_seed(std::uint64_t seed) { return seed ^ 0x9E3779B97F4A7C15ULL; }

struct InputOptions {
    std::string x;
    std::string y;
    std::string data;
    std::string label;
    std::string delimiter = ",";
    std::string header = "auto";
    bool standardize = false;
    bool npn = false;
};

struct EstimateOptions {
    InputOptions input;
    std::string loss = "sym";
    std::string solver = "fista";
    std::string mode = "auto";
    double lambda = -1.0;
    double tol = 1e-5;
    std::size_t max_iter = 10000;
    bool symmetrize = false;
    double rho = 1.0;
    std::string out = ".";
    unsigned threads = 1;
};

struct PathOptions {
    EstimateOptions base;
    std::size_t n_lambda = 50;
    double min_ratio = 0.5;
    bool warm_start = true;
};

struct SimulateOptions {
    std::string sim_case = "sparse";
    std::int64_t p = 0;
    std::int64_t n1 = 200;
    std::int64_t n2 = 200;
    std::uint64_t seed = 1;
    std::string out = ".";
};

struct BenchOptions {
    std::vector<std::int64_t> p{100};
    std::size_t reps = 10;
    std::string sim_case = "sparse";
    std::vector<std::string> solvers{"fista"};
    std::vector<std::string> modes{"auto"};
    std::uint64_t seed = 1;
    std::int64_t n1 = 200;
    std::int64_t n2 = 200;
    std::string loss = "sym";
    std::size_t n_lambda = 50;
    double min_ratio = 0.5;
    double tol = 1e-5;
    std::size_t max_iter = 10000;
    std::string out = ".";
};

void add_input_options(CLI::App& cmd, InputOptions& in) {
    auto* x = cmd.add_option("--x", in.x, "CSV file of group 1 (rows = observations)");
    auto* y = cmd.add_option("--y", in.y, "CSV file of group 2");
    auto* data = cmd.add_option("--data", in.data, "single CSV holding both groups");
    auto* label = cmd.add_option("--label", in.label, "label column of --data (two values)");
    x->needs(y);
    y->needs(x);
    data->needs(label);
    label->needs(data);
    data->excludes(x)->excludes(y);
    cmd.add_option("--delimiter", in.delimiter, "field delimiter")
        ->check([](const std::string& s) {
            return s.size() == 1 ? std::string() : std::string("delimiter must be one character");
        });
    cmd.add_option("--header", in.header, "whether inputs carry a header row")
        ->check(CLI::IsMember({"auto", "yes", "no"}));
    cmd.add_flag("--standardize", in.standardize, "centre and scale each variable per group");
    cmd.add_flag("--npn", in.npn, "rank-based non-paranormal transform per group");
}

void add_estimate_options(CLI::App& cmd, EstimateOptions& o) {
    add_input_options(cmd, o.input);
    cmd.add_option("--loss", o.loss, "loss function")->check(CLI::IsMember({"sym", "asym"}));
    cmd.add_option("--solver", o.solver, "optimiser")->check(CLI::IsMember({"fista", "admm"}));
    cmd.add_option("--mode", o.mode, "gradient evaluation")
        ->check(CLI::IsMember({"auto", "dense", "lowrank"}));
    cmd.add_option("--tol", o.tol, "relative objective-change tolerance")
        ->check(CLI::PositiveNumber);
    cmd.add_option("--max-iter", o.max_iter, "iteration cap per lambda")
        ->check(CLI::PositiveNumber);
    cmd.add_flag("--symmetrize", o.symmetrize, "return (D + D^T) / 2");
    cmd.add_option("--rho", o.rho, "ADMM step size")->check(CLI::PositiveNumber);
    cmd.add_option("--out", o.out, "output directory");
    cmd.add_option("--threads", o.threads, "worker threads for cold-start paths")
        ->check(CLI::PositiveNumber);
}

LossKind parse_loss(const std::string& s) {
    return s == "asym" ? LossKind::asymmetric : LossKind::symmetric;
}

ModeSelection parse_mode(const std::string& s) {
    if (s == "dense") return ModeSelection::dense;
    if (s == "lowrank") return ModeSelection::low_rank;
    return ModeSelection::automatic;
}

bool header_for(const std::string& mode, const std::string& path, char delimiter) {
    if (mode == "yes") return true;
    if (mode == "no") return false;
    return csv_has_header(path, delimiter);
}

struct LoadedInput {
    TwoSampleData data;
    std::vector<InputFile> files;
};

LoadedInput load_input(const InputOptions& in) {
    const char delimiter = in.delimiter.front();
    LoadedInput loaded;
    if (!in.data.empty()) {
        loaded.data = load_labelled(in.data, in.label, delimiter);
        loaded.files.push_back({in.data, sha256_file(in.data)});
    } else if (!in.x.empty()) {
        const bool x_header = header_for(in.header, in.x, delimiter);
        const bool y_header = header_for(in.header, in.y, delimiter);
        CsvTable x = load_csv(in.x, x_header, delimiter);
        CsvTable y = load_csv(in.y, y_header, delimiter);
        if (x.values.cols() != y.values.cols()) {
            throw ShapeError("group files have different column counts: " +
                             std::to_string(x.values.cols()) + " vs " +
                             std::to_string(y.values.cols()));
        }
        if (x.values.rows() < 2 || y.values.rows() < 2) {
            throw EmptyDataError("each group needs at least two observations");
        }
        loaded.data = {std::move(x.values), std::move(y.values), std::move(x.names)};
        loaded.files.push_back({in.x, sha256_file(in.x)});
        loaded.files.push_back({in.y, sha256_file(in.y)});
    } else {
        throw UsageError("provide either --x and --y, or --data and --label");
    }
    // standardise first, then the rank transform
    if (in.standardize) {
        loaded.data.x = standardize(loaded.data.x);
        loaded.data.y = standardize(loaded.data.y);
    }
    if (in.npn) {
        loaded.data.x = nonparanormal(loaded.data.x);
        loaded.data.y = nonparanormal(loaded.data.y);
    }
    return loaded;
}

void check_solver_loss(const EstimateOptions& o) {
    if (o.solver == "admm" && o.loss != "asym") {
        throw UsageError("--solver admm supports only --loss asym");
    }
}

void symmetrize_in_place(SolverResult& result, const GradientEngine& engine, double lambda) {
    result.delta_hat = 0.5 * (result.delta_hat + result.delta_hat.transpose());
    mirror_upper(result.delta_hat);
    result.objective = engine.objective(result.delta_hat, lambda);
    if (!result.objective_trace.empty()) result.objective_trace.back() = result.objective;
}

RunMetadata base_metadata(const std::string& command, const EstimateOptions& o,
                          const LoadedInput& input) {
    RunMetadata meta;
    meta.command = command;
    meta.loss_kind = o.loss;
    meta.solver = o.solver;
    meta.inputs = input.files;
    meta.p = input.data.x.cols();
    meta.n1 = input.data.x.rows();
    meta.n2 = input.data.y.rows();
    meta.standardize = o.input.standardize;
    meta.nonparanormal = o.input.npn;
    return meta;
}

fs::path prepare_out(const std::string& dir) {
    fs::path out(dir);
    fs::create_directories(out);
    return out;
}

int cmd_estimate(const EstimateOptions& o, std::ostream& out) {
    check_solver_loss(o);
    if (o.lambda < 0.0) throw UsageError("--lambda must be a nonnegative number");
    const LoadedInput input = load_input(o.input);
    const fs::path dir = prepare_out(o.out);
    RunMetadata meta = base_metadata("estimate", o, input);
    meta.lambda = o.lambda;

    const auto start = Clock::now();
    SolverResult result;
    if (o.solver == "fista") {
        const GradientEngine engine = GradientEngine::from_data(
            parse_loss(o.loss), input.data.x, input.data.y, parse_mode(o.mode));
        SolverConfig config;
        config.lambda = o.lambda;
        config.rel_tol = o.tol;
        config.max_iter = o.max_iter;
        config.symmetrize_output = o.symmetrize;
        result = fista_solve(engine, config);
        meta.mode = std::string(to_string(engine.mode()));
        meta.lambda_max = engine.lambda_max();
    } else {
        const AdmmSolver solver(sample_covariance(input.data.x, true),
                                sample_covariance(input.data.y, true));
        AdmmConfig config;
        config.lambda = o.lambda;
        config.rho = o.rho;
        config.rel_tol = o.tol;
        config.max_iter = o.max_iter;
        result = solver.solve(config);
        if (o.symmetrize) symmetrize_in_place(result, solver.engine(), o.lambda);
        meta.mode = "dense";
        meta.lambda_max = solver.engine().lambda_max();
    }
    meta.wall_time_seconds = seconds_since(start);
    meta.iterations = result.iterations;
    meta.objective = result.objective;
    meta.converged = result.converged;
    meta.lipschitz_used = result.lipschitz_used;

    write_csv(dir / "delta.csv", result.delta_hat);
    write_edges(dir / "edges.csv", result.delta_hat);
    write_metadata(dir / "meta.json", meta);

    out << "estimate: " << (result.converged ? "converged" : "NOT converged") << " after "
        << result.iterations << " iterations, objective " << format_number(result.objective)
        << ", " << count_nonzeros(result.delta_hat) << " nonzeros\n";
    return result.converged ? kExitOk : kExitNotConverged;
}

void write_path_csv(const fs::path& path, const PathResult& result) {
    std::ofstream csv(path);
    if (!csv) throw IoError("cannot write '" + path.string() + "'");
    csv << "lambda,i,j,value\n";
    for (std::size_t k = 0; k < result.grid.size(); ++k) {
        const std::string lambda = format_number(result.grid[k]);
        const Matrix& delta = result.solutions[k].delta_hat;
        const bool upper_only = exactly_symmetric(delta);
        bool any = false;
        for (Eigen::Index i = 0; i < delta.rows(); ++i) {
            for (Eigen::Index j = upper_only ? i : 0; j < delta.cols(); ++j) {
                if (delta(i, j) == 0.0) continue;
                csv << lambda << ',' << i + 1 << ',' << j + 1 << ','
                    << format_number(delta(i, j)) << '\n';
                any = true;
            }
        }
        // an all-zero estimate still gets a marker row so every lambda appears
        if (!any) csv << lambda << ",0,0,0\n";
    }
}

int cmd_path(const PathOptions& po, std::ostream& out) {
    const EstimateOptions& o = po.base;
    check_solver_loss(o);
    const LoadedInput input = load_input(o.input);
    const fs::path dir = prepare_out(o.out);
    RunMetadata meta = base_metadata("path", o, input);
    meta.grid = GridSpec{po.n_lambda, po.min_ratio, po.warm_start};

    const auto start = Clock::now();
    PathResult path;
    if (o.solver == "fista") {
        const GradientEngine engine = GradientEngine::from_data(
            parse_loss(o.loss), input.data.x, input.data.y, parse_mode(o.mode));
        const std::vector<double> grid = lambda_grid(engine.lambda_max(), po.n_lambda, po.min_ratio);
        SolverConfig config;
        config.rel_tol = o.tol;
        config.max_iter = o.max_iter;
        config.symmetrize_output = o.symmetrize;
        path = solve_path(engine, grid, config, po.warm_start, o.threads);
        meta.mode = std::string(to_string(engine.mode()));
        meta.lipschitz_used = kLipschitzInflation * engine.lipschitz();
    } else {
        const AdmmSolver solver(sample_covariance(input.data.x, true),
                                sample_covariance(input.data.y, true));
        const std::vector<double> grid =
            lambda_grid(solver.engine().lambda_max(), po.n_lambda, po.min_ratio);
        AdmmConfig config;
        config.rho = o.rho;
        config.rel_tol = o.tol;
        config.max_iter = o.max_iter;
        path = solver.solve_path(grid, config, po.warm_start);
        if (o.symmetrize) {
            for (std::size_t k = 0; k < grid.size(); ++k) {
                symmetrize_in_place(path.solutions[k], solver.engine(), grid[k]);
            }
        }
        meta.mode = "dense";
    }
    meta.wall_time_seconds = seconds_since(start);
    meta.lambda_max = path.lambda_max;
    bool all_converged = true;
    for (std::size_t k = 0; k < path.grid.size(); ++k) {
        const SolverResult& s = path.solutions[k];
        meta.iterations += s.iterations;
        all_converged = all_converged && s.converged;
        meta.per_lambda.push_back(
            {path.grid[k], s.iterations, s.objective, s.converged, count_nonzeros(s.delta_hat)});
    }
    meta.converged = all_converged;

    write_path_csv(dir / "path.csv", path);
    write_metadata(dir / "meta.json", meta);

    out << "path: " << path.grid.size() << " lambda values from " << format_number(path.grid.front())
        << " to " << format_number(path.grid.back()) << ", " << meta.iterations
        << " iterations in total" << (all_converged ? "" : " (some lambda NOT converged)")
        << '\n';
    return all_converged ? kExitOk : kExitNotConverged;
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
    if (o.p < 2) throw UsageError("--p must be at least 2");
    if (o.n1 < 1 || o.n2 < 1) throw UsageError("--n1 and --n2 must be positive");
    const SimCase sim_case = parse_sim_case(o.sim_case);
    const fs::path dir = prepare_out(o.out);

    const auto start = Clock::now();
    const SimDesign design = build_design(sim_case, o.p);
    const Matrix x = sample_gaussian(design.sigma1, o.n1, o.seed);
    const Matrix y = sample_gaussian(design.sigma2, o.n2, second_group_seed(o.seed));

    std::vector<std::string> names;
    for (std::int64_t j = 1; j <= o.p; ++j) names.push_back("V" + std::to_string(j));
    write_csv(dir / "x.csv", x, names);
    write_csv(dir / "y.csv", y, names);
    write_edges(dir / "truth.csv", design.delta_star);

    RunMetadata meta;
    meta.command = "simulate";
    meta.seed = o.seed;
    meta.p = o.p;
    meta.n1 = o.n1;
    meta.n2 = o.n2;
    meta.sim_case = o.sim_case;
    meta.wall_time_seconds = seconds_since(start);
    write_metadata(dir / "meta.json", meta);

    out << "simulate: wrote " << o.n1 << "x" << o.p << " and " << o.n2 << "x" << o.p
        << " samples (" << o.sim_case << " case) to " << dir.string() << '\n';
    return kExitOk;
}

int cmd_bench(const BenchOptions& o, std::ostream& out) {
    const SimCase sim_case = parse_sim_case(o.sim_case);
    for (const auto& s : o.solvers) {
        if (s != "fista" && s != "admm") throw UsageError("unknown solver '" + s + "'");
    }
    for (const auto& m : o.modes) {
        if (m != "auto" && m != "dense" && m != "lowrank") {
            throw UsageError("unknown mode '" + m + "'");
        }
    }
    for (auto p : o.p) {
        if (p < 2) throw UsageError("--p values must be at least 2");
    }
    const fs::path dir = prepare_out(o.out);
    std::ofstream csv(dir / "bench.csv");
    if (!csv) throw IoError("cannot write bench.csv");
    csv << "solver,mode,p,rep,seconds,iterations_total\n";

    for (const std::int64_t p : o.p) {
        const SimDesign design = build_design(sim_case, p);
        for (std::size_t rep = 0; rep < o.reps; ++rep) {
            const std::uint64_t seed = o.seed + rep;
            const Matrix x = center_columns(sample_gaussian(design.sigma1, o.n1, seed));
            const Matrix y = center_columns(sample_gaussian(design.sigma2, o.n2, second_group_seed(seed)));

            for (const auto& solver : o.solvers) {
                if (solver == "admm") {
                    const auto start = Clock::now();
                    const AdmmSolver admm(sample_covariance(x, false), sample_covariance(y, false));
                    const auto grid = lambda_grid(admm.engine().lambda_max(), o.n_lambda, o.min_ratio);
                    AdmmConfig config;
                    config.rel_tol = o.tol;
                    config.max_iter = o.max_iter;
                    const PathResult path = admm.solve_path(grid, config, true);
                    const double secs = seconds_since(start);
                    std::size_t total = 0;
                    for (const auto& s : path.solutions) total += s.iterations;
                    csv << "admm,dense," << p << ',' << rep << ',' << format_number(secs) << ','
                        << total << '\n';
                    out << "admm p=" << p << " rep=" << rep << ": " << secs << " s\n";
                    continue;
                }
                for (const auto& mode_name : o.modes) {
                    const auto start = Clock::now();
                    const GradientMode mode =
                        select_mode(parse_mode(mode_name), x.rows(), y.rows(), p);
                    const GradientEngine engine =
                        GradientEngine::from_centered_data(parse_loss(o.loss), x, y, mode);
                    const auto grid = lambda_grid(engine.lambda_max(), o.n_lambda, o.min_ratio);
                    SolverConfig config;
                    config.rel_tol = o.tol;
                    config.max_iter = o.max_iter;
                    const PathResult path = solve_path(engine, grid, config, true);
                    const double secs = seconds_since(start);
                    std::size_t total = 0;
                    for (const auto& s : path.solutions) total += s.iterations;
                    csv << "fista," << to_string(mode) << ',' << p << ',' << rep << ','
                        << format_number(secs) << ',' << total << '\n';
                    out << "fista/" << to_string(mode) << " p=" << p << " rep=" << rep << ": "
                        << secs << " s\n";
                }
            }
        }
    }
    return kExitOk;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"diffnet: sparse differential network estimation"};
    app.name("diffnet");
    app.require_subcommand(1);

    EstimateOptions estimate;
    auto* est = app.add_subcommand("estimate", "estimate Delta at one lambda");
    add_estimate_options(*est, estimate);
    est->add_option("--lambda", estimate.lambda, "penalty level")
        ->required()
        ->check(CLI::NonNegativeNumber);

    PathOptions path;
    auto* pth = app.add_subcommand("path", "solve a decreasing lambda grid");
    add_estimate_options(*pth, path.base);
    pth->add_option("--nlambda", path.n_lambda, "grid size")->check(CLI::PositiveNumber);
    pth->add_option("--lambda-min-ratio", path.min_ratio, "smallest lambda / lambda_max")
        ->check(CLI::Range(0.0, 1.0));
    pth->add_flag("--warm-start,!--no-warm-start", path.warm_start,
                  "start each lambda from the previous estimate (default on)");

    SimulateOptions simulate;
    auto* sim = app.add_subcommand("simulate", "draw two-sample data from a simulation design");
    sim->add_option("--case", simulate.sim_case, "design")
        ->check(CLI::IsMember({"sparse", "asymsparse"}));
    sim->add_option("--p", simulate.p, "dimension")->required();
    sim->add_option("--n1", simulate.n1, "group 1 sample size");
    sim->add_option("--n2", simulate.n2, "group 2 sample size");
    sim->add_option("--seed", simulate.seed, "random seed");
    sim->add_option("--out", simulate.out, "output directory");

    BenchOptions bench;
    auto* bch = app.add_subcommand("bench", "time full solution paths on simulated data");
    bch->add_option("--p", bench.p, "dimensions, comma separated")->delimiter(',');
    bch->add_option("--reps", bench.reps, "replicates per dimension");
    bch->add_option("--case", bench.sim_case, "design")
        ->check(CLI::IsMember({"sparse", "asymsparse"}));
    bch->add_option("--solver", bench.solvers, "fista and/or admm")->delimiter(',');
    bch->add_option("--mode", bench.modes, "auto, dense and/or lowrank (fista only)")
        ->delimiter(',');
    bch->add_option("--seed", bench.seed, "base seed; replicate r uses seed + r");
    bch->add_option("--n1", bench.n1, "group 1 sample size");
    bch->add_option("--n2", bench.n2, "group 2 sample size");
    bch->add_option("--loss", bench.loss, "FISTA loss")->check(CLI::IsMember({"sym", "asym"}));
    bch->add_option("--nlambda", bench.n_lambda, "grid size")->check(CLI::PositiveNumber);
    bch->add_option("--lambda-min-ratio", bench.min_ratio, "smallest lambda / lambda_max")
        ->check(CLI::Range(0.0, 1.0));
    bch->add_option("--tol", bench.tol, "relative objective-change tolerance")
        ->check(CLI::PositiveNumber);
    bch->add_option("--max-iter", bench.max_iter, "iteration cap per lambda")
        ->check(CLI::PositiveNumber);
    bch->add_option("--out", bench.out, "output directory");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << sub->help();
        return kExitUsage;
    }

    try {
        if (est->parsed()) return cmd_estimate(estimate, out);
        if (pth->parsed()) return cmd_path(path, out);
        if (sim->parsed()) return cmd_simulate(simulate, out);
        if (bch->parsed()) return cmd_bench(bench, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return kExitData;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
    err << app.help();
    return kExitUsage;
}

}  // namespace diffnet::cli
