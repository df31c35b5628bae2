#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "diffnet/matcore.hpp"

namespace diffnet::cli {

struct InputFile {
    std::string path;
    std::string sha256;
};

struct LambdaSummary {
    double lambda = 0.0;
    std::size_t iterations = 0;
    double objective = 0.0;
    bool converged = false;
    std::size_t nonzeros = 0;
};

struct GridSpec {
    std::size_t n_lambda = 0;
    double min_ratio = 0.0;
    bool warm_start = true;
};

// Sidecar written next to every command's outputs as meta.json.
struct RunMetadata {
    std::string command;
    std::optional<std::string> loss_kind;
    std::optional<std::string> solver;
    std::optional<std::string> mode;
    std::optional<double> lambda;
    std::optional<GridSpec> grid;
    std::optional<double> lambda_max;
    std::size_t iterations = 0;
    std::optional<double> objective;
    bool converged = true;
    double wall_time_seconds = 0.0;
    std::optional<double> lipschitz_used;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> sim_case;
    std::vector<InputFile> inputs;
    std::optional<std::int64_t> p;
    std::optional<std::int64_t> n1;
    std::optional<std::int64_t> n2;
    bool standardize = false;
    bool nonparanormal = false;
    std::vector<LambdaSummary> per_lambda;
};

nlohmann::json to_json(const RunMetadata& meta);
void write_metadata(const std::filesystem::path& path, const RunMetadata& meta);

// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

// Edge list "i,j,value" with 1-based indices and nonzero values only. When
// the matrix is exactly symmetric only the upper triangle (with diagonal) is
// listed.
void write_edges(const std::filesystem::path& path, const Matrix& delta);
// Inverse of write_edges for a p x p matrix; mirrors when `symmetric`.
Matrix read_edges(const std::filesystem::path& path, Eigen::Index p, bool symmetric);

bool exactly_symmetric(const Matrix& m);
std::size_t count_nonzeros(const Matrix& m);

}  // namespace diffnet::cli
