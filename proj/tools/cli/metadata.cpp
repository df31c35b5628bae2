#include "cli/metadata.hpp"

#include <array>
#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "diffnet/datapipe.hpp"
#include "diffnet/error.hpp"

namespace diffnet::cli {

namespace {

template <typename T>
void put(nlohmann::json& j, const char* key, const std::optional<T>& value) {
    if (value) j[key] = *value;
}

}  // namespace

nlohmann::json to_json(const RunMetadata& meta) {
    nlohmann::json j;
    j["command"] = meta.command;
    put(j, "loss_kind", meta.loss_kind);
    put(j, "solver", meta.solver);
    put(j, "mode", meta.mode);
    put(j, "lambda", meta.lambda);
    if (meta.grid) {
        j["grid"] = {{"n_lambda", meta.grid->n_lambda},
                     {"min_ratio", meta.grid->min_ratio},
                     {"warm_start", meta.grid->warm_start}};
    }
    put(j, "lambda_max", meta.lambda_max);
    j["iterations"] = meta.iterations;
    put(j, "objective", meta.objective);
    j["converged"] = meta.converged;
    j["wall_time_seconds"] = meta.wall_time_seconds;
    put(j, "lipschitz_used", meta.lipschitz_used);
    put(j, "seed", meta.seed);
    put(j, "case", meta.sim_case);
    put(j, "p", meta.p);
    put(j, "n1", meta.n1);
    put(j, "n2", meta.n2);
    j["preprocessing"] = {{"standardize", meta.standardize},
                          {"nonparanormal", meta.nonparanormal}};
    j["inputs"] = nlohmann::json::array();
    for (const auto& in : meta.inputs) {
        j["inputs"].push_back({{"path", in.path}, {"sha256", in.sha256}});
    }
    if (!meta.per_lambda.empty()) {
        auto& rows = j["per_lambda"] = nlohmann::json::array();
        for (const auto& s : meta.per_lambda) {
            rows.push_back({{"lambda", s.lambda},
                            {"iterations", s.iterations},
                            {"objective", s.objective},
                            {"converged", s.converged},
                            {"nonzeros", s.nonzeros}});
        }
    }
    return j;
}

void write_metadata(const std::filesystem::path& path, const RunMetadata& meta) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << to_json(meta).dump(2) << '\n';
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                                &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw IoError("SHA-256 initialisation failed");
    }
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        const auto got = static_cast<std::size_t>(in.gcount());
        if (got > 0) EVP_DigestUpdate(ctx.get(), buf.data(), got);
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

bool exactly_symmetric(const Matrix& m) { return m.rows() == m.cols() && m == m.transpose(); }

std::size_t count_nonzeros(const Matrix& m) {
    return static_cast<std::size_t>((m.array() != 0.0).count());
}

void write_edges(const std::filesystem::path& path, const Matrix& delta) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    const bool upper_only = exactly_symmetric(delta);
    out << "i,j,value\n";
    for (Eigen::Index i = 0; i < delta.rows(); ++i) {
        for (Eigen::Index j = upper_only ? i : 0; j < delta.cols(); ++j) {
            if (delta(i, j) == 0.0) continue;
            out << i + 1 << ',' << j + 1 << ',' << format_number(delta(i, j)) << '\n';
        }
    }
}

Matrix read_edges(const std::filesystem::path& path, Eigen::Index p, bool symmetric) {
    Matrix out = Matrix::Zero(p, p);
    CsvTable table;
    try {
        table = load_csv(path, true);
    } catch (const EmptyDataError&) {
        return out;  // header only: no edges
    }
    for (Eigen::Index r = 0; r < table.values.rows(); ++r) {
        const auto i = static_cast<Eigen::Index>(table.values(r, 0)) - 1;
        const auto j = static_cast<Eigen::Index>(table.values(r, 1)) - 1;
        if (i < 0 || j < 0 || i >= p || j >= p) {
            throw ParseError(static_cast<std::size_t>(r) + 2, 0, "edge index out of range");
        }
        out(i, j) = table.values(r, 2);
        if (symmetric) out(j, i) = table.values(r, 2);
    }
    return out;
}

}  // namespace diffnet::cli
