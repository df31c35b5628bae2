#include "diffnet/datapipe.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <optional>

#include "diffnet/error.hpp"

namespace diffnet {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string unquote(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return std::string(s);
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delimiter, start);
        if (pos == std::string_view::npos) {
            cells.push_back(line.substr(start));
            return cells;
        }
        cells.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::optional<double> parse_number(std::string_view cell) {
    cell = trim(cell);
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    if (cell.empty()) return std::nullopt;
    double value = 0.0;
    const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || end != cell.data() + cell.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

struct RawLine {
    std::size_t number;  // 1-based physical line
    std::string text;
};

std::vector<RawLine> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::vector<RawLine> lines;
    std::string text;
    std::size_t number = 0;
    while (std::getline(in, text)) {
        ++number;
        if (number == 1 && text.starts_with("\xEF\xBB\xBF")) text.erase(0, 3);
        if (trim(text).empty()) continue;
        lines.push_back({number, text});
    }
    return lines;
}

std::vector<std::string> parse_header(const RawLine& line, char delimiter) {
    std::vector<std::string> names;
    for (std::string_view cell : split(line.text, delimiter)) names.push_back(unquote(cell));
    return names;
}

Matrix parse_body(std::span<const RawLine> lines, std::size_t width, char delimiter) {
    Matrix values(static_cast<Eigen::Index>(lines.size()), static_cast<Eigen::Index>(width));
    for (std::size_t r = 0; r < lines.size(); ++r) {
        const auto cells = split(lines[r].text, delimiter);
        if (cells.size() != width) {
            throw ParseError(lines[r].number, 0,
                             "expected " + std::to_string(width) + " fields, found " +
                                 std::to_string(cells.size()));
        }
        for (std::size_t c = 0; c < width; ++c) {
            const auto value = parse_number(cells[c]);
            if (!value) {
                throw ParseError(lines[r].number, c + 1,
                                 "not a finite number: '" + std::string(trim(cells[c])) + "'");
            }
            values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = *value;
        }
    }
    return values;
}

std::vector<double> column_copy(const Matrix& x, Eigen::Index j) {
    std::vector<double> col(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) col[static_cast<std::size_t>(i)] = x(i, j);
    return col;
}

double population_sd(const Vector& v) {
    const double mean = v.mean();
    return std::sqrt((v.array() - mean).square().mean());
}

bool is_constant(std::span<const double> col) {
    return std::all_of(col.begin(), col.end(), [&](double v) { return v == col.front(); });
}

}  // namespace

CsvTable load_csv(const std::filesystem::path& path, bool has_header, char delimiter) {
    const std::vector<RawLine> lines = read_lines(path);
    if (lines.empty()) throw EmptyDataError("'" + path.string() + "' is empty");
    CsvTable table;
    std::span<const RawLine> body(lines);
    if (has_header) {
        table.names = parse_header(lines.front(), delimiter);
        body = body.subspan(1);
        if (body.empty()) throw EmptyDataError("'" + path.string() + "' has a header but no data");
    }
    const std::size_t width =
        has_header ? table.names.size() : split(body.front().text, delimiter).size();
    table.values = parse_body(body, width, delimiter);
    return table;
}

bool csv_has_header(const std::filesystem::path& path, char delimiter) {
    const std::vector<RawLine> lines = read_lines(path);
    if (lines.empty()) return false;
    const auto cells = split(lines.front().text, delimiter);
    return std::any_of(cells.begin(), cells.end(),
                       [](std::string_view cell) { return !parse_number(cell).has_value(); });
}

std::string format_number(double value) {
    std::array<char, 64> buf{};
    const auto [end, ec] =
        std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
    if (ec != std::errc()) throw InvalidArgument("cannot format number");
    return std::string(buf.data(), end);
}

void write_csv(const std::filesystem::path& path, const Matrix& values,
               std::span<const std::string> names, char delimiter) {
    if (!names.empty() && names.size() != static_cast<std::size_t>(values.cols())) {
        throw ShapeError("header has " + std::to_string(names.size()) + " names for " +
                         std::to_string(values.cols()) + " columns");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (j > 0) out << delimiter;
        out << names[j];
    }
    if (!names.empty()) out << '\n';
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        for (Eigen::Index j = 0; j < values.cols(); ++j) {
            if (j > 0) out << delimiter;
            out << format_number(values(i, j));
        }
        out << '\n';
    }
    if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

TwoSampleData load_two_groups(const std::filesystem::path& x_path,
                              const std::filesystem::path& y_path, bool has_header,
                              char delimiter) {
    CsvTable x = load_csv(x_path, has_header, delimiter);
    CsvTable y = load_csv(y_path, has_header, delimiter);
    if (x.values.cols() != y.values.cols()) {
        throw ShapeError("group files have different column counts: " +
                         std::to_string(x.values.cols()) + " vs " +
                         std::to_string(y.values.cols()));
    }
    if (x.values.rows() < 2 || y.values.rows() < 2) {
        throw EmptyDataError("each group needs at least two observations");
    }
    return {std::move(x.values), std::move(y.values), std::move(x.names)};
}

TwoSampleData load_labelled(const std::filesystem::path& path, std::string_view label_column,
                            char delimiter) {
    const std::vector<RawLine> lines = read_lines(path);
    if (lines.size() < 2) throw EmptyDataError("'" + path.string() + "' has no data rows");
    std::vector<std::string> names = parse_header(lines.front(), delimiter);
    const auto label_it = std::find(names.begin(), names.end(), label_column);
    if (label_it == names.end()) {
        throw ParseError(lines.front().number, 0,
                         "no column named '" + std::string(label_column) + "'");
    }
    const auto label_index = static_cast<std::size_t>(label_it - names.begin());

    names.erase(label_it);
    if (names.empty()) throw EmptyDataError("no variables besides the label column");

    const std::size_t rows = lines.size() - 1;
    std::vector<std::string> labels;
    labels.reserve(rows);
    Matrix all(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(names.size()));
    for (std::size_t r = 0; r < rows; ++r) {
        const RawLine& line = lines[r + 1];
        const auto cells = split(line.text, delimiter);
        if (cells.size() != names.size() + 1) {
            throw ParseError(line.number, 0,
                             "expected " + std::to_string(names.size() + 1) + " fields, found " +
                                 std::to_string(cells.size()));
        }
        Eigen::Index out_col = 0;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c == label_index) {
                labels.push_back(unquote(cells[c]));
                continue;
            }
            const auto value = parse_number(cells[c]);
            if (!value) {
                throw ParseError(line.number, c + 1,
                                 "not a finite number: '" + std::string(trim(cells[c])) + "'");
            }
            all(static_cast<Eigen::Index>(r), out_col++) = *value;
        }
    }

    std::vector<std::string> distinct;
    for (const auto& label : labels) {
        if (std::find(distinct.begin(), distinct.end(), label) == distinct.end()) {
            distinct.push_back(label);
        }
    }
    if (distinct.size() != 2) {
        throw InvalidArgument("label column must hold exactly two distinct values, found " +
                              std::to_string(distinct.size()));
    }

    std::vector<Eigen::Index> first;
    std::vector<Eigen::Index> second;
    for (std::size_t r = 0; r < labels.size(); ++r) {
        (labels[r] == distinct[0] ? first : second).push_back(static_cast<Eigen::Index>(r));
    }
    if (first.size() < 2 || second.size() < 2) {
        throw EmptyDataError("each group needs at least two observations");
    }
    TwoSampleData data;
    data.x = all(first, Eigen::all);
    data.y = all(second, Eigen::all);
    data.variable_names = std::move(names);
    return data;
}

Matrix standardize(const Matrix& x) {
    if (x.rows() < 2) throw EmptyDataError("standardising needs at least two observations");
    Matrix out(x.rows(), x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const Vector col = x.col(j);
        const double mean = col.mean();
        const double sd = population_sd(col);
        const double scale = std::max(1.0, col.cwiseAbs().maxCoeff());
        if (!(sd > 1e-12 * scale)) throw DegenerateColumnError(static_cast<std::size_t>(j));
        out.col(j) = (col.array() - mean) / sd;
    }
    return out;
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw InvalidArgument("normal quantile needs 0 < p < 1, got " + std::to_string(p));
    }
    static constexpr std::array<double, 6> a{-3.969683028665376e+01, 2.209460984245205e+02,
                                             -2.759285104469687e+02, 1.383577518672690e+02,
                                             -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr std::array<double, 5> b{-5.447609879822406e+01, 1.615858368580409e+02,
                                             -1.556989798598866e+02, 6.680131188771972e+01,
                                             -1.328068155288572e+01};
    static constexpr std::array<double, 6> c{-7.784894002430293e-03, -3.223964580411365e-01,
                                             -2.400758277161838e+00, -2.549732539343734e+00,
                                             4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr std::array<double, 4> d{7.784695709041462e-03, 3.224671290700398e-01,
                                             2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    auto tail = [&](double q) {
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    };

    double x = 0.0;
    if (p < p_low) {
        x = tail(std::sqrt(-2.0 * std::log(p)));
    } else if (p > 1.0 - p_low) {
        x = -tail(std::sqrt(-2.0 * std::log1p(-p)));
    } else {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }

    // Halley refinement
    const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

Vector normal_scores(std::span<const double> column) {
    const std::size_t n = column.size();
    if (n < 1) throw EmptyDataError("empty column");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return column[i] < column[j]; });

    Vector scores(static_cast<Eigen::Index>(n));
    const double denom = static_cast<double>(n) + 1.0;
    std::size_t start = 0;
    while (start < n) {
        std::size_t end = start + 1;
        while (end < n && column[order[end]] == column[order[start]]) ++end;
        // positions start..end-1 share the average 1-based rank
        const double rank = 0.5 * (static_cast<double>(start + 1) + static_cast<double>(end));
        const double score = normal_quantile(rank / denom);
        for (std::size_t k = start; k < end; ++k) {
            scores(static_cast<Eigen::Index>(order[k])) = score;
        }
        start = end;
    }
    return scores;
}

Matrix nonparanormal(const Matrix& x) {
    if (x.rows() < 2) throw EmptyDataError("the rank transform needs at least two observations");
    Matrix out(x.rows(), x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const std::vector<double> col = column_copy(x, j);
        if (is_constant(col)) throw DegenerateColumnError(static_cast<std::size_t>(j));
        const Vector scores = normal_scores(col);
        out.col(j) = scores / population_sd(scores);
    }
    return out;
}

}  // namespace diffnet
