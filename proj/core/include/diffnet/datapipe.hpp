#pragma once

// Two-group data ingestion and preprocessing.
//
// CSV layout: one observation per line, one variable per column, optional
// header row of variable names, comma delimiter by default. Numbers are
// written with 17 significant digits so a write/load cycle is lossless.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "diffnet/matcore.hpp"

namespace diffnet {

struct CsvTable {
    Matrix values;
    std::vector<std::string> names;  // empty when the file has no header
};

struct TwoSampleData {
    Matrix x;
    Matrix y;
    std::vector<std::string> variable_names;
};

// Throws ParseError (ragged row, non-numeric cell) with 1-based line and
// column, EmptyDataError when there are no data rows, IoError if unreadable.
CsvTable load_csv(const std::filesystem::path& path, bool has_header, char delimiter = ',');

// True when the first non-empty line contains a cell that is not a number.
bool csv_has_header(const std::filesystem::path& path, char delimiter = ',');

void write_csv(const std::filesystem::path& path, const Matrix& values,
               std::span<const std::string> names = {}, char delimiter = ',');

// 17 significant digits, independent of the global locale.
std::string format_number(double value);

// One file per group. Both must have the same column count and >= 2 rows.
TwoSampleData load_two_groups(const std::filesystem::path& x_path,
                              const std::filesystem::path& y_path, bool has_header,
                              char delimiter = ',');

// One headed file with a label column holding exactly two distinct values.
// Rows carrying the first label seen form group 1.
TwoSampleData load_labelled(const std::filesystem::path& path, std::string_view label_column,
                            char delimiter = ',');

// Column-wise (x - mean) / sd with divisor n. Throws DegenerateColumnError.
Matrix standardize(const Matrix& x);

// Standard normal quantile. Acklam's rational approximation refined by one
// Halley step against erfc; absolute error well below 1e-9 on (1e-8, 1 - 1e-8).
double normal_quantile(double p);

// Phi^{-1}(r / (n + 1)) for the within-column average ranks r.
Vector normal_scores(std::span<const double> column);

// Rank-based Gaussianisation of every column (normal scores), each column
// then scaled to unit variance. Throws DegenerateColumnError on constant columns.
Matrix nonparanormal(const Matrix& x);

}  // namespace diffnet
