#include "diffnet/error.hpp"

namespace diffnet {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::invalid_argument: return "invalid argument";
        case ErrorKind::shape: return "shape error";
        case ErrorKind::empty_data: return "empty data";
        case ErrorKind::not_positive_definite: return "not positive definite";
        case ErrorKind::degenerate_data: return "degenerate data";
        case ErrorKind::degenerate_column: return "degenerate column";
        case ErrorKind::parse: return "parse error";
        case ErrorKind::divergence: return "divergence";
        case ErrorKind::eigensolver_failure: return "eigensolver failure";
        case ErrorKind::io: return "i/o error";
    }
    return "unknown error";
}

NotPositiveDefinite::NotPositiveDefinite(std::size_t pivot)
    : Error(ErrorKind::not_positive_definite,
            "matrix is not positive definite: pivot " + std::to_string(pivot) +
                " is not positive"),
      pivot_(pivot) {}

DegenerateColumnError::DegenerateColumnError(std::size_t column)
    : Error(ErrorKind::degenerate_column,
            "column " + std::to_string(column + 1) + " is constant"),
      column_(column) {}

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& what)
    : Error(ErrorKind::parse,
            column == 0 ? "line " + std::to_string(line) + ": " + what
                        : "line " + std::to_string(line) + ", column " +
                              std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

DivergenceError::DivergenceError(std::size_t iteration)
    : Error(ErrorKind::divergence,
            "non-finite objective at iteration " + std::to_string(iteration) +
                " (step size too large for the loss curvature?)"),
      iteration_(iteration) {}

}  // namespace diffnet
