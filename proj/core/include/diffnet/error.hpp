#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace diffnet {

enum class ErrorKind {
    invalid_argument,
    shape,
    empty_data,
    not_positive_definite,
    degenerate_data,
    degenerate_column,
    parse,
    divergence,
    eigensolver_failure,
    io,
};

const char* to_string(ErrorKind kind) noexcept;

// Base of every exception thrown by the library. Callers that need to
// branch on the failure (the CLI maps kinds onto exit codes) inspect kind().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what)
        : Error(ErrorKind::invalid_argument, what) {}
};

class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& what)
        : Error(ErrorKind::shape, what) {}
};

class EmptyDataError : public Error {
public:
    explicit EmptyDataError(const std::string& what)
        : Error(ErrorKind::empty_data, what) {}
};

class NotPositiveDefinite : public Error {
public:
    explicit NotPositiveDefinite(std::size_t pivot);

    // zero-based index of the offending pivot
    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

class DegenerateDataError : public Error {
public:
    explicit DegenerateDataError(const std::string& what)
        : Error(ErrorKind::degenerate_data, what) {}
};

class DegenerateColumnError : public Error {
public:
    explicit DegenerateColumnError(std::size_t column);

    std::size_t column() const noexcept { return column_; }

private:
    std::size_t column_;
};

class ParseError : public Error {
public:
    // line and column are 1-based; column 0 means "whole line"
    ParseError(std::size_t line, std::size_t column, const std::string& what);

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class DivergenceError : public Error {
public:
    explicit DivergenceError(std::size_t iteration);

    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

class EigensolverFailure : public Error {
public:
    explicit EigensolverFailure(const std::string& what)
        : Error(ErrorKind::eigensolver_failure, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

}  // namespace diffnet
