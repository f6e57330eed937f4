#pragma once

#include <stdexcept>
#include <string>

namespace gdmd {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid data or arguments: non-finite entries, out-of-range windows,
/// shape mismatches, degenerate inputs.  CLI exit code 3.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

/// File did not parse under the declared format.  Carries a 1-based
/// row/column location when one is known.
class ParseError : public ValidationError {
public:
    ParseError(const std::string& msg, long row, long col)
        : ValidationError(msg + " (row " + std::to_string(row) + ", column " +
                          std::to_string(col) + ")"),
          row_(row), col_(col) {}
    explicit ParseError(const std::string& msg) : ValidationError(msg), row_(0), col_(0) {}

    long row() const { return row_; }
    long col() const { return col_; }

private:
    long row_;
    long col_;
};

/// Filesystem failure, surfaced with path context.  CLI exit code 3.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

/// Numerical failure (solver breakdown, non-finite result).  CLI exit code 4.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& msg) : Error(msg) {}
};

} // namespace gdmd
