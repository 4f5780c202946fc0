// error.hpp - exception types shared across the toolkit.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mrc {

// Base class for all toolkit errors so callers can catch one type.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Solver-side failures (map to CLI exit code 3).

// Pivot magnitudes repeatedly below 1e-12, singular basis, or a solution
// that fails its own feasibility check: the input is ill conditioned.
class NumericalBreakdown : public Error {
  public:
    explicit NumericalBreakdown(const std::string& what) : Error(what) {}
};

// The moment box contains no distribution (learning problem unbounded,
// or the enumeration primal infeasible).
class UncertaintySetEmpty : public Error {
  public:
    explicit UncertaintySetEmpty(const std::string& what) : Error(what) {}
};

// Data-side failures (map to CLI exit code 2).

// Every instance dimension is constant; no threshold candidate exists.
class DegenerateData : public Error {
  public:
    explicit DegenerateData(const std::string& what) : Error(what) {}
};

// Subset enumeration grows as 2^|Y|; refuse past the configured cap.
class TooManyLabels : public Error {
  public:
    explicit TooManyLabels(const std::string& what) : Error(what) {}
};

// Fewer samples than folds (or than a requested subsample).
class TooFewSamples : public Error {
  public:
    explicit TooFewSamples(const std::string& what) : Error(what) {}
};

// CSV cell that does not parse; reports 1-based line and column.
class ParseError : public Error {
  public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line_(line), column_(column) {}
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

  private:
    std::size_t line_;
    std::size_t column_;
};

// Empty CSV cell where a value is required.
class MissingValue : public Error {
  public:
    MissingValue(std::size_t line, std::size_t column)
        : Error("missing value (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line_(line), column_(column) {}
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

  private:
    std::size_t line_;
    std::size_t column_;
};

// Model file with an unknown schema_version.
class SchemaMismatch : public Error {
  public:
    explicit SchemaMismatch(const std::string& what) : Error(what) {}
};

}  // namespace mrc
