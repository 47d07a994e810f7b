#pragma once

#include <stdexcept>
#include <string>

namespace icpl {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad caller-supplied value (sizes, ranges, empty input).
struct ArgumentError : Error {
  using Error::Error;
};

// Matrix/vector dimension mismatch.
struct ShapeError : Error {
  using Error::Error;
};

// Non-finite loss / division hazards during numerics.
struct NumericError : Error {
  using Error::Error;
};

// Input is structurally valid but mathematically unusable (e.g. all-equal
// distance matrix, sigma = 0).
struct DegenerateError : Error {
  using Error::Error;
};

// Text input failed to parse; carries a 1-based line number when known.
struct ParseError : Error {
  ParseError(const std::string& what, long line = -1)
      : Error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_number(line) {}
  long line_number;
};

// Binary file does not match its published layout.
struct FormatError : Error {
  using Error::Error;
};

// Violation of an append-only / injectivity contract.
struct ConsistencyError : Error {
  using Error::Error;
};

// Run artifacts cannot be compared (e.g. different class partitions).
struct ComparisonError : Error {
  using Error::Error;
};

}  // namespace icpl
