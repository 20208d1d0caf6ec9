#pragma once

#include <stdexcept>
#include <string>

namespace chartag {

// Shape or contract violation in a tensor/graph primitive.
struct DimError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed input data or a broken runtime contract (parse errors,
// vocabulary mismatches, training divergence).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A primitive produced or consumed a non-finite value.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace chartag
