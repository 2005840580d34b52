#pragma once

#include <stdexcept>
#include <string>

namespace gals {

// Bad input data: shape mismatches, non-finite cells, rank deficiency.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A solve that cannot proceed: singular normal matrices, degenerate moments.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gals
