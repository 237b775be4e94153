#pragma once

#include <stdexcept>
#include <string>

namespace emvar {

// Bad input: malformed data, inconsistent configuration, violated preconditions.
// The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A sampler or solver hit a numerical failure (loss of positive definiteness,
// ill-conditioned posterior precision, nonstationary system). Exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace emvar
