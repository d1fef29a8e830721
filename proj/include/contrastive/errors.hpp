#pragma once

#include <stdexcept>
#include <string>

namespace contrastive {

// Input/shape/configuration violations. CLI exit code 1.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite values, degenerate norms, failed convergence. CLI exit code 2.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem failures. CLI exit code 3.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace contrastive
