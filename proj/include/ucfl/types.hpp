#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace ucfl {

using Scalar = double;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// A model's parameters flattened into a single ordered vector.
// Layout is layer-major: weights row-major, then biases, per layer, so
// parameter vectors from different clients are comparable coordinatewise.
using Params = Vec;

// Shape mismatch between operands (programming or wiring error).
struct dimension_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Input outside an operation's documented domain.
struct validation_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Non-finite values produced or encountered mid-computation.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed external file content (IDX, CSV).
struct format_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem failure: missing, unreadable or unwritable path.
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid experiment configuration; message lists every violation found.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ucfl
