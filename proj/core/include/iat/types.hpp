#pragma once

#include <stdexcept>

#include <Eigen/Dense>

namespace iat {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when an input violates an operation's preconditions
/// (dimension mismatch, non-finite entries, out-of-range parameters).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace iat
