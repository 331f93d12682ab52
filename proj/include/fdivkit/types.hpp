#pragma once

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <string>

namespace fdivkit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Tolerances shared across modules.
inline constexpr double kSimplexTol = 1e-12;
inline constexpr double kRowSumTol = 1e-9;

/// Thrown on malformed inputs (bad pmfs, dimension mismatches, bad specs).
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace fdivkit
