#pragma once

#include <optional>

#include "fdivkit/loss.hpp"
#include "fdivkit/types.hpp"

namespace fdivkit {

/// Outcome of a pointwise classification-calibration check at (pi, i*):
/// the unconstrained Bayes value against the value constrained to decisions
/// that put class i* on top. Calibrated means the restriction strictly
/// hurts, beyond both solver gaps.
struct CalibrationVerdict {
  Vector pi;
  int restricted_class = 0;
  double unconstrained = 0.0;
  double constrained = 0.0;
  double margin = 0.0;
  double gap_unconstrained = 0.0;
  double gap_constrained = 0.0;
  bool calibrated = false;
};

/// Checks the defining inequality at one (pi, i*). Without a cost matrix the
/// precondition is pi[i*] < max_j pi_j; with one it is
/// c_{i*}^T pi > min_j c_j^T pi. Violations throw.
CalibrationVerdict calibration_check(const LossFamily& loss, const Vector& pi,
                                     int restricted_class,
                                     const std::optional<Matrix>& cost = std::nullopt,
                                     const SolverOptions& opt = SolverOptions());

/// Quantitative pointwise gap inequalities.
///   family-wise: surrogate gap >= (1/k) * zero-one gap
///   hinge:       weighted-zero-one gap <= (1 + 1/k) * hinge gap
struct GapInequality {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

GapInequality gap_inequality_check(const std::string& mode, const Vector& pi, const Vector& alpha,
                                   const Matrix& cost = Matrix());

}  // namespace fdivkit
