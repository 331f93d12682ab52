#pragma once

#include <functional>
#include <optional>
#include <string>

#include "fdivkit/experiment.hpp"
#include "fdivkit/quantizer.hpp"
#include "fdivkit/types.hpp"

namespace fdivkit {

/// Closed concave uncertainty function on the probability simplex of
/// dimension k. Off-simplex queries are a contract violation.
///
/// Optional structure, mirroring Generator:
///  - `conjugate` / `conjugate_argmax`: closed-form (-U)*(alpha) and its
///    attaining simplex point;
///  - `gradient`: supergradient on the interior (smooth U);
///  - `pl_pieces`/`pl_offsets`: U(p) = min_j (pieces.col(j)^T p + offsets[j]).
struct UncertaintyFn {
  int k = 0;
  std::function<double(const Vector&)> eval;
  std::function<double(const Vector&)> conjugate;
  std::function<Vector(const Vector&)> conjugate_argmax;
  std::function<Vector(const Vector&)> gradient;
  Matrix pl_pieces;
  Vector pl_offsets;
  std::string tag;

  bool piecewise_linear() const { return pl_pieces.size() > 0; }
};

/// Built-in uncertainty functions.
///   zero-one:            U(p) = 1 - max_j p_j        (conjugate closed-form)
///   cost-weighted:       U(p) = min_l p^T c_l        (needs cost matrix)
///   entropy:             U(p) = -sum p log p in nats (log-sum-exp conjugate)
///   hinge-induced:       U(p) = k min_l p^T c_l      (needs cost matrix)
UncertaintyFn make_uncertainty(const std::string& kind, int k, const Matrix& cost = Matrix());

/// Value, attaining point, and certificate gap of
/// (-U)*(alpha) = sup_{p in simplex} { p^T alpha + U(p) }.
struct ConjugateResult {
  double value = 0.0;
  Vector argmax;
  double gap = 0.0;
  bool approximate = false;
};

ConjugateResult conjugate_eval(const UncertaintyFn& u, const Vector& alpha);

/// Closed form of sup_{p in simplex} { p^T alpha + 1 - max_j p_j }:
/// 1 + max_l { mean of the l largest entries of alpha - 1/l }, attained by
/// the uniform distribution on those l entries.
ConjugateResult zero_one_conjugate(const Vector& alpha);

/// DeGroot statistical information U(prior) - E[U(posterior)], the
/// expectation over the (quantized) marginal, zero-mass cells skipped.
struct InformationReport {
  double prior_uncertainty = 0.0;
  double posterior_uncertainty = 0.0;
  double information = 0.0;
  std::optional<Quantizer> quantizer;
};

InformationReport statistical_information(const DiscreteExperiment& exp, const UncertaintyFn& u,
                                          const std::optional<Quantizer>& q = std::nullopt);

}  // namespace fdivkit
