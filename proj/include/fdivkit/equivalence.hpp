#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fdivkit/experiment.hpp"
#include "fdivkit/generator.hpp"
#include "fdivkit/loss.hpp"
#include "fdivkit/order_instance.hpp"
#include "fdivkit/quantizer.hpp"
#include "fdivkit/uncertainty.hpp"

namespace fdivkit {

/// Result of fitting lhs = a * rhs + b^T t + c on a sample grid and
/// validating the residual on a finer/shifted grid. `equivalent` requires
/// a > 1e-6 and a validation residual within tol_rel * (1 + value scale).
struct AffineFit {
  double a = 0.0;
  Vector b;
  double c = 0.0;
  double max_residual = 0.0;
  int fit_points = 0;
  int validation_points = 0;
  bool equivalent = false;
  std::string reason;
};

/// Affine relation between two uncertainty functions over the simplex. The
/// (b, c) redundancy on the simplex (b^T p + c == (b + t1)^T p + (c - t)) is
/// resolved by the minimal-norm representative.
AffineFit affine_equivalence_U(const UncertaintyFn& u1, const UncertaintyFn& u2,
                               int resolution = 20, double tol_rel = 1e-6);

/// Affine relation between two generators on the lattice [0, box]^{k-1},
/// restricted to points where both are finite; validated on the half-step
/// shifted lattice. Fewer than k + 2 usable points is an error.
AffineFit affine_equivalence_f(const Generator& g1, const Generator& g2, double box = 4.0,
                               int resolution = 8, double tol_rel = 1e-6);

/// Quantizer orderings induced by the quantized informations of two losses.
struct RankingReport {
  int num_experiments = 0;
  int num_quantizers = 0;
  std::vector<Matrix> info;  // per experiment: num_quantizers x 2
  bool agree = true;
  int first_experiment = -1;
  int first_i = -1;
  int first_j = -1;
  double tie_tolerance = 1e-9;
};

RankingReport ranking_compare(const std::vector<DiscreteExperiment>& exps,
                              const std::vector<Quantizer>& quantizers, const LossFamily& loss_a,
                              const LossFamily& loss_b);

/// A pair of quantizers ranked oppositely by two losses, with both
/// informations recomputed from the constructed experiment as a self-check.
struct CounterexampleWitness {
  long trial = -1;
  Matrix a;
  Matrix b;
  double info_a_q1 = 0.0, info_a_q2 = 0.0;
  double info_b_q1 = 0.0, info_b_q2 = 0.0;
  bool validated = false;
};

/// Randomized search for a ranking flip between two losses over instances of
/// the product construction. Chunked across workers with per-trial seeds;
/// the earliest flipping trial wins, so the result is deterministic for a
/// given (budget, seed) regardless of thread count. Returns nullopt when the
/// budget is exhausted (budget 0 examines nothing).
std::optional<CounterexampleWitness> counterexample_search(const LossFamily& loss_a,
                                                           const LossFamily& loss_b, int k,
                                                           int max_columns, long budget,
                                                           std::uint64_t seed, int workers = 0);

}  // namespace fdivkit
