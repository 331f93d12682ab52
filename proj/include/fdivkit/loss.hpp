#pragma once

#include <functional>
#include <memory>
#include <string>

#include "fdivkit/generator.hpp"
#include "fdivkit/types.hpp"
#include "fdivkit/uncertainty.hpp"

namespace fdivkit {

enum class FeasibleSet { All, SumZero };
enum class BayesMethod { ClosedForm, Combinatorial, Subgradient };

/// Minimizer of the posterior-weighted loss at a fixed distribution.
struct BayesSolution {
  double value = 0.0;
  Vector argmin;
  double gap_estimate = 0.0;  // >= 0; exactly 0 for closed-form/combinatorial
  BayesMethod method = BayesMethod::Subgradient;
};

struct SolverOptions {
  int max_iter = 5000;
  double tol = 1e-10;
  double radius_scale = 10.0;  // iterate box |alpha_i| <= radius_scale * k
  std::uint64_t seed = 0;
};

/// k component losses on decision vectors alpha in R^k.
///
/// Discrete losses (zero-one, weighted-zero-one) are non-convex, carry no
/// subgradients, and are solved combinatorially. `source` is set for losses
/// built from an uncertainty function; it supplies the exact optimal value
/// used for Polyak steps and gap certificates.
struct LossFamily {
  int k = 0;
  std::function<double(int, const Vector&)> component;
  std::function<Vector(int, const Vector&)> subgradient;
  FeasibleSet feasible = FeasibleSet::All;
  bool translation_invariant = false;
  bool convex = true;
  double lower_bound = 0.0;
  std::string tag;
  Matrix cost;  // populated for cost-structured losses
  std::function<BayesSolution(const Vector&)> exact_bayes;
  std::shared_ptr<const UncertaintyFn> source;
};

/// Built-in losses: "zero-one", "weighted-zero-one" (cost), "hinge" (cost,
/// defaults to ones-off-diagonal), "logistic", "family-wise".
LossFamily make_loss(const std::string& kind, int k, const Matrix& cost = Matrix());

/// Conjugate of the zero-one uncertainty, exact via descending sort and
/// prefix means; the family-wise loss is -alpha_i plus this.
double familywise_conjugate(const Vector& alpha);

/// The canonical convex loss generating a given uncertainty function:
/// l_i(alpha) = -alpha_i + (-U)*(alpha).
LossFamily loss_from_uncertainty(const UncertaintyFn& u, const std::string& tag = "");

/// The uncertainty function a loss generates through the infimal
/// representation: closed forms for the built-ins (zero-one -> 1 - max,
/// hinge -> k min_l pi^T c_l, logistic -> entropy, ...), the recorded source
/// for losses built from an uncertainty function.
UncertaintyFn induced_uncertainty(const LossFamily& loss);

/// inf_alpha sum_i pi_i l_i(alpha), solved per the loss's structure.
BayesSolution pointwise_bayes(const LossFamily& loss, const Vector& pi,
                              const SolverOptions& opt = SolverOptions());

/// Uncertainty-module view of the same infimum.
BayesSolution infimal_uncertainty(const LossFamily& loss, const Vector& pi,
                                  const SolverOptions& opt = SolverOptions());

/// The divergence generator induced by a loss at a strictly positive prior:
/// f(t) = sup_alpha { U_l(pi) - sum_{i<k} pi_i l_i(alpha) t_i - pi_k l_k(alpha) }.
/// Exact (finite enumeration of achievable loss vectors) for discrete losses;
/// numeric suprema otherwise.
Generator generator_from_loss(const LossFamily& loss, const Vector& pi);

/// Uncertainty U(t) = -k t_k f(t_1/t_k, ..., t_{k-1}/t_k) (closure-safe via
/// the perspective) together with its canonical loss.
std::pair<UncertaintyFn, LossFamily> loss_from_generator(const Generator& g, int k);

}  // namespace fdivkit
