#include "fdivkit/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fdivkit/solvers.hpp"

namespace fdivkit {

namespace {

constexpr double kVerdictSlack = 1e-9;

// Constrained solve for the hinge loss: on {1^T alpha = 0, alpha_{i*} max},
// optima are flat-top vectors (a set T containing i* at (k-|T|)/|T|, the
// rest at -1), so enumerate |T|.
BayesSolution hinge_constrained(const Matrix& cost, const Vector& pi, int top) {
  const int k = static_cast<int>(pi.size());
  const Vector w = cost.transpose() * pi;
  std::vector<int> others;
  for (int j = 0; j < k; ++j) {
    if (j != top) others.push_back(j);
  }
  std::sort(others.begin(), others.end(), [&](int a, int b) { return w[a] < w[b]; });

  BayesSolution best;
  best.value = kInf;
  double pooled = w[top];
  std::vector<int> chosen = {top};
  for (int s = 1; s <= k; ++s) {
    const double value = static_cast<double>(k) / s * pooled;
    if (value < best.value) {
      best.value = value;
      Vector alpha = Vector::Constant(k, -1.0);
      for (int j : chosen) alpha[j] = static_cast<double>(k - s) / s;
      best.argmin = alpha;
    }
    if (s < k) {
      pooled += w[others[s - 1]];
      chosen.push_back(others[s - 1]);
    }
  }
  best.method = BayesMethod::Combinatorial;
  return best;
}

// Constrained solve for the logistic loss: pool i* with every class of
// larger posterior mass; the value is the cross-entropy against the pooled
// distribution.
BayesSolution logistic_constrained(const Vector& pi, int top) {
  const int k = static_cast<int>(pi.size());
  const Vector pooled = project_dominant_cone(pi, top);
  Vector alpha(k);
  for (int i = 0; i < k; ++i) alpha[i] = std::log(std::max(pooled[i], 1e-300));
  alpha.array() -= alpha.mean();
  double value = 0.0;
  for (int i = 0; i < k; ++i) {
    if (pi[i] > 0.0) value -= pi[i] * std::log(std::max(pooled[i], 1e-300));
  }
  BayesSolution sol;
  sol.value = value;
  sol.argmin = alpha;
  sol.method = BayesMethod::ClosedForm;
  return sol;
}

// Generic constrained solve: projected subgradient over the dominant cone
// (intersected with the sum-zero hyperplane; both projections commute since
// pooling preserves sums).
BayesSolution generic_constrained(const LossFamily& loss, const Vector& pi, int top,
                                  const SolverOptions& opt) {
  const int k = loss.k;
  std::function<double(const Vector&)> objective;
  std::function<Vector(const Vector&)> subgrad;
  if (loss.source) {
    const auto source = loss.source;
    objective = [source, pi](const Vector& alpha) {
      return -pi.dot(alpha) + conjugate_eval(*source, alpha).value;
    };
    subgrad = [source, pi](const Vector& alpha) {
      return Vector(conjugate_eval(*source, alpha).argmax - pi);
    };
  } else {
    if (!loss.subgradient) {
      throw ValidationError("constrained solve needs subgradients or structure");
    }
    objective = [&loss, pi, k](const Vector& alpha) {
      double total = 0.0;
      for (int i = 0; i < k; ++i) {
        if (pi[i] > 0.0) total += pi[i] * loss.component(i, alpha);
      }
      return total;
    };
    subgrad = [&loss, pi, k](const Vector& alpha) {
      Vector g = Vector::Zero(k);
      for (int i = 0; i < k; ++i) {
        if (pi[i] > 0.0) g += pi[i] * loss.subgradient(i, alpha);
      }
      return g;
    };
  }

  const bool sum_zero = loss.feasible == FeasibleSet::SumZero || loss.translation_invariant;
  const double radius = opt.radius_scale * k;
  const auto project = [&](Vector alpha) {
    if (sum_zero) alpha.array() -= alpha.mean();
    for (int i = 0; i < k; ++i) alpha[i] = std::clamp(alpha[i], -radius, radius);
    return project_dominant_cone(alpha, top);
  };

  Vector alpha = project(Vector::Zero(k));
  Vector best_alpha = alpha;
  double best = objective(alpha);
  for (int it = 1; it <= opt.max_iter; ++it) {
    Vector g = subgrad(alpha);
    if (sum_zero) g.array() -= g.mean();
    const double norm = g.norm();
    if (norm <= 1e-12) break;
    const double step = radius / (std::sqrt(static_cast<double>(it)) * norm);
    alpha = project(alpha - step * g);
    const double value = objective(alpha);
    if (value < best) {
      best = value;
      best_alpha = alpha;
    }
  }
  BayesSolution sol;
  sol.value = best;
  sol.argmin = best_alpha;
  sol.method = BayesMethod::Subgradient;
  sol.gap_estimate = 1e-4 * (1.0 + std::abs(best));
  return sol;
}

BayesSolution constrained_bayes(const LossFamily& loss, const Vector& pi, int top,
                                const SolverOptions& opt) {
  if (!loss.convex && loss.cost.size() > 0) {
    // Discrete: forcing i* into the argmax set makes S = {i*} optimal.
    BayesSolution sol;
    sol.value = pi.dot(loss.cost.col(top));
    sol.argmin = Vector::Constant(loss.k, -1.0);
    sol.argmin[top] = static_cast<double>(loss.k - 1);
    sol.method = BayesMethod::Combinatorial;
    return sol;
  }
  if (loss.tag == "hinge") return hinge_constrained(loss.cost, pi, top);
  if (loss.tag == "logistic") return logistic_constrained(pi, top);
  return generic_constrained(loss, pi, top, opt);
}

}  // namespace

CalibrationVerdict calibration_check(const LossFamily& loss, const Vector& pi,
                                     int restricted_class, const std::optional<Matrix>& cost,
                                     const SolverOptions& opt) {
  const int k = loss.k;
  if (restricted_class < 0 || restricted_class >= k) {
    throw ValidationError("restricted class out of range");
  }
  if (!is_simplex(pi, 1e-9)) throw ValidationError("pi is not a distribution");

  if (cost.has_value()) {
    const Vector w = cost->transpose() * pi;
    if (!(w[restricted_class] > w.minCoeff())) {
      throw ValidationError("restricted class is already cost-optimal at pi");
    }
  } else {
    if (!(pi[restricted_class] < pi.maxCoeff())) {
      throw ValidationError("restricted class is already most probable at pi");
    }
  }

  CalibrationVerdict verdict;
  verdict.pi = pi;
  verdict.restricted_class = restricted_class;

  const BayesSolution unconstrained = pointwise_bayes(loss, pi, opt);
  const BayesSolution constrained = constrained_bayes(loss, pi, restricted_class, opt);
  verdict.unconstrained = unconstrained.value;
  verdict.constrained = constrained.value;
  verdict.margin = constrained.value - unconstrained.value;
  verdict.gap_unconstrained = unconstrained.gap_estimate;
  verdict.gap_constrained = constrained.gap_estimate;
  verdict.calibrated =
      verdict.margin > unconstrained.gap_estimate + constrained.gap_estimate + kVerdictSlack;
  return verdict;
}

GapInequality gap_inequality_check(const std::string& mode, const Vector& pi, const Vector& alpha,
                                   const Matrix& cost) {
  const int k = static_cast<int>(pi.size());
  if (!is_simplex(pi, 1e-9)) throw ValidationError("pi is not a distribution");
  GapInequality result;

  if (mode == "family-wise") {
    const LossFamily zero_one = make_loss("zero-one", k);
    const double conj = familywise_conjugate(alpha);
    double surrogate_risk = 0.0;
    double zo_risk = 0.0;
    for (int i = 0; i < k; ++i) {
      surrogate_risk += pi[i] * (-alpha[i] + conj);
      zo_risk += pi[i] * zero_one.component(i, alpha);
    }
    const double surrogate_gap = surrogate_risk - (1.0 - pi.maxCoeff());
    const double zo_gap = zo_risk - (1.0 - pi.maxCoeff());
    result.lhs = surrogate_gap;
    result.rhs = zo_gap / k;
    result.holds = result.lhs >= result.rhs - kVerdictSlack;
    return result;
  }

  if (mode == "hinge") {
    if (std::abs(alpha.sum()) > 1e-9) {
      throw ValidationError("hinge gap check requires sum-zero alpha");
    }
    const Matrix c = cost.size() ? cost : zero_one_cost(k);
    validate_cost_matrix(c);
    const LossFamily hinge = make_loss("hinge", k, c);
    const LossFamily wzo = make_loss("weighted-zero-one", k, c);
    const Vector w = c.transpose() * pi;
    double hinge_risk = 0.0;
    double wzo_risk = 0.0;
    for (int i = 0; i < k; ++i) {
      hinge_risk += pi[i] * hinge.component(i, alpha);
      wzo_risk += pi[i] * wzo.component(i, alpha);
    }
    const double hinge_gap = hinge_risk - k * w.minCoeff();
    const double wzo_gap = wzo_risk - w.minCoeff();
    result.lhs = wzo_gap;
    result.rhs = (1.0 + 1.0 / k) * hinge_gap;
    result.holds = result.lhs <= result.rhs + kVerdictSlack;
    return result;
  }

  throw ValidationError("unknown gap inequality mode: " + mode);
}

}  // namespace fdivkit
