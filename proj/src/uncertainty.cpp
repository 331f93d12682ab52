#include "fdivkit/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fdivkit/solvers.hpp"

namespace fdivkit {

namespace {

double entropy(const Vector& p) {
  double h = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) h -= p[i] * std::log(p[i]);
  }
  return h;
}

double log_sum_exp(const Vector& alpha) {
  const double top = alpha.maxCoeff();
  return top + std::log((alpha.array() - top).exp().sum());
}

Vector softmax(const Vector& alpha) {
  const double top = alpha.maxCoeff();
  Vector e = (alpha.array() - top).exp();
  return e / e.sum();
}

}  // namespace

ConjugateResult zero_one_conjugate(const Vector& alpha) {
  const int k = static_cast<int>(alpha.size());
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return alpha[i] > alpha[j]; });

  double prefix = 0.0;
  double best = -kInf;
  int best_l = 1;
  for (int l = 1; l <= k; ++l) {
    prefix += alpha[order[l - 1]];
    const double candidate = prefix / l - 1.0 / l;
    if (candidate > best) {
      best = candidate;
      best_l = l;
    }
  }
  ConjugateResult result;
  result.value = 1.0 + best;
  result.argmax = Vector::Zero(k);
  for (int j = 0; j < best_l; ++j) result.argmax[order[j]] = 1.0 / best_l;
  return result;
}

namespace {

UncertaintyFn make_zero_one(int k) {
  UncertaintyFn u;
  u.k = k;
  u.tag = "zero-one";
  u.eval = [](const Vector& p) { return 1.0 - p.maxCoeff(); };
  u.conjugate = [](const Vector& alpha) { return zero_one_conjugate(alpha).value; };
  u.conjugate_argmax = [](const Vector& alpha) { return zero_one_conjugate(alpha).argmax; };
  u.pl_pieces = -Matrix::Identity(k, k);
  u.pl_offsets = Vector::Ones(k);
  return u;
}

UncertaintyFn make_cost_weighted(int k, const Matrix& cost, double scale, const std::string& tag) {
  validate_cost_matrix(cost);
  if (cost.rows() != k) throw ValidationError("cost matrix size does not match k");
  UncertaintyFn u;
  u.k = k;
  u.tag = tag;
  const Matrix pieces = scale * cost;
  u.eval = [pieces](const Vector& p) { return (pieces.transpose() * p).minCoeff(); };
  u.pl_pieces = pieces;
  u.pl_offsets = Vector::Zero(k);
  return u;
}

UncertaintyFn make_entropy(int k) {
  UncertaintyFn u;
  u.k = k;
  u.tag = "entropy";
  u.eval = entropy;
  u.conjugate = log_sum_exp;
  u.conjugate_argmax = softmax;
  u.gradient = [](const Vector& p) {
    Vector g(p.size());
    for (int i = 0; i < p.size(); ++i) {
      g[i] = -(std::log(std::max(p[i], 1e-300)) + 1.0);
    }
    return g;
  };
  return u;
}

}  // namespace

UncertaintyFn make_uncertainty(const std::string& kind, int k, const Matrix& cost) {
  if (k < 2) throw ValidationError("uncertainty functions require k >= 2");
  if (kind == "zero-one") return make_zero_one(k);
  if (kind == "entropy") return make_entropy(k);
  if (kind == "cost-weighted") return make_cost_weighted(k, cost, 1.0, "cost-weighted");
  if (kind == "hinge-induced") {
    return make_cost_weighted(k, cost, static_cast<double>(k), "hinge-induced");
  }
  throw ValidationError("unknown uncertainty kind: " + kind);
}

ConjugateResult conjugate_eval(const UncertaintyFn& u, const Vector& alpha) {
  if (alpha.size() != u.k) throw ValidationError("conjugate argument has wrong dimension");

  if (u.conjugate) {
    ConjugateResult result;
    result.value = u.conjugate(alpha);
    if (u.conjugate_argmax) {
      result.argmax = u.conjugate_argmax(alpha);
    } else {
      result.argmax = project_simplex(alpha);  // placeholder direction only
    }
    return result;
  }

  if (u.piecewise_linear()) {
    Matrix game = u.pl_pieces;
    game.colwise() += alpha;
    const SimplexMaxResult sol = solve_matrix_game(game, u.pl_offsets);
    ConjugateResult result;
    result.value = sol.value;
    result.argmax = sol.argmax;
    return result;
  }

  const auto phi = [&](const Vector& p) { return p.dot(alpha) + u.eval(p); };
  if (u.gradient) {
    const auto grad = [&](const Vector& p) { return Vector(alpha + u.gradient(p)); };
    const SimplexMaxResult sol = maximize_concave_on_simplex(u.k, phi, grad);
    return ConjugateResult{sol.value, sol.argmax, sol.gap, sol.approximate};
  }

  const SimplexMaxResult sol = maximize_on_simplex_sampled(u.k, phi);
  return ConjugateResult{sol.value, sol.argmax, sol.gap, sol.approximate};
}

InformationReport statistical_information(const DiscreteExperiment& exp, const UncertaintyFn& u,
                                          const std::optional<Quantizer>& q) {
  if (u.k != exp.num_classes()) {
    throw ValidationError("uncertainty dimension does not match experiment");
  }

  Matrix cells;
  if (q.has_value()) {
    cells = cell_masses(exp.conditionals, *q);
  } else {
    cells = exp.conditionals;
  }

  InformationReport report;
  report.quantizer = q;
  report.prior_uncertainty = u.eval(exp.prior);
  double expected = 0.0;
  for (int z = 0; z < cells.cols(); ++z) {
    const Vector joint = exp.prior.cwiseProduct(cells.col(z));
    const double mass = joint.sum();
    if (mass <= 0.0) continue;
    expected += mass * u.eval(joint / mass);
  }
  report.posterior_uncertainty = expected;
  report.information = report.prior_uncertainty - expected;
  return report;
}

}  // namespace fdivkit
