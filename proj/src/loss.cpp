#include "fdivkit/loss.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fdivkit/rng.hpp"
#include "fdivkit/solvers.hpp"

namespace fdivkit {

namespace {

constexpr double kSumZeroTol = 1e-9;
constexpr double kLogFloor = 1e-300;

Vector checked_distribution(const Vector& pi) {
  if (!is_simplex(pi, kSumZeroTol)) {
    throw ValidationError("pointwise Bayes weight vector is not a distribution");
  }
  return pi / pi.sum();
}

std::vector<int> argmax_set(const Vector& alpha) {
  const double top = alpha.maxCoeff();
  std::vector<int> set;
  for (int i = 0; i < alpha.size(); ++i) {
    if (alpha[i] == top) set.push_back(i);
  }
  return set;
}

Vector canonical_winner(int k, int winner) {
  Vector alpha = Vector::Constant(k, -1.0);
  alpha[winner] = static_cast<double>(k - 1);
  return alpha;
}

double log_sum_exp(const Vector& alpha) {
  const double top = alpha.maxCoeff();
  return top + std::log((alpha.array() - top).exp().sum());
}

LossFamily make_weighted_zero_one(int k, Matrix cost, const std::string& tag) {
  validate_cost_matrix(cost);
  if (cost.rows() != k) throw ValidationError("cost matrix size does not match k");
  LossFamily loss;
  loss.k = k;
  loss.tag = tag;
  loss.cost = cost;
  loss.convex = false;
  loss.lower_bound = 0.0;
  loss.component = [cost](int y, const Vector& alpha) {
    double worst = 0.0;
    for (int i : argmax_set(alpha)) worst = std::max(worst, cost(y, i));
    return worst;
  };
  loss.exact_bayes = [k, cost](const Vector& pi) {
    const Vector w = cost.transpose() * pi;
    int winner = 0;
    w.minCoeff(&winner);
    BayesSolution sol;
    sol.value = w[winner];
    sol.argmin = canonical_winner(k, winner);
    sol.method = BayesMethod::Combinatorial;
    return sol;
  };
  return loss;
}

LossFamily make_hinge(int k, Matrix cost) {
  validate_cost_matrix(cost);
  if (cost.rows() != k) throw ValidationError("cost matrix size does not match k");
  LossFamily loss;
  loss.k = k;
  loss.tag = "hinge";
  loss.cost = cost;
  loss.feasible = FeasibleSet::SumZero;
  loss.lower_bound = 0.0;
  loss.component = [cost](int i, const Vector& alpha) {
    if (std::abs(alpha.sum()) > kSumZeroTol) return kInf;
    double total = 0.0;
    for (int j = 0; j < alpha.size(); ++j) total += cost(i, j) * std::max(0.0, 1.0 + alpha[j]);
    return total;
  };
  loss.subgradient = [cost](int i, const Vector& alpha) {
    Vector g = Vector::Zero(alpha.size());
    for (int j = 0; j < alpha.size(); ++j) {
      if (alpha[j] > -1.0) g[j] = cost(i, j);
    }
    return g;
  };
  loss.exact_bayes = [k, cost](const Vector& pi) {
    // KKT solution: the cheapest column takes k-1, the rest take -1.
    const Vector w = cost.transpose() * pi;
    int winner = 0;
    w.minCoeff(&winner);
    BayesSolution sol;
    sol.value = static_cast<double>(k) * w[winner];
    sol.argmin = canonical_winner(k, winner);
    sol.method = BayesMethod::ClosedForm;
    return sol;
  };
  return loss;
}

LossFamily make_logistic(int k) {
  LossFamily loss;
  loss.k = k;
  loss.tag = "logistic";
  loss.translation_invariant = true;
  loss.lower_bound = 0.0;
  loss.component = [](int i, const Vector& alpha) { return log_sum_exp(alpha) - alpha[i]; };
  loss.subgradient = [](int i, const Vector& alpha) {
    Vector e = (alpha.array() - alpha.maxCoeff()).exp();
    Vector g = e / e.sum();
    g[i] -= 1.0;
    return g;
  };
  loss.exact_bayes = [](const Vector& pi) {
    const int k = static_cast<int>(pi.size());
    Vector alpha(k);
    for (int i = 0; i < k; ++i) alpha[i] = std::log(std::max(pi[i], kLogFloor));
    alpha.array() -= alpha.mean();
    double value = 0.0;
    const double lse = log_sum_exp(alpha);
    for (int i = 0; i < k; ++i) {
      if (pi[i] > 0.0) value += pi[i] * (lse - alpha[i]);
    }
    BayesSolution sol;
    sol.value = value;
    sol.argmin = alpha;
    sol.method = BayesMethod::ClosedForm;
    return sol;
  };
  return loss;
}

}  // namespace

LossFamily make_loss(const std::string& kind, int k, const Matrix& cost) {
  if (k < 2) throw ValidationError("loss families require k >= 2");
  if (kind == "zero-one") return make_weighted_zero_one(k, zero_one_cost(k), "zero-one");
  if (kind == "weighted-zero-one") return make_weighted_zero_one(k, cost, "weighted-zero-one");
  if (kind == "hinge") return make_hinge(k, cost.size() ? cost : zero_one_cost(k));
  if (kind == "logistic") return make_logistic(k);
  if (kind == "family-wise") {
    return loss_from_uncertainty(make_uncertainty("zero-one", k), "family-wise");
  }
  throw ValidationError("unknown loss kind: " + kind);
}

double familywise_conjugate(const Vector& alpha) {
  return zero_one_conjugate(alpha).value;
}

UncertaintyFn induced_uncertainty(const LossFamily& loss) {
  if (loss.source) return *loss.source;
  if (loss.tag == "zero-one") return make_uncertainty("zero-one", loss.k);
  if (loss.tag == "weighted-zero-one") {
    return make_uncertainty("cost-weighted", loss.k, loss.cost);
  }
  if (loss.tag == "hinge") return make_uncertainty("hinge-induced", loss.k, loss.cost);
  if (loss.tag == "logistic") return make_uncertainty("entropy", loss.k);
  throw ValidationError("no induced uncertainty known for loss: " + loss.tag);
}

LossFamily loss_from_uncertainty(const UncertaintyFn& u, const std::string& tag) {
  auto source = std::make_shared<const UncertaintyFn>(u);
  LossFamily loss;
  loss.k = u.k;
  loss.tag = tag.empty() ? ("from-uncertainty(" + u.tag + ")") : tag;
  loss.translation_invariant = true;
  loss.source = source;
  loss.component = [source](int i, const Vector& alpha) {
    return -alpha[i] + conjugate_eval(*source, alpha).value;
  };
  loss.subgradient = [source](int i, const Vector& alpha) {
    Vector g = conjugate_eval(*source, alpha).argmax;
    g[i] -= 1.0;
    return g;
  };

  // l_i(alpha) >= alpha_i + U(e_i) - alpha_i = U(e_i), so min_i U(e_i) is a
  // lower bound (possibly -inf, in which case the loss is flagged unbounded).
  double bound = kInf;
  for (int i = 0; i < u.k; ++i) {
    Vector e = Vector::Zero(u.k);
    e[i] = 1.0;
    bound = std::min(bound, u.eval(e));
  }
  loss.lower_bound = bound;

  if (u.piecewise_linear()) {
    // U = min_j (g_j^T p + o_j). The loss alpha = -g_{j*} for the piece
    // active at pi attains the infimum exactly: p^T alpha + U(p) <= o_{j*}
    // with equality at pi.
    loss.exact_bayes = [source](const Vector& pi) {
      const Vector scores = source->pl_pieces.transpose() * pi + source->pl_offsets;
      int active = 0;
      scores.minCoeff(&active);
      Vector alpha = -source->pl_pieces.col(active);
      alpha.array() -= alpha.mean();
      const ConjugateResult conj = conjugate_eval(*source, alpha);
      BayesSolution sol;
      sol.value = -pi.dot(alpha) + conj.value;
      sol.argmin = alpha;
      sol.method = BayesMethod::Combinatorial;
      sol.gap_estimate = 0.0;
      return sol;
    };
  } else if (u.gradient) {
    // Stationary point alpha = -grad U(pi); the measured duality gap
    // h(alpha) - U(pi) certifies it.
    loss.exact_bayes = [source](const Vector& pi) {
      Vector alpha = -source->gradient(pi);
      alpha.array() -= alpha.mean();
      const ConjugateResult conj = conjugate_eval(*source, alpha);
      BayesSolution sol;
      sol.argmin = alpha;
      sol.value = -pi.dot(alpha) + conj.value;
      const double gap = std::max(0.0, sol.value - source->eval(pi)) + conj.gap;
      if (gap <= 1e-11) {
        sol.method = BayesMethod::ClosedForm;
        sol.gap_estimate = 0.0;
      } else {
        sol.method = BayesMethod::Subgradient;
        sol.gap_estimate = gap;
      }
      return sol;
    };
  }
  return loss;
}

namespace {

BayesSolution subgradient_bayes(const LossFamily& loss, const Vector& pi,
                                const SolverOptions& opt) {
  const int k = loss.k;
  std::function<double(const Vector&)> objective;
  std::function<Vector(const Vector&)> subgrad;

  if (loss.source) {
    // Aggregate form: sum_i pi_i l_i(alpha) = -pi^T alpha + (-U)*(alpha).
    const auto source = loss.source;
    objective = [source, pi](const Vector& alpha) {
      return -pi.dot(alpha) + conjugate_eval(*source, alpha).value;
    };
    subgrad = [source, pi](const Vector& alpha) {
      return Vector(conjugate_eval(*source, alpha).argmax - pi);
    };
  } else {
    if (!loss.subgradient) {
      throw ValidationError("loss without subgradients requires an exact solver");
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
  const double target = loss.source ? loss.source->eval(pi) : -kInf;

  std::vector<Vector> starts;
  starts.push_back(Vector::Zero(k));
  int top = 0;
  pi.maxCoeff(&top);
  starts.push_back(canonical_winner(k, top));
  Rng rng(opt.seed);
  for (int s = 0; s < 2; ++s) {
    Vector r(k);
    for (int i = 0; i < k; ++i) r[i] = rng.uniform(-2.0, 2.0);
    starts.push_back(r);
  }

  const SubgradientResult res = minimize_subgradient(k, objective, subgrad, sum_zero, radius,
                                                     starts, target, opt.max_iter, opt.tol);
  BayesSolution sol;
  sol.value = res.value;
  sol.argmin = res.argmin;
  sol.gap_estimate = res.gap;
  sol.method = BayesMethod::Subgradient;
  return sol;
}

}  // namespace

BayesSolution pointwise_bayes(const LossFamily& loss, const Vector& pi, const SolverOptions& opt) {
  const Vector p = checked_distribution(pi);
  if (p.size() != loss.k) throw ValidationError("distribution dimension does not match loss");
  if (loss.exact_bayes) return loss.exact_bayes(p);
  return subgradient_bayes(loss, p, opt);
}

BayesSolution infimal_uncertainty(const LossFamily& loss, const Vector& pi,
                                  const SolverOptions& opt) {
  return pointwise_bayes(loss, pi, opt);
}

Generator generator_from_loss(const LossFamily& loss, const Vector& pi) {
  const Vector p = checked_distribution(pi);
  const int k = loss.k;
  if (p.size() != k) throw ValidationError("prior dimension does not match loss");
  if (p.minCoeff() <= 0.0) {
    throw ValidationError("generator construction requires a strictly positive prior");
  }
  const double prior_risk = pointwise_bayes(loss, p).value;

  if (!loss.convex && loss.cost.size() > 0) {
    // Discrete case: the loss vector over alpha ranges over the finite set
    // indexed by argmax sets S, with l_y = max_{i in S} c_{yi}. The sup of
    // affine functions becomes an exact max over 2^k - 1 pieces.
    const Matrix cost = loss.cost;
    Matrix pieces(k - 1, (1 << k) - 1);
    Vector offsets((1 << k) - 1);
    int idx = 0;
    for (int mask = 1; mask < (1 << k); ++mask, ++idx) {
      Vector v(k);
      for (int y = 0; y < k; ++y) {
        double worst = 0.0;
        for (int i = 0; i < k; ++i) {
          if (mask & (1 << i)) worst = std::max(worst, cost(y, i));
        }
        v[y] = worst;
      }
      for (int i = 0; i + 1 < k; ++i) pieces(i, idx) = -p[i] * v[i];
      offsets[idx] = prior_risk - p[k - 1] * v[k - 1];
    }
    Generator g;
    g.arity = k - 1;
    g.name = "from-loss(" + loss.tag + ")";
    g.pl_pieces = pieces;
    g.pl_offsets = offsets;
    g.eval = [pieces, offsets](const Vector& t) {
      return (pieces.transpose() * t + offsets).maxCoeff();
    };
    g.recession = [pieces](const Vector& t) { return (pieces.transpose() * t).maxCoeff(); };
    return g;
  }

  // Continuous case: f(t) = prior_risk - inf_alpha sum w_i(t) l_i(alpha)
  // with weights w_i = pi_i t_i for i < k and w_k = pi_k; the inner infimum
  // is a pointwise Bayes solve at the normalized weights.
  LossFamily inner = loss;
  const auto weighted_inf = [inner, k](const Vector& w) {
    const double total = w.sum();
    if (total <= 0.0) return 0.0;
    return total * pointwise_bayes(inner, w / total).value;
  };
  Generator g;
  g.arity = k - 1;
  g.name = "from-loss(" + loss.tag + ")";
  g.eval = [weighted_inf, p, k, prior_risk](const Vector& t) {
    Vector w(k);
    w.head(k - 1) = p.head(k - 1).cwiseProduct(t);
    w[k - 1] = p[k - 1];
    return prior_risk - weighted_inf(w);
  };
  g.recession = [weighted_inf, p, k](const Vector& t) {
    Vector w(k);
    w.head(k - 1) = p.head(k - 1).cwiseProduct(t);
    w[k - 1] = 0.0;
    return -weighted_inf(w);
  };
  return g;
}

std::pair<UncertaintyFn, LossFamily> loss_from_generator(const Generator& g, int k) {
  if (g.arity != k - 1) throw ValidationError("generator arity must be k - 1");

  UncertaintyFn u;
  u.k = k;
  u.tag = "from-generator(" + g.name + ")";
  const Generator gen = g;
  u.eval = [gen, k](const Vector& t) {
    return -static_cast<double>(k) * perspective_eval(gen, t.head(k - 1), t[k - 1]);
  };
  if (g.piecewise_linear()) {
    // u f(t/u) = max_j (gp_j^T t + go_j u), so U = min_j of linear pieces.
    const int pieces = static_cast<int>(g.pl_pieces.cols());
    u.pl_pieces.resize(k, pieces);
    u.pl_pieces.topRows(k - 1) = -static_cast<double>(k) * g.pl_pieces;
    u.pl_pieces.row(k - 1) = -static_cast<double>(k) * g.pl_offsets.transpose();
    u.pl_offsets = Vector::Zero(pieces);
  } else if (g.gradient) {
    u.gradient = [gen, k](const Vector& t) {
      const double tk = t[k - 1];
      const Vector ratio = t.head(k - 1) / tk;
      const Vector gf = gen.gradient(ratio);
      Vector grad(k);
      grad.head(k - 1) = -static_cast<double>(k) * gf;
      grad[k - 1] = -static_cast<double>(k) * gen.eval(ratio) + static_cast<double>(k) * ratio.dot(gf);
      return grad;
    };
  }

  LossFamily loss = loss_from_uncertainty(u);
  return {u, loss};
}

}  // namespace fdivkit
