#include "fdivkit/equivalence.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <thread>

#include "fdivkit/erm.hpp"
#include "fdivkit/rng.hpp"

namespace fdivkit {

namespace {

// Minimal-norm representative of the (b, c) family (b + t1, c - t).
void normalize_offset(Vector& b, double& c) {
  const int k = static_cast<int>(b.size());
  const double t = (c - b.sum()) / (k + 1);
  b.array() += t;
  c -= t;
}

AffineFit fit_affine(const std::vector<Vector>& points, const std::vector<double>& lhs,
                     const std::vector<double>& rhs) {
  const int n = static_cast<int>(points.size());
  const int dim = static_cast<int>(points.front().size());
  Matrix design(n, dim + 2);
  Vector target(n);
  for (int i = 0; i < n; ++i) {
    design(i, 0) = rhs[i];
    design.row(i).segment(1, dim) = points[i].transpose();
    design(i, dim + 1) = 1.0;
    target[i] = lhs[i];
  }
  const Vector sol = design.completeOrthogonalDecomposition().solve(target);
  AffineFit fit;
  fit.a = sol[0];
  fit.b = sol.segment(1, dim);
  fit.c = sol[dim + 1];
  fit.fit_points = n;
  return fit;
}

}  // namespace

AffineFit affine_equivalence_U(const UncertaintyFn& u1, const UncertaintyFn& u2, int resolution,
                               double tol_rel) {
  if (u1.k != u2.k) throw ValidationError("uncertainty dimensions differ");
  const int k = u1.k;

  std::vector<Vector> points = simplex_grid(k, resolution);
  std::vector<double> lhs(points.size()), rhs(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    lhs[i] = u1.eval(points[i]);
    rhs[i] = u2.eval(points[i]);
  }
  AffineFit fit = fit_affine(points, lhs, rhs);
  normalize_offset(fit.b, fit.c);

  // Validate on the finer grid.
  double residual = 0.0;
  double scale = 0.0;
  int count = 0;
  for (const Vector& p : simplex_grid(k, 2 * resolution)) {
    const double v1 = u1.eval(p);
    const double predicted = fit.a * u2.eval(p) + fit.b.dot(p) + fit.c;
    residual = std::max(residual, std::abs(v1 - predicted));
    scale = std::max(scale, std::abs(v1));
    ++count;
  }
  fit.max_residual = residual;
  fit.validation_points = count;
  if (fit.a <= 1e-6) {
    fit.equivalent = false;
    fit.reason = "degenerate fit: scale coefficient not positive";
  } else if (residual > tol_rel * (1.0 + scale)) {
    fit.equivalent = false;
    fit.reason = "validation residual exceeds tolerance";
  } else {
    fit.equivalent = true;
  }
  return fit;
}

AffineFit affine_equivalence_f(const Generator& g1, const Generator& g2, double box,
                               int resolution, double tol_rel) {
  if (g1.arity != g2.arity) throw ValidationError("generator arities differ");
  const int dim = g1.arity;

  const auto lattice = [&](double offset, int count) {
    std::vector<Vector> pts;
    Vector idx = Vector::Zero(dim);
    const std::function<void(int)> rec = [&](int coord) {
      if (coord == dim) {
        Vector t(dim);
        for (int i = 0; i < dim; ++i) t[i] = (idx[i] + offset) * box / count;
        pts.push_back(t);
        return;
      }
      for (int i = 0; i <= (offset > 0.0 ? count - 1 : count); ++i) {
        idx[coord] = i;
        rec(coord + 1);
      }
    };
    rec(0);
    return pts;
  };

  std::vector<Vector> points;
  std::vector<double> lhs, rhs;
  bool domains_differ = false;
  for (const Vector& t : lattice(0.0, resolution)) {
    const double v1 = g1.eval(t);
    const double v2 = g2.eval(t);
    const bool f1 = std::isfinite(v1);
    const bool f2 = std::isfinite(v2);
    if (f1 != f2) domains_differ = true;
    if (f1 && f2) {
      points.push_back(t);
      lhs.push_back(v1);
      rhs.push_back(v2);
    }
  }
  const int k = dim + 1;
  if (static_cast<int>(points.size()) < k + 2) {
    throw ValidationError("too few lattice points where both generators are finite");
  }

  AffineFit fit = fit_affine(points, lhs, rhs);
  double residual = 0.0;
  double scale = 0.0;
  int count = 0;
  for (const Vector& t : lattice(0.5, resolution)) {
    const double v1 = g1.eval(t);
    const double v2 = g2.eval(t);
    if (!std::isfinite(v1) || !std::isfinite(v2)) continue;
    const double predicted = fit.a * v2 + fit.b.dot(t) + fit.c;
    residual = std::max(residual, std::abs(v1 - predicted));
    scale = std::max(scale, std::abs(v1));
    ++count;
  }
  fit.max_residual = residual;
  fit.validation_points = count;
  if (fit.a <= 1e-6) {
    fit.equivalent = false;
    fit.reason = "degenerate fit: scale coefficient not positive";
  } else if (residual > tol_rel * (1.0 + scale)) {
    fit.equivalent = false;
    fit.reason = "validation residual exceeds tolerance";
  } else {
    fit.equivalent = true;
  }
  if (domains_differ) {
    fit.reason += std::string(fit.reason.empty() ? "" : "; ") +
                  "finite domains differ on the lattice";
  }
  return fit;
}

namespace {

double quantized_information(const DiscreteExperiment& exp, const LossFamily& loss,
                             const Quantizer& q) {
  const double prior_risk = pointwise_bayes(loss, exp.prior).value;
  return prior_risk - quantized_bayes_risk(exp, loss, q);
}

}  // namespace

RankingReport ranking_compare(const std::vector<DiscreteExperiment>& exps,
                              const std::vector<Quantizer>& quantizers, const LossFamily& loss_a,
                              const LossFamily& loss_b) {
  RankingReport report;
  report.num_experiments = static_cast<int>(exps.size());
  report.num_quantizers = static_cast<int>(quantizers.size());

  for (std::size_t e = 0; e < exps.size(); ++e) {
    Matrix info(quantizers.size(), 2);
    for (std::size_t qi = 0; qi < quantizers.size(); ++qi) {
      validate_quantizer(quantizers[qi], exps[e].alphabet_size());
      info(qi, 0) = quantized_information(exps[e], loss_a, quantizers[qi]);
      info(qi, 1) = quantized_information(exps[e], loss_b, quantizers[qi]);
    }
    report.info.push_back(info);
    // A disagreement is a strict flip beyond the tie tolerance.
    for (std::size_t i = 0; i < quantizers.size() && report.agree; ++i) {
      for (std::size_t j = i + 1; j < quantizers.size(); ++j) {
        const double da = info(i, 0) - info(j, 0);
        const double db = info(i, 1) - info(j, 1);
        if ((da > report.tie_tolerance && db < -report.tie_tolerance) ||
            (da < -report.tie_tolerance && db > report.tie_tolerance)) {
          report.agree = false;
          report.first_experiment = static_cast<int>(e);
          report.first_i = static_cast<int>(i);
          report.first_j = static_cast<int>(j);
          break;
        }
      }
    }
  }
  return report;
}

namespace {

struct TrialOutcome {
  bool flipped = false;
  Matrix a;
  Matrix b;
};

// Random vertex of the transportation polytope with column sums one and row
// sums `r`: visit the cells in random order, each time shipping as much as
// the row/column remainders allow. Every visit order yields a feasible
// table, and the spiky vertices it produces make ranking flips reachable.
Matrix random_transport_vertex(const Vector& r, int m, Rng& rng) {
  const int k = static_cast<int>(r.size());
  Vector row_left = r;
  Vector col_left = Vector::Ones(m);
  std::vector<int> cells(k * m);
  for (int c = 0; c < k * m; ++c) cells[c] = c;
  for (int c = k * m - 1; c > 0; --c) std::swap(cells[c], cells[rng.uniform_int(c + 1)]);
  Matrix out = Matrix::Zero(k, m);
  for (int c : cells) {
    const int i = c / m;
    const int j = c % m;
    const double take = std::min(row_left[i], col_left[j]);
    if (take > 0.0) {
      out(i, j) += take;
      row_left[i] -= take;
      col_left[j] -= take;
    }
  }
  return out;
}

// One search trial: two independent mixtures of random transport vertices
// share the row-sum vector, so neither majorizes the other and concave
// column sums can order them oppositely. The construction's extension
// columns are shared by both sides and cancel in every comparison.
TrialOutcome run_trial(const UncertaintyFn& ua, const UncertaintyFn& ub, int k, int max_columns,
                       std::uint64_t seed, long trial) {
  TrialOutcome out;
  Rng rng = Rng(seed).split(static_cast<std::uint64_t>(trial) + 1);
  const int m = 2 + rng.uniform_int(std::max(1, max_columns - 1));

  const Vector r = static_cast<double>(m) * rng.simplex(k);
  const auto sample_side = [&]() {
    const Matrix v1 = random_transport_vertex(r, m, rng);
    const Matrix v2 = random_transport_vertex(r, m, rng);
    const double lambda = rng.uniform(0.3, 1.0);
    return Matrix(lambda * v1 + (1.0 - lambda) * v2);
  };
  const Matrix a = sample_side();
  const Matrix b = sample_side();

  double sa = 0.0, sb = 0.0, ta = 0.0, tb = 0.0;
  for (int j = 0; j < m; ++j) {
    sa += ua.eval(a.col(j));
    sb += ua.eval(b.col(j));
    ta += ub.eval(a.col(j));
    tb += ub.eval(b.col(j));
  }
  const double margin = 1e-7;
  if ((sa - sb > margin && ta - tb < -margin) || (sa - sb < -margin && ta - tb > margin)) {
    out.flipped = true;
    out.a = a;
    out.b = b;
  }
  return out;
}

int worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FDIVKIT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 8u));
}

}  // namespace

std::optional<CounterexampleWitness> counterexample_search(const LossFamily& loss_a,
                                                           const LossFamily& loss_b, int k,
                                                           int max_columns, long budget,
                                                           std::uint64_t seed, int workers) {
  if (budget < 1) return std::nullopt;
  const UncertaintyFn ua = induced_uncertainty(loss_a);
  const UncertaintyFn ub = induced_uncertainty(loss_b);

  const int threads = worker_count(workers);
  std::atomic<long> winner(budget);
  std::vector<std::thread> pool;
  const long chunk = (budget + threads - 1) / threads;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w]() {
      const long lo = w * chunk;
      const long hi = std::min(budget, lo + chunk);
      for (long t = lo; t < hi; ++t) {
        if (t >= winner.load(std::memory_order_relaxed)) break;
        const TrialOutcome out = run_trial(ua, ub, k, max_columns, seed, t);
        if (out.flipped) {
          long current = winner.load(std::memory_order_relaxed);
          while (t < current &&
                 !winner.compare_exchange_weak(current, t, std::memory_order_relaxed)) {
          }
          break;
        }
      }
    });
  }
  for (auto& th : pool) th.join();

  const long found = winner.load();
  if (found >= budget) return std::nullopt;

  // Rebuild the winning trial and validate it end-to-end.
  const TrialOutcome out = run_trial(ua, ub, k, max_columns, seed, found);
  CounterexampleWitness witness;
  witness.trial = found;
  witness.a = out.a;
  witness.b = out.b;

  const OrderInstance inst = build_order_instance(out.a, out.b, OrderInstanceMode::Uncertainty);
  const InformationReport a1 = statistical_information(inst.experiment, ua, inst.q1);
  const InformationReport a2 = statistical_information(inst.experiment, ua, inst.q2);
  const InformationReport b1 = statistical_information(inst.experiment, ub, inst.q1);
  const InformationReport b2 = statistical_information(inst.experiment, ub, inst.q2);
  witness.info_a_q1 = a1.information;
  witness.info_a_q2 = a2.information;
  witness.info_b_q1 = b1.information;
  witness.info_b_q2 = b2.information;

  // Cross-check the uncertainty route against the quantized-risk route.
  const double risk_a1 = quantized_information(inst.experiment, loss_a, inst.q1);
  const double risk_a2 = quantized_information(inst.experiment, loss_a, inst.q2);
  const double da = witness.info_a_q1 - witness.info_a_q2;
  const double db = witness.info_b_q1 - witness.info_b_q2;
  const bool routes_agree =
      std::abs(risk_a1 - witness.info_a_q1) <= 1e-6 && std::abs(risk_a2 - witness.info_a_q2) <= 1e-6;
  witness.validated =
      routes_agree && ((da > 1e-9 && db < -1e-9) || (da < -1e-9 && db > 1e-9));
  return witness;
}

}  // namespace fdivkit
