#include "fdivkit/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fdivkit/experiment.hpp"

namespace fdivkit {

Vector project_simplex(const Vector& v) {
  const int n = static_cast<int>(v.size());
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0;
  double theta = 0.0;
  int rho = 0;
  for (int i = 0; i < n; ++i) {
    cumsum += u[i];
    const double candidate = (cumsum - 1.0) / (i + 1);
    if (u[i] - candidate > 0.0) {
      rho = i + 1;
      theta = candidate;
    }
  }
  (void)rho;
  return (v.array() - theta).max(0.0);
}

Vector project_dominant_cone(const Vector& v, int top) {
  const int n = static_cast<int>(v.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return v[i] > v[j]; });

  // Pool the dominating coordinate with every larger coordinate while the
  // pooled mean stays below the next candidate.
  double pooled = v[top];
  int count = 1;
  std::vector<int> pool = {top};
  for (int idx : order) {
    if (idx == top) continue;
    const double mean = pooled / count;
    if (v[idx] > mean) {
      pooled += v[idx];
      ++count;
      pool.push_back(idx);
    } else {
      break;
    }
  }
  Vector out = v;
  const double mean = pooled / count;
  for (int idx : pool) out[idx] = mean;
  return out;
}

SimplexMaxResult solve_matrix_game(const Matrix& G, const Vector& offsets) {
  const int k = static_cast<int>(G.rows());
  const int cols = static_cast<int>(G.cols());
  if (k < 1 || cols < 1 || offsets.size() != cols) {
    throw ValidationError("matrix game dimensions are inconsistent");
  }
  if (k > 10 || cols > 64) throw ValidationError("matrix game too large for exact solve");

  const auto payoff = [&](const Vector& p) {
    return (G.transpose() * p + offsets).minCoeff();
  };

  SimplexMaxResult best;
  best.value = -kInf;

  // Vertex candidates.
  for (int i = 0; i < k; ++i) {
    Vector p = Vector::Zero(k);
    p[i] = 1.0;
    const double v = payoff(p);
    if (v > best.value) {
      best.value = v;
      best.argmax = p;
    }
  }

  // Square-support candidates (Shapley--Snow kernels). For row support S and
  // column support T with |S| = |T| = s, solve sum_{i in S} p_i = 1 and
  // (G^T p + o)_j = v for j in T, then keep feasible p by payoff.
  std::vector<std::vector<int>> row_subsets;
  for (int mask = 1; mask < (1 << k); ++mask) {
    std::vector<int> s;
    for (int i = 0; i < k; ++i) {
      if (mask & (1 << i)) s.push_back(i);
    }
    if (s.size() >= 2) row_subsets.push_back(std::move(s));
  }
  // Column subsets grouped by size to pair with equal-size row subsets.
  std::vector<std::vector<std::vector<int>>> cols_by_size(k + 1);
  {
    std::vector<int> subset;
    const std::function<void(int, int)> gen = [&](int start, int want) {
      if (want == 0) {
        cols_by_size[subset.size()].push_back(subset);
        return;
      }
      for (int j = start; j <= cols - want; ++j) {
        subset.push_back(j);
        gen(j + 1, want - 1);
        subset.pop_back();
      }
    };
    for (int size = 2; size <= std::min(k, cols); ++size) gen(0, size);
  }

  for (const auto& S : row_subsets) {
    const int s = static_cast<int>(S.size());
    if (s > cols) continue;
    for (const auto& T : cols_by_size[s]) {
      // Unknowns: p over S (s values) and the game value v.
      Matrix sys = Matrix::Zero(s + 1, s + 1);
      Vector rhs = Vector::Zero(s + 1);
      for (int c = 0; c < s; ++c) {
        for (int r = 0; r < s; ++r) sys(c, r) = G(S[r], T[c]);
        sys(c, s) = -1.0;
        rhs[c] = -offsets[T[c]];
      }
      sys.row(s).head(s).setOnes();
      rhs[s] = 1.0;

      const Eigen::FullPivLU<Matrix> lu(sys);
      if (!lu.isInvertible()) continue;
      const Vector sol = lu.solve(rhs);
      if (!sol.allFinite()) continue;
      if (sol.head(s).minCoeff() < -1e-10) continue;

      Vector p = Vector::Zero(k);
      for (int r = 0; r < s; ++r) p[S[r]] = std::max(0.0, sol[r]);
      const double norm = p.sum();
      if (norm <= 0.0) continue;
      p /= norm;
      const double v = payoff(p);
      if (v > best.value) {
        best.value = v;
        best.argmax = p;
      }
    }
  }

  best.gap = 0.0;
  best.approximate = false;
  return best;
}

namespace {

double certificate(const Vector& p, const Vector& grad) {
  return grad.maxCoeff() - p.dot(grad);
}

}  // namespace

SimplexMaxResult maximize_concave_on_simplex(int dim,
                                             const std::function<double(const Vector&)>& phi,
                                             const std::function<Vector(const Vector&)>& grad,
                                             double tol, int max_iter) {
  SimplexMaxResult best;
  best.value = -kInf;

  std::vector<Vector> seeds;
  seeds.push_back(Vector::Constant(dim, 1.0 / dim));
  {
    // Best point of a coarse interior grid.
    const int res = 10;
    double seed_best = -kInf;
    Vector seed_arg;
    for (const Vector& p : simplex_grid(dim, res)) {
      const Vector q = 0.98 * p + Vector::Constant(dim, 0.02 / dim);
      const double v = phi(q);
      if (v > seed_best) {
        seed_best = v;
        seed_arg = q;
      }
    }
    seeds.push_back(seed_arg);
  }

  for (const Vector& seed : seeds) {
    Vector p = seed;
    double value = phi(p);
    double eta = 0.1;
    double cert = kInf;
    for (int it = 0; it < max_iter; ++it) {
      const Vector g = grad(p);
      cert = certificate(p, g);
      if (cert <= tol) break;
      // Multiplicative-weights step keeps iterates interior, which matters
      // for gradients that blow up at the boundary.
      const Vector centered = g.array() - g.maxCoeff();
      Vector trial = p.array() * (eta * centered.array()).exp();
      trial /= trial.sum();
      const double trial_value = phi(trial);
      if (trial_value >= value) {
        p = trial;
        value = trial_value;
        eta *= 1.25;
      } else {
        eta *= 0.5;
        if (eta < 1e-14) break;
      }
    }
    const Vector g = grad(p);
    cert = std::max(0.0, certificate(p, g));
    if (value > best.value || (value == best.value && cert < best.gap)) {
      best.value = value;
      best.argmax = p;
      best.gap = cert;
    }
  }
  best.approximate = best.gap > 1e-7;
  return best;
}

SimplexMaxResult maximize_on_simplex_sampled(int dim,
                                             const std::function<double(const Vector&)>& phi,
                                             int resolution) {
  SimplexMaxResult best;
  best.value = -kInf;
  for (const Vector& p : simplex_grid(dim, resolution)) {
    const double v = phi(p);
    if (v > best.value) {
      best.value = v;
      best.argmax = p;
    }
  }
  // Local refinement: repeatedly shrink a simplex neighborhood of the best.
  double step = 1.0 / resolution;
  for (int round = 0; round < 40; ++round) {
    bool improved = false;
    for (int i = 0; i < dim && !improved; ++i) {
      for (int j = 0; j < dim; ++j) {
        if (i == j) continue;
        Vector q = best.argmax;
        const double move = std::min(step, q[j]);
        if (move <= 0.0) continue;
        q[j] -= move;
        q[i] += move;
        const double v = phi(q);
        if (v > best.value) {
          best.value = v;
          best.argmax = q;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
    if (step < 1e-12) break;
  }
  best.gap = 2.0 / resolution;  // Lipschitz-scale mesh bound, heuristic
  best.approximate = true;
  return best;
}

SubgradientResult minimize_subgradient(int dim,
                                       const std::function<double(const Vector&)>& objective,
                                       const std::function<Vector(const Vector&)>& subgradient,
                                       bool sum_zero, double radius,
                                       const std::vector<Vector>& starts, double target,
                                       int max_iter, double tol) {
  const auto project = [&](Vector alpha) {
    if (sum_zero) alpha.array() -= alpha.mean();
    for (int i = 0; i < alpha.size(); ++i) {
      alpha[i] = std::clamp(alpha[i], -radius, radius);
    }
    if (sum_zero) alpha.array() -= alpha.mean();
    return alpha;
  };

  SubgradientResult best;
  best.value = kInf;
  const bool have_target = std::isfinite(target);

  for (const Vector& start : starts) {
    Vector alpha = project(start.size() == dim ? start : Vector::Zero(dim));
    double local_best = objective(alpha);
    Vector local_arg = alpha;
    for (int it = 1; it <= max_iter; ++it) {
      const double value = objective(alpha);
      if (value < local_best) {
        local_best = value;
        local_arg = alpha;
      }
      if (have_target && local_best - target <= tol) break;
      Vector g = subgradient(alpha);
      if (sum_zero) g.array() -= g.mean();
      const double norm2 = g.squaredNorm();
      if (norm2 <= 1e-24) break;
      double step;
      if (have_target) {
        step = (value - target) / norm2;  // Polyak
      } else {
        step = radius / (std::sqrt(static_cast<double>(it)) * std::sqrt(norm2));
      }
      alpha = project(alpha - step * g);
    }
    if (local_best < best.value) {
      best.value = local_best;
      best.argmin = local_arg;
    }
    best.iterations += max_iter;
  }

  if (have_target) {
    best.gap = std::max(0.0, best.value - target);
  } else {
    // No certificate without the optimal value; report a conservative scale.
    best.gap = 1e-6 * (1.0 + std::abs(best.value));
  }
  return best;
}

}  // namespace fdivkit
