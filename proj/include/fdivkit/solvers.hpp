#pragma once

#include <functional>
#include <vector>

#include "fdivkit/types.hpp"

namespace fdivkit {

/// Euclidean projection onto the probability simplex.
Vector project_simplex(const Vector& v);

/// Euclidean projection onto the cone { x : x[top] >= x[j] for all j }.
/// Pool-adjacent-violators on the dominating coordinate.
Vector project_dominant_cone(const Vector& v, int top);

/// Result of maximizing a concave function over the simplex.
struct SimplexMaxResult {
  double value = 0.0;
  Vector argmax;
  double gap = 0.0;       // certified upper bound on (true max - value)
  bool approximate = false;
};

/// Exact value and maximizer of max_{p in simplex} min_j (G.col(j)^T p + o_j)
/// by enumeration of square-support candidate systems. Small games only
/// (rows <= 10, columns <= 64).
SimplexMaxResult solve_matrix_game(const Matrix& G, const Vector& offsets);

/// Certified maximization of a concave differentiable phi over the simplex by
/// multiplicative-weight ascent. The certificate max_j grad_j - p^T grad
/// bounds the suboptimality from above by concavity. `dim` is the simplex
/// dimension; seeds are added around the best point of a coarse grid.
SimplexMaxResult maximize_concave_on_simplex(
    int dim, const std::function<double(const Vector&)>& phi,
    const std::function<Vector(const Vector&)>& grad, double tol = 1e-11, int max_iter = 4000);

/// Derivative-free fallback: coarse grid plus local simplex search. The gap
/// reported is a heuristic mesh bound, flagged approximate.
SimplexMaxResult maximize_on_simplex_sampled(int dim,
                                             const std::function<double(const Vector&)>& phi,
                                             int resolution = 20);

/// Projected subgradient minimization over either R^k or {1^T alpha = 0}
/// with iterates clamped to |alpha_i| <= radius. When `target` (the known
/// optimal value) is finite, Polyak step sizes are used and the reported gap
/// is exact; otherwise diminishing steps and a heuristic gap.
struct SubgradientResult {
  double value = 0.0;
  Vector argmin;
  double gap = 0.0;
  int iterations = 0;
};

SubgradientResult minimize_subgradient(
    int dim, const std::function<double(const Vector&)>& objective,
    const std::function<Vector(const Vector&)>& subgradient, bool sum_zero, double radius,
    const std::vector<Vector>& starts, double target = -kInf, int max_iter = 5000,
    double tol = 1e-10);

}  // namespace fdivkit
