#pragma once

#include <functional>
#include <string>

#include "fdivkit/quantizer.hpp"
#include "fdivkit/types.hpp"

namespace fdivkit {

/// Convex generator f on the nonnegative orthant of dimension `arity`
/// (= k - 1 for a k-distribution divergence), with f(1) = 0.
///
/// `recession` evaluates the closed perspective at u = 0, i.e. the limit
/// lim_{s->0} s * f(t' - t + t/s) for direction t, with t' fixed to the
/// all-ones vector. Built-ins carry closed forms; custom generators without
/// one fall back to a numeric limit flagged `approx_recession`.
///
/// Optional structure used by downstream solvers:
///  - `gradient`: analytic gradient on the open orthant (smooth built-ins);
///  - `pl_pieces`/`pl_offsets`: f(t) = max_j (pieces.col(j)^T t + offsets[j])
///    for piecewise-linear generators (tv).
struct Generator {
  int arity = 0;
  std::function<double(const Vector&)> eval;
  std::function<double(const Vector&)> recession;
  std::function<Vector(const Vector&)> gradient;
  Matrix pl_pieces;   // arity x num_pieces, empty unless piecewise linear
  Vector pl_offsets;
  bool approx_recession = false;
  std::string name;

  bool piecewise_linear() const { return pl_pieces.size() > 0; }
};

/// Built-in generators: "kl", "tv", "hellinger-sq", "pearson". Multi-way
/// forms sum the binary generator coordinatewise. k is the number of
/// distributions (arity = k - 1).
Generator make_generator(const std::string& name, int k);

/// Custom generator from closures. When `recession` is empty, a numeric
/// limit along s = 2^-10 ... 2^-40 is installed and flagged approximate.
Generator make_custom_generator(int arity, std::function<double(const Vector&)> eval,
                                std::function<double(const Vector&)> recession = nullptr);

/// Closure of the perspective: u > 0 -> u f(t/u); u = 0 -> recession(t);
/// +infinity outside the nonnegative orthant.
double perspective_eval(const Generator& g, const Vector& t, double u);

/// Multi-distribution f-divergence between rows 1..k-1 of `dists` and row k,
/// on a finite alphabet (columns of `dists`).
double f_divergence(const Matrix& dists, const Generator& g);

/// Divergence of the cell masses induced by quantizer q.
double f_divergence_quantized(const Matrix& dists, const Generator& g, const Quantizer& q);

/// Throws unless K is row-stochastic (rows sum to 1 within kSimplexTol).
void validate_kernel(const Matrix& kernel);

/// Pushforward of each pmf row through a Markov kernel K (|X| x |Z|):
/// out(i, z) = sum_x K(x, z) dists(i, x).
Matrix kernel_pushforward(const Matrix& dists, const Matrix& kernel);

}  // namespace fdivkit
