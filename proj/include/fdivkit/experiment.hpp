#pragma once

#include <vector>

#include "fdivkit/types.hpp"

namespace fdivkit {

/// True when v is a probability vector: entries >= 0, sum within tol of 1.
bool is_simplex(const Vector& v, double tol = kSimplexTol);

/// A prior over k classes plus one conditional pmf per class over an alphabet
/// of size m. Immutable after validation; all operations on it are pure.
struct DiscreteExperiment {
  Vector prior;          // length k
  Matrix conditionals;   // k x m, each row a pmf over the alphabet

  int num_classes() const { return static_cast<int>(prior.size()); }
  int alphabet_size() const { return static_cast<int>(conditionals.cols()); }
};

/// Validates and normalizes a raw experiment description. Rows (and the
/// prior) whose sum deviates from 1 by at most kRowSumTol are renormalized
/// silently; larger deviations, negative entries, or k < 2 are errors.
/// Idempotent: validating a validated experiment leaves it unchanged.
DiscreteExperiment validate_experiment(const Vector& prior, const Matrix& conditionals);

/// Nonnegative k x k cost matrix with zero diagonal; entry (y, i) is the cost
/// of deciding class i when the truth is y. Throws on violation.
void validate_cost_matrix(const Matrix& cost);

/// Cost matrix of the plain zero-one loss: ones off the diagonal.
Matrix zero_one_cost(int k);

/// Per-outcome posteriors of an experiment. Outcomes with zero marginal mass
/// carry defined[x] == false and must be skipped in expectations.
struct PosteriorTable {
  Matrix posteriors;           // k x m; column x valid iff defined[x]
  Vector marginal;             // length m, sums to 1
  std::vector<bool> defined;
};

PosteriorTable posterior(const DiscreteExperiment& exp);

/// All vectors v / r with v integer, nonnegative, summing to r, in
/// lexicographic order of the leading coordinates. Size C(r + k - 1, k - 1).
std::vector<Vector> simplex_grid(int k, int resolution);

}  // namespace fdivkit
