#include "fdivkit/experiment.hpp"

#include <cmath>
#include <sstream>

namespace fdivkit {

bool is_simplex(const Vector& v, double tol) {
  if (v.size() < 1) return false;
  if (v.minCoeff() < 0.0) return false;
  return std::abs(v.sum() - 1.0) <= tol;
}

namespace {

Vector checked_pmf(const Vector& row, const std::string& what) {
  if (row.size() < 1) throw ValidationError(what + " is empty");
  if (row.minCoeff() < 0.0) {
    throw ValidationError(what + " has a negative entry");
  }
  const double sum = row.sum();
  if (std::abs(sum - 1.0) > kRowSumTol) {
    std::ostringstream msg;
    msg << what << " sum " << sum << " exceeds tolerance";
    throw ValidationError(msg.str());
  }
  // Renormalizing sums already at rounding level would break idempotency.
  if (std::abs(sum - 1.0) <= 1e-14) return row;
  return row / sum;
}

}  // namespace

DiscreteExperiment validate_experiment(const Vector& prior, const Matrix& conditionals) {
  const int k = static_cast<int>(prior.size());
  if (k < 2) throw ValidationError("need at least two classes");
  if (conditionals.rows() != k) {
    throw ValidationError("conditional row count does not match prior length");
  }
  if (conditionals.cols() < 1) throw ValidationError("alphabet is empty");

  DiscreteExperiment exp;
  exp.prior = checked_pmf(prior, "prior");
  exp.conditionals.resize(conditionals.rows(), conditionals.cols());
  for (int i = 0; i < k; ++i) {
    std::ostringstream name;
    name << "conditional row " << (i + 1);
    exp.conditionals.row(i) = checked_pmf(conditionals.row(i), name.str()).transpose();
  }
  return exp;
}

void validate_cost_matrix(const Matrix& cost) {
  if (cost.rows() != cost.cols() || cost.rows() < 2) {
    throw ValidationError("cost matrix must be square, k >= 2");
  }
  if (cost.minCoeff() < 0.0) throw ValidationError("cost matrix has a negative entry");
  for (int i = 0; i < cost.rows(); ++i) {
    if (cost(i, i) != 0.0) throw ValidationError("cost matrix diagonal must be zero");
  }
}

Matrix zero_one_cost(int k) {
  return Matrix::Ones(k, k) - Matrix::Identity(k, k);
}

PosteriorTable posterior(const DiscreteExperiment& exp) {
  const int k = exp.num_classes();
  const int m = exp.alphabet_size();
  PosteriorTable table;
  table.posteriors = Matrix::Zero(k, m);
  table.marginal.resize(m);
  table.defined.assign(m, false);
  for (int x = 0; x < m; ++x) {
    const Vector joint = exp.prior.cwiseProduct(exp.conditionals.col(x));
    const double marginal = joint.sum();
    table.marginal[x] = marginal;
    if (marginal > 0.0) {
      table.posteriors.col(x) = joint / marginal;
      table.defined[x] = true;
    }
  }
  return table;
}

namespace {

void grid_recurse(int k, int remaining, Vector& partial, int coord, double resolution,
                  std::vector<Vector>& out) {
  if (coord == k - 1) {
    partial[coord] = remaining / resolution;
    out.push_back(partial);
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    partial[coord] = v / resolution;
    grid_recurse(k, remaining - v, partial, coord + 1, resolution, out);
  }
}

}  // namespace

std::vector<Vector> simplex_grid(int k, int resolution) {
  if (k < 2) throw ValidationError("simplex grid requires k >= 2");
  if (resolution < 1) throw ValidationError("simplex grid requires resolution >= 1");
  std::vector<Vector> out;
  Vector partial(k);
  grid_recurse(k, resolution, partial, 0, static_cast<double>(resolution), out);
  return out;
}

}  // namespace fdivkit
