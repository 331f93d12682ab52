#pragma once

#include "fdivkit/experiment.hpp"
#include "fdivkit/quantizer.hpp"
#include "fdivkit/types.hpp"

namespace fdivkit {

enum class OrderInstanceMode { Generator, Uncertainty };

/// A product-space experiment over X = [M] x [M] whose row and column
/// quantizers turn sums of a convex function over the columns of two
/// equal-marginal matrices into quantized divergences (generator mode) or
/// quantized informations under the uniform prior (uncertainty mode).
///
/// Generator mode expects A, B >= 0 of shape (k-1) x m with equal row sums;
/// the quantized f-divergence under q1 is (1/M) sum_j f(a_ext_j) for every
/// generator f. Uncertainty mode expects columns of A, B in the simplex with
/// equal row sums; the posterior of cell i under q1 is exactly column i of
/// the extended matrix.
struct OrderInstance {
  DiscreteExperiment experiment;  // over the flattened M x M product space
  Quantizer q1;                   // row projection
  Quantizer q2;                   // column projection
  Matrix a_ext;
  Matrix b_ext;
  int scale = 0;                  // M
  OrderInstanceMode mode = OrderInstanceMode::Generator;
};

OrderInstance build_order_instance(const Matrix& a, const Matrix& b, OrderInstanceMode mode);

}  // namespace fdivkit
