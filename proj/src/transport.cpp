#include "fdivkit/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace fdivkit {

namespace {

std::vector<int> descending_order(const Vector& v) {
  std::vector<int> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return v[i] > v[j]; });
  return order;
}

// Solves the equal-sum transport problem. Sorts at every level: the corner
// repair a[0] + a[m-1] - b[m-1] >= 0 needs a[0] >= mean >= b[m-1], which only
// holds for descending inputs.
Matrix solve(const Vector& a, const Vector& b) {
  const int m = static_cast<int>(a.size());
  Matrix z = Matrix::Zero(m, m);
  if (m == 1) {
    z(0, 0) = a[0];
    return z;
  }

  const std::vector<int> order_a = descending_order(a);
  const std::vector<int> order_b = descending_order(b);
  Vector as(m), bs(m);
  for (int i = 0; i < m; ++i) {
    as[i] = a[order_a[i]];
    bs[i] = b[order_b[i]];
  }

  const int last = m - 1;
  Matrix zs = Matrix::Zero(m, m);
  Vector a_inner = as.head(last);
  Vector b_inner = bs.head(last);
  if (as[last] <= bs[last]) {
    zs(last, last) = as[last];
    zs(0, last) = bs[last] - as[last];
    a_inner[0] = std::max(0.0, as[0] + as[last] - bs[last]);
  } else {
    zs(last, last) = bs[last];
    zs(last, 0) = as[last] - bs[last];
    b_inner[0] = std::max(0.0, bs[0] + bs[last] - as[last]);
  }
  zs.topLeftCorner(last, last) = solve(a_inner, b_inner);

  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      z(order_a[i], order_b[j]) = zs(i, j);
    }
  }
  return z;
}

}  // namespace

Matrix transport_matrix(const Vector& a, const Vector& b) {
  if (a.size() != b.size() || a.size() < 1) {
    throw ValidationError("transport marginals must have equal positive length");
  }
  if (a.minCoeff() < 0.0 || b.minCoeff() < 0.0) {
    throw ValidationError("transport marginals must be nonnegative");
  }
  if (std::abs(a.sum() - b.sum()) > kRowSumTol) {
    throw ValidationError("transport marginals have mismatched sums");
  }

  // Absorb the sub-tolerance sum mismatch into b's largest entry so the
  // recursion closes exactly.
  Vector b_fixed = b;
  int top = 0;
  b.maxCoeff(&top);
  b_fixed[top] += a.sum() - b.sum();
  if (b_fixed[top] < 0.0) b_fixed[top] = 0.0;

  return solve(a, b_fixed);
}

}  // namespace fdivkit
