#include "fdivkit/quantizer.hpp"

#include <algorithm>
#include <numeric>

namespace fdivkit {

Quantizer identity_quantizer(int m) {
  Quantizer q;
  q.assignment.resize(m);
  std::iota(q.assignment.begin(), q.assignment.end(), 0);
  q.num_codes = m;
  return q;
}

Quantizer single_cell_quantizer(int m) {
  Quantizer q;
  q.assignment.assign(m, 0);
  q.num_codes = 1;
  return q;
}

void validate_quantizer(const Quantizer& q, int alphabet_size) {
  if (static_cast<int>(q.assignment.size()) != alphabet_size) {
    throw ValidationError("quantizer is not total on the alphabet");
  }
  for (int code : q.assignment) {
    if (code < 0 || code >= q.num_codes) {
      throw ValidationError("quantizer code outside the declared alphabet");
    }
  }
}

Matrix cell_masses(const Matrix& dists, const Quantizer& q) {
  validate_quantizer(q, static_cast<int>(dists.cols()));
  Matrix masses = Matrix::Zero(dists.rows(), q.num_codes);
  for (int x = 0; x < dists.cols(); ++x) {
    masses.col(q.assignment[x]) += dists.col(x);
  }
  return masses;
}

bool refines(const Quantizer& q1, const Quantizer& q2) {
  if (q1.assignment.size() != q2.assignment.size()) return false;
  const int m = static_cast<int>(q1.assignment.size());
  // Map each q1 cell to the q2 cell of its first member; all members must agree.
  std::vector<int> image(q1.num_codes, -1);
  for (int x = 0; x < m; ++x) {
    int& cell = image[q1.assignment[x]];
    if (cell == -1) {
      cell = q2.assignment[x];
    } else if (cell != q2.assignment[x]) {
      return false;
    }
  }
  return true;
}

void enumerate_quantizers(int m, int max_codes,
                          const std::function<bool(const Quantizer&)>& visit) {
  if (m < 1 || m > 12) throw ValidationError("partition enumeration limited to 1 <= m <= 12");
  if (max_codes < 1 || max_codes > m) {
    throw ValidationError("max_codes must lie in [1, m]");
  }

  // Restricted growth string: a[0] = 0, a[i] <= 1 + max(a[0..i-1]), a[i] < max_codes.
  std::vector<int> a(m, 0);
  std::vector<int> prefix_max(m, 0);
  Quantizer q;
  q.assignment.resize(m);
  int i = m - 1;
  while (true) {
    for (int x = 0; x < m; ++x) q.assignment[x] = a[x];
    q.num_codes = *std::max_element(a.begin(), a.end()) + 1;
    if (!visit(q)) return;

    // Advance to the next string in canonical order.
    i = m - 1;
    while (i > 0) {
      const int cap = std::min(prefix_max[i - 1] + 1, max_codes - 1);
      if (a[i] < cap) break;
      --i;
    }
    if (i == 0) return;
    ++a[i];
    prefix_max[i] = std::max(prefix_max[i - 1], a[i]);
    for (int j = i + 1; j < m; ++j) {
      a[j] = 0;
      prefix_max[j] = prefix_max[j - 1];
    }
  }
}

std::vector<Quantizer> all_quantizers(int m, int max_codes) {
  std::vector<Quantizer> out;
  enumerate_quantizers(m, max_codes, [&](const Quantizer& q) {
    out.push_back(q);
    return true;
  });
  return out;
}

}  // namespace fdivkit
