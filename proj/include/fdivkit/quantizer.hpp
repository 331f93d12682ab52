#pragma once

#include <functional>
#include <vector>

#include "fdivkit/types.hpp"

namespace fdivkit {

/// Total map from the alphabet [m] into a code alphabet [num_codes].
/// Empty cells are allowed and skipped by every consumer.
struct Quantizer {
  std::vector<int> assignment;  // assignment[x] in [0, num_codes)
  int num_codes = 0;

  int alphabet_size() const { return static_cast<int>(assignment.size()); }
};

Quantizer identity_quantizer(int m);
Quantizer single_cell_quantizer(int m);

/// Throws unless the assignment is total with codes inside [0, num_codes).
void validate_quantizer(const Quantizer& q, int alphabet_size);

/// Cell masses of k pmfs under q: a k x num_codes matrix of P_i(cell).
Matrix cell_masses(const Matrix& dists, const Quantizer& q);

/// True when q1 refines q2: q1(x) == q1(x') implies q2(x) == q2(x').
bool refines(const Quantizer& q1, const Quantizer& q2);

/// Enumerates every set partition of [m] into at most max_codes blocks via
/// restricted growth strings, in canonical order. The callback may return
/// false to stop early. Guarded to m <= 12 (Bell numbers explode).
void enumerate_quantizers(int m, int max_codes, const std::function<bool(const Quantizer&)>& visit);

/// Convenience collector for small m.
std::vector<Quantizer> all_quantizers(int m, int max_codes);

}  // namespace fdivkit
