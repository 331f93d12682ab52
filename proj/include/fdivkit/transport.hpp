#pragma once

#include "fdivkit/types.hpp"

namespace fdivkit {

/// Nonnegative m x m matrix with row sums a and column sums b, which exists
/// exactly when sum(a) == sum(b). Construction: sort both vectors descending
/// (ties broken by original index), settle the last row/column against the
/// smaller corner value, recurse on the reduced (m-1)-dimensional problem,
/// then undo the permutations.
Matrix transport_matrix(const Vector& a, const Vector& b);

}  // namespace fdivkit
