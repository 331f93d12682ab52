#pragma once

#include <doctest.h>

#include "fdivkit/experiment.hpp"
#include "fdivkit/rng.hpp"

namespace fdivkit::testing {

inline Vector vec(std::initializer_list<double> entries) {
  Vector v(static_cast<int>(entries.size()));
  int i = 0;
  for (double e : entries) v[i++] = e;
  return v;
}

inline Matrix rows(std::initializer_list<std::initializer_list<double>> entries) {
  const int r = static_cast<int>(entries.size());
  const int c = static_cast<int>(entries.begin()->size());
  Matrix m(r, c);
  int i = 0;
  for (const auto& row : entries) {
    int j = 0;
    for (double e : row) m(i, j++) = e;
    ++i;
  }
  return m;
}

inline DiscreteExperiment random_experiment(Rng& rng, int k, int m, double floor_mass = 0.0) {
  Matrix conditionals(k, m);
  for (int i = 0; i < k; ++i) {
    Vector row = rng.simplex(m);
    if (floor_mass > 0.0) {
      row = (1.0 - floor_mass) * row + floor_mass * Vector::Constant(m, 1.0 / m);
    }
    conditionals.row(i) = row.transpose();
  }
  return validate_experiment(rng.simplex_interior(k, 0.1), conditionals);
}

}  // namespace fdivkit::testing
