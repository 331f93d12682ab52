#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

#include "fdivkit/types.hpp"

namespace fdivkit {

/// Splittable counter-based generator (splitmix64 core). Streams derived from
/// (seed, stream ids...) are independent, so per-trial seeding is cheap and
/// parallel sweeps stay deterministic regardless of scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed * 0x9E3779B97F4A7C15ULL + 0x243F6A8885A308D3ULL) {}

  /// Derive a child stream; never advances this generator.
  Rng split(std::uint64_t stream) const {
    Rng child(0);
    child.state_ = mix(state_ ^ mix(stream + 0x41C64E6DULL));
    return child;
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform in [0, 1). Derived from the top 53 bits, portable across stdlibs.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

  /// Index drawn from an unnormalized nonnegative weight vector.
  int categorical(const Vector& weights) {
    const double total = weights.sum();
    double u = uniform() * total;
    for (int i = 0; i < weights.size(); ++i) {
      u -= weights[i];
      if (u <= 0.0) return i;
    }
    return static_cast<int>(weights.size()) - 1;
  }

  /// Uniform point of the probability simplex (flat Dirichlet).
  Vector simplex(int k) {
    Vector v(k);
    for (int i = 0; i < k; ++i) v[i] = -std::log(1.0 - uniform());
    return v / v.sum();
  }

  /// Interior simplex point: entries bounded below by floor_mass / k.
  Vector simplex_interior(int k, double floor_mass) {
    Vector v = simplex(k);
    Vector u = Vector::Constant(k, 1.0 / k);
    return (1.0 - floor_mass) * v + floor_mass * u;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace fdivkit
