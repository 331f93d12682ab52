#include "fdivkit/generator.hpp"

#include <cmath>

namespace fdivkit {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

Generator make_kl(int arity) {
  Generator g;
  g.arity = arity;
  g.name = "kl";
  g.eval = [](const Vector& t) {
    double sum = 0.0;
    for (int i = 0; i < t.size(); ++i) sum += xlogx(t[i]);
    return sum;
  };
  // s * sum (t_i/s) log(t_i/s) -> +inf whenever some t_i > 0.
  g.recession = [](const Vector& t) { return t.maxCoeff() > 0.0 ? kInf : 0.0; };
  g.gradient = [](const Vector& t) {
    Vector grad(t.size());
    for (int i = 0; i < t.size(); ++i) grad[i] = std::log(t[i]) + 1.0;
    return grad;
  };
  return g;
}

Generator make_tv(int arity) {
  Generator g;
  g.arity = arity;
  g.name = "tv";
  g.eval = [](const Vector& t) { return 0.5 * (t.array() - 1.0).abs().sum(); };
  g.recession = [](const Vector& t) { return 0.5 * t.lpNorm<1>(); };
  // Max over sign patterns of (1/2) sum_i s_i (t_i - 1).
  const int pieces = 1 << arity;
  g.pl_pieces.resize(arity, pieces);
  g.pl_offsets.resize(pieces);
  for (int mask = 0; mask < pieces; ++mask) {
    double offset = 0.0;
    for (int i = 0; i < arity; ++i) {
      const double sign = (mask >> i) & 1 ? 1.0 : -1.0;
      g.pl_pieces(i, mask) = 0.5 * sign;
      offset -= 0.5 * sign;
    }
    g.pl_offsets[mask] = offset;
  }
  return g;
}

Generator make_hellinger_sq(int arity) {
  Generator g;
  g.arity = arity;
  g.name = "hellinger-sq";
  g.eval = [](const Vector& t) {
    double sum = 0.0;
    for (int i = 0; i < t.size(); ++i) {
      const double d = std::sqrt(t[i]) - 1.0;
      sum += 0.5 * d * d;
    }
    return sum;
  };
  g.recession = [](const Vector& t) { return 0.5 * t.sum(); };
  g.gradient = [](const Vector& t) {
    Vector grad(t.size());
    for (int i = 0; i < t.size(); ++i) grad[i] = 0.5 * (1.0 - 1.0 / std::sqrt(t[i]));
    return grad;
  };
  return g;
}

Generator make_pearson(int arity) {
  Generator g;
  g.arity = arity;
  g.name = "pearson";
  g.eval = [](const Vector& t) { return (t.array() - 1.0).square().sum(); };
  g.recession = [](const Vector& t) { return t.maxCoeff() > 0.0 ? kInf : 0.0; };
  g.gradient = [](const Vector& t) { return Vector(2.0 * (t.array() - 1.0)); };
  return g;
}

}  // namespace

Generator make_generator(const std::string& name, int k) {
  if (k < 2) throw ValidationError("generator requires k >= 2 distributions");
  const int arity = k - 1;
  if (name == "kl") return make_kl(arity);
  if (name == "tv") return make_tv(arity);
  if (name == "hellinger-sq") return make_hellinger_sq(arity);
  if (name == "pearson") return make_pearson(arity);
  throw ValidationError("unknown generator name: " + name);
}

Generator make_custom_generator(int arity, std::function<double(const Vector&)> eval,
                                std::function<double(const Vector&)> recession) {
  if (arity < 1) throw ValidationError("generator arity must be positive");
  if (!eval) throw ValidationError("custom generator requires an eval closure");
  Generator g;
  g.arity = arity;
  g.name = "custom";
  g.eval = std::move(eval);

  if (recession) {
    g.recession = std::move(recession);
  } else {
    // Numeric limit of s f(1 - t + t/s) along s = 2^-10 ... 2^-40, with one
    // Richardson step on the tail. Non-shrinking tail differences (linear or
    // logarithmic growth included) report +inf.
    auto f = g.eval;
    g.recession = [f](const Vector& t) {
      const Vector ones = Vector::Ones(t.size());
      double f2 = kInf, f1 = kInf, f0 = kInf;  // last three values
      for (int e = 10; e <= 40; ++e) {
        const double s = std::ldexp(1.0, -e);
        const double fs = s * f(ones - t + t / s);
        if (!std::isfinite(fs)) return fs > 0.0 ? kInf : -kInf;
        f2 = f1;
        f1 = f0;
        f0 = fs;
      }
      const double d1 = f0 - f1;
      const double d0 = f1 - f2;
      if (std::abs(d1) <= 1e-12) return f0;
      if (std::abs(d1) >= 0.75 * std::abs(d0)) return d1 > 0.0 ? kInf : -kInf;
      return 2.0 * f0 - f1;
    };
    g.approx_recession = true;
  }
  return g;
}

double perspective_eval(const Generator& g, const Vector& t, double u) {
  if (t.size() != g.arity) throw ValidationError("perspective argument arity mismatch");
  if (u < 0.0 || t.minCoeff() < 0.0) return kInf;
  if (u == 0.0) return g.recession(t);
  return u * g.eval(t / u);
}

double f_divergence(const Matrix& dists, const Generator& g) {
  const int k = static_cast<int>(dists.rows());
  if (k != g.arity + 1) throw ValidationError("generator arity does not match distribution count");
  double total = 0.0;
  for (int x = 0; x < dists.cols(); ++x) {
    total += perspective_eval(g, dists.col(x).head(k - 1), dists(k - 1, x));
  }
  return total;
}

double f_divergence_quantized(const Matrix& dists, const Generator& g, const Quantizer& q) {
  const int k = static_cast<int>(dists.rows());
  if (k != g.arity + 1) throw ValidationError("generator arity does not match distribution count");
  const Matrix masses = cell_masses(dists, q);
  double total = 0.0;
  for (int z = 0; z < masses.cols(); ++z) {
    total += perspective_eval(g, masses.col(z).head(k - 1), masses(k - 1, z));
  }
  return total;
}

void validate_kernel(const Matrix& kernel) {
  if (kernel.rows() < 1 || kernel.cols() < 1) throw ValidationError("kernel is empty");
  if (kernel.minCoeff() < 0.0) throw ValidationError("kernel has a negative entry");
  for (int x = 0; x < kernel.rows(); ++x) {
    if (std::abs(kernel.row(x).sum() - 1.0) > kSimplexTol) {
      throw ValidationError("kernel row does not sum to 1");
    }
  }
}

Matrix kernel_pushforward(const Matrix& dists, const Matrix& kernel) {
  if (dists.cols() != kernel.rows()) {
    throw ValidationError("kernel row count does not match alphabet size");
  }
  return dists * kernel;
}

}  // namespace fdivkit
