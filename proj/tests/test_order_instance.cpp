#include "fdivkit/order_instance.hpp"

#include <cmath>

#include "fdivkit/generator.hpp"
#include "fdivkit/uncertainty.hpp"
#include "test_util.hpp"

using namespace fdivkit;
using namespace fdivkit::testing;

TEST_CASE("generator-mode scalar example") {
  // k = 2, A = B = [2]: M = 3, extended row (2, 1, 0).
  const Matrix a = rows({{2.0}});
  const OrderInstance inst = build_order_instance(a, a, OrderInstanceMode::Generator);
  CHECK(inst.scale == 3);
  CHECK(inst.a_ext(0, 0) == 2.0);
  CHECK(inst.a_ext(0, 1) == 1.0);
  CHECK(inst.a_ext(0, 2) == 0.0);

  for (const char* name : {"tv", "hellinger-sq"}) {
    const Generator g = make_generator(name, 2);
    const double quantized = f_divergence_quantized(inst.experiment.conditionals, g, inst.q1);
    const double expected = (g.eval(vec({2.0})) + g.eval(vec({1.0})) + g.eval(vec({0.0}))) / 3.0;
    CHECK(quantized == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("identical matrices give identical quantized statistics") {
  Rng rng(3);
  Matrix a(2, 3);
  for (int j = 0; j < 3; ++j) a.col(j) = vec({rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0)});
  const OrderInstance inst = build_order_instance(a, a, OrderInstanceMode::Generator);
  const Generator g = make_generator("tv", 3);
  CHECK(f_divergence_quantized(inst.experiment.conditionals, g, inst.q1) ==
        doctest::Approx(f_divergence_quantized(inst.experiment.conditionals, g, inst.q2))
            .epsilon(1e-12));
}

TEST_CASE("uncertainty-mode posterior columns") {
  Matrix a(2, 2), b(2, 2);
  a.col(0) = vec({0.7, 0.3});
  a.col(1) = vec({0.3, 0.7});
  b.col(0) = vec({0.5, 0.5});
  b.col(1) = vec({0.5, 0.5});
  const OrderInstance inst = build_order_instance(a, b, OrderInstanceMode::Uncertainty);
  CHECK(inst.scale == 4);  // M0 = 1, m = 2

  const Matrix masses = cell_masses(inst.experiment.conditionals, inst.q1);
  for (int i = 0; i < inst.scale; ++i) {
    const Vector joint = inst.experiment.prior.cwiseProduct(masses.col(i));
    const Vector post = joint / joint.sum();
    CHECK((post - inst.a_ext.col(i)).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
  // Tail columns are the centering vector v0 = (1/2, 1/2).
  CHECK(inst.a_ext(0, 2) == doctest::Approx(0.5));
}

TEST_CASE("marginal mismatch is rejected") {
  Matrix a(2, 1), b(2, 1);
  a.col(0) = vec({2.0, 1.0});
  b.col(0) = vec({1.0, 2.0});
  CHECK_THROWS_AS(build_order_instance(a, b, OrderInstanceMode::Generator), ValidationError);
  Matrix c(2, 1), d(2, 1);
  c.col(0) = vec({0.7, 0.3});
  d.col(0) = vec({0.6, 0.3});
  CHECK_THROWS_AS(build_order_instance(c, d, OrderInstanceMode::Uncertainty), ValidationError);
}

TEST_CASE("build-time identities hold over random instances") {
  Rng rng(59);

  // Generator mode: quantized divergence equals the column-sum functional.
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 2 + trial % 2;
    const int m = 1 + trial % 3;
    Matrix a(k - 1, m), b(k - 1, m);
    for (int i = 0; i < k - 1; ++i) {
      Vector arow(m), brow(m);
      for (int j = 0; j < m; ++j) {
        arow[j] = rng.uniform(0.0, 2.0);
        brow[j] = rng.uniform(0.0, 2.0);
      }
      if (brow.sum() > 0.0) brow *= arow.sum() / brow.sum();
      a.row(i) = arow.transpose();
      b.row(i) = brow.transpose();
    }
    const OrderInstance inst = build_order_instance(a, b, OrderInstanceMode::Generator);
    const Generator g = make_generator("hellinger-sq", k);
    double expected = 0.0;
    for (int j = 0; j < inst.scale; ++j) expected += g.eval(inst.b_ext.col(j));
    expected /= inst.scale;
    CHECK(f_divergence_quantized(inst.experiment.conditionals, g, inst.q2) ==
          doctest::Approx(expected).epsilon(1e-10));
  }

  // Uncertainty mode: quantized information equals the column-sum form.
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 2 + trial % 3;
    const int m = 2 + trial % 2;
    Matrix a(k, m);
    for (int j = 0; j < m; ++j) a.col(j) = rng.simplex(k);
    // Random doubly stochastic mixing preserves row sums and the simplex.
    Matrix mix = Matrix::Zero(m, m);
    for (int r = 0; r < m; ++r) {
      mix(r, (r + trial) % m) += 0.5;
      mix(r, r) += 0.5;
    }
    const Matrix b = a * mix;
    const OrderInstance inst = build_order_instance(a, b, OrderInstanceMode::Uncertainty);
    const UncertaintyFn u = make_uncertainty("zero-one", k);
    const InformationReport rep = statistical_information(inst.experiment, u, inst.q1);
    double expected = u.eval(inst.experiment.prior);
    double tail = 0.0;
    for (int j = 0; j < inst.scale; ++j) tail += u.eval(inst.a_ext.col(j));
    expected -= tail / inst.scale;
    CHECK(rep.information == doctest::Approx(expected).epsilon(1e-10));
  }
}
