#include "fdivkit/calibration.hpp"

#include <cmath>

#include "test_util.hpp"

using namespace fdivkit;
using namespace fdivkit::testing;

TEST_CASE("logistic calibration margin at the frozen example") {
  const LossFamily logistic = make_loss("logistic", 2);
  const CalibrationVerdict v = calibration_check(logistic, vec({0.7, 0.3}), 1);
  CHECK(v.unconstrained == doctest::Approx(0.6108643).epsilon(1e-6));
  CHECK(v.constrained == doctest::Approx(std::log(2.0)).epsilon(1e-10));
  CHECK(v.calibrated);
}

TEST_CASE("precondition violations throw") {
  const LossFamily logistic = make_loss("logistic", 2);
  CHECK_THROWS_AS(calibration_check(logistic, vec({0.7, 0.3}), 0), ValidationError);
  const Matrix cost = zero_one_cost(3);
  const LossFamily hinge = make_loss("hinge", 3, cost);
  // Class 0 is already cost-optimal at this prior.
  CHECK_THROWS_AS(calibration_check(hinge, vec({0.6, 0.3, 0.1}), 0, cost), ValidationError);
}

TEST_CASE("an all-zero loss is never calibrated") {
  LossFamily zero;
  zero.k = 3;
  zero.tag = "all-zero";
  zero.component = [](int, const Vector&) { return 0.0; };
  zero.subgradient = [](int, const Vector& alpha) { return Vector(Vector::Zero(alpha.size())); };
  zero.exact_bayes = [](const Vector& pi) {
    BayesSolution sol;
    sol.value = 0.0;
    sol.argmin = Vector::Zero(pi.size());
    sol.method = BayesMethod::ClosedForm;
    return sol;
  };
  const CalibrationVerdict v = calibration_check(zero, vec({0.5, 0.3, 0.2}), 2);
  CHECK(v.margin == doctest::Approx(0.0));
  CHECK_FALSE(v.calibrated);
}

TEST_CASE("logistic loss is calibrated at random (pi, i*)") {
  Rng rng(301);
  for (int trial = 0; trial < 500; ++trial) {
    const int k = 2 + trial % 3;
    const LossFamily logistic = make_loss("logistic", k);
    const Vector pi = rng.simplex_interior(k, 0.02);
    int top = 0;
    pi.maxCoeff(&top);
    int target = rng.uniform_int(k);
    if (pi[target] >= pi.maxCoeff()) target = (top + 1 + rng.uniform_int(k - 1)) % k;
    if (pi[target] >= pi.maxCoeff()) continue;
    const CalibrationVerdict v = calibration_check(logistic, pi, target);
    CHECK(v.calibrated);
    CHECK(v.margin > 0.0);
  }
}

TEST_CASE("hinge loss is calibrated for random cost matrices") {
  Rng rng(307);
  for (int trial = 0; trial < 500; ++trial) {
    const int k = 2 + trial % 3;
    Matrix cost = Matrix::Zero(k, k);
    for (int y = 0; y < k; ++y) {
      for (int i = 0; i < k; ++i) {
        if (y != i) cost(y, i) = rng.uniform(0.1, 2.0);
      }
    }
    const LossFamily hinge = make_loss("hinge", k, cost);
    const Vector pi = rng.simplex_interior(k, 0.02);
    const Vector w = cost.transpose() * pi;
    int worst = 0;
    w.maxCoeff(&worst);
    if (!(w[worst] > w.minCoeff() + 1e-9)) continue;
    const CalibrationVerdict v = calibration_check(hinge, pi, worst, cost);
    CHECK(v.calibrated);
  }
}

TEST_CASE("hinge constrained solver matches brute force over flat-top candidates") {
  // Independent check of the constrained optimum on a dense alpha search.
  Rng rng(311);
  const int k = 3;
  for (int trial = 0; trial < 25; ++trial) {
    Matrix cost = Matrix::Zero(k, k);
    for (int y = 0; y < k; ++y) {
      for (int i = 0; i < k; ++i) {
        if (y != i) cost(y, i) = rng.uniform(0.1, 2.0);
      }
    }
    const LossFamily hinge = make_loss("hinge", k, cost);
    const Vector pi = rng.simplex_interior(k, 0.05);
    const Vector w = cost.transpose() * pi;
    int target = 0;
    w.maxCoeff(&target);
    if (!(w[target] > w.minCoeff() + 1e-9)) continue;
    const CalibrationVerdict v = calibration_check(hinge, pi, target, cost);

    // Grid over feasible alpha with alpha_target the max and sum zero.
    double brute = kInf;
    for (double a = -1.0; a <= 2.0 + 1e-9; a += 0.005) {
      for (double b = -1.5; b <= a + 1e-9; b += 0.005) {
        Vector alpha(k);
        alpha[target] = a;
        alpha[(target + 1) % k] = b;
        alpha[(target + 2) % k] = -a - b;
        if (alpha.maxCoeff() > alpha[target] + 1e-12) continue;
        double risk = 0.0;
        for (int i = 0; i < k; ++i) risk += pi[i] * hinge.component(i, alpha);
        brute = std::min(brute, risk);
      }
    }
    CHECK(v.constrained <= brute + 1e-9);
    CHECK(v.constrained >= v.unconstrained - 1e-12);
  }
}

TEST_CASE("family-wise gap inequality: frozen example and the optimum") {
  // At the pointwise Bayes minimizer both gaps vanish.
  const Vector pi = vec({0.5, 0.3, 0.2});
  const Vector opt = pointwise_bayes(make_loss("family-wise", 3), pi).argmin;
  GapInequality at_opt = gap_inequality_check("family-wise", pi, opt);
  CHECK(at_opt.lhs == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(at_opt.holds);

  const GapInequality ex =
      gap_inequality_check("family-wise", vec({0.5, 0.3, 0.2}), vec({0.0, 1.0, -1.0}));
  // Zero-one risk at alpha: class 2 wins, so cost 1 unless y = 2.
  CHECK(ex.rhs == doctest::Approx((0.5 + 0.2 - 0.5) / 3.0).epsilon(1e-12));
  CHECK(ex.holds);
}

TEST_CASE("hinge gap inequality: frozen example") {
  const GapInequality ex = gap_inequality_check("hinge", vec({0.5, 0.3, 0.2}),
                                                vec({-1.0, 2.0, -1.0}), zero_one_cost(3));
  CHECK(ex.lhs == doctest::Approx(0.2).epsilon(1e-12));        // (1 - 0.3) - 0.5
  CHECK(ex.rhs == doctest::Approx((4.0 / 3.0) * 0.6).epsilon(1e-12));
  CHECK(ex.holds);
  CHECK_THROWS_AS(gap_inequality_check("hinge", vec({0.5, 0.5}), vec({1.0, 0.0})),
                  ValidationError);
}

TEST_CASE("family-wise gap inequality over random draws") {
  Rng rng(313);
  for (int k : {2, 3, 5}) {
    for (int trial = 0; trial < 3400; ++trial) {
      const Vector pi = rng.simplex(k);
      Vector alpha(k);
      for (int i = 0; i < k; ++i) alpha[i] = rng.uniform(-4.0, 4.0);
      CHECK(gap_inequality_check("family-wise", pi, alpha).holds);
    }
  }
}

TEST_CASE("hinge gap inequality over random draws and cost matrices") {
  Rng rng(317);
  for (int k : {2, 3, 5}) {
    for (int trial = 0; trial < 3400; ++trial) {
      Matrix cost = Matrix::Zero(k, k);
      for (int y = 0; y < k; ++y) {
        for (int i = 0; i < k; ++i) {
          if (y != i) cost(y, i) = rng.uniform(0.0, 2.0);
        }
      }
      const Vector pi = rng.simplex(k);
      Vector alpha(k);
      for (int i = 0; i < k; ++i) alpha[i] = rng.uniform(-3.0, 3.0);
      alpha.array() -= alpha.mean();
      CHECK(gap_inequality_check("hinge", pi, alpha, cost).holds);
    }
  }
}
