#include "fdivkit/uncertainty.hpp"

#include <cmath>

#include "fdivkit/loss.hpp"
#include "test_util.hpp"

using namespace fdivkit;
using namespace fdivkit::testing;

TEST_CASE("built-in uncertainty values") {
  const UncertaintyFn zo = make_uncertainty("zero-one", 3);
  CHECK(zo.eval(vec({0.5, 0.3, 0.2})) == doctest::Approx(0.5).epsilon(1e-15));

  const UncertaintyFn ent = make_uncertainty("entropy", 3);
  CHECK(ent.eval(Vector::Constant(3, 1.0 / 3)) == doctest::Approx(std::log(3.0)).epsilon(1e-14));

  const UncertaintyFn hinge = make_uncertainty("hinge-induced", 3, zero_one_cost(3));
  CHECK(hinge.eval(vec({0.5, 0.3, 0.2})) == doctest::Approx(1.5).epsilon(1e-14));

  const UncertaintyFn cw = make_uncertainty("cost-weighted", 3, zero_one_cost(3));
  CHECK(cw.eval(vec({0.5, 0.3, 0.2})) == doctest::Approx(0.5).epsilon(1e-14));

  CHECK_THROWS_AS(make_uncertainty("nope", 3), ValidationError);
}

TEST_CASE("zero-one uncertainty vanishes at the vertices") {
  for (int k = 2; k <= 6; ++k) {
    const UncertaintyFn zo = make_uncertainty("zero-one", k);
    for (int i = 0; i < k; ++i) {
      Vector e = Vector::Zero(k);
      e[i] = 1.0;
      CHECK(zo.eval(e) == 0.0);
    }
  }
}

TEST_CASE("midpoint concavity of built-ins") {
  Rng rng(71);
  const Matrix cost = rows({{0.0, 2.0, 0.5}, {1.0, 0.0, 1.5}, {0.3, 0.7, 0.0}});
  const UncertaintyFn fns[] = {
      make_uncertainty("zero-one", 3), make_uncertainty("entropy", 3),
      make_uncertainty("cost-weighted", 3, cost), make_uncertainty("hinge-induced", 3, cost)};
  for (const auto& u : fns) {
    for (int trial = 0; trial < 300; ++trial) {
      const Vector x = rng.simplex(3);
      const Vector y = rng.simplex(3);
      CHECK(u.eval((x + y) / 2) >= (u.eval(x) + u.eval(y)) / 2 - 1e-9);
    }
  }
}

TEST_CASE("conjugates: closed forms and game solver agree with brute force") {
  Rng rng(73);
  for (int k : {2, 3, 4}) {
    const UncertaintyFn zo = make_uncertainty("zero-one", k);
    const Matrix cost = zero_one_cost(k);
    const UncertaintyFn cw = make_uncertainty("cost-weighted", k, cost);
    for (int trial = 0; trial < 40; ++trial) {
      Vector alpha(k);
      for (int i = 0; i < k; ++i) alpha[i] = rng.uniform(-3.0, 3.0);

      // Brute-force oracle over a fine grid.
      double brute_zo = -kInf, brute_cw = -kInf;
      for (const Vector& p : simplex_grid(k, 60)) {
        brute_zo = std::max(brute_zo, p.dot(alpha) + zo.eval(p));
        brute_cw = std::max(brute_cw, p.dot(alpha) + cw.eval(p));
      }
      const ConjugateResult czo = conjugate_eval(zo, alpha);
      const ConjugateResult ccw = conjugate_eval(cw, alpha);
      CHECK(czo.value >= brute_zo - 1e-12);
      CHECK(czo.value <= brute_zo + 0.2);  // grid is 1/60-coarse
      CHECK(ccw.value >= brute_cw - 1e-12);
      CHECK(ccw.value <= brute_cw + 0.4);
      // The attaining points must reproduce the value.
      CHECK(czo.argmax.dot(alpha) + zo.eval(czo.argmax) == doctest::Approx(czo.value).epsilon(1e-11));
      CHECK(ccw.argmax.dot(alpha) + cw.eval(ccw.argmax) == doctest::Approx(ccw.value).epsilon(1e-11));
    }
  }
}

TEST_CASE("zero-one conjugate frozen examples") {
  CHECK(zero_one_conjugate(vec({1.0, 0.0, 0.0})).value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(zero_one_conjugate(vec({0.0, 0.0, 0.0})).value == doctest::Approx(2.0 / 3).epsilon(1e-15));
}

TEST_CASE("entropy conjugate is log-sum-exp") {
  Rng rng(79);
  const UncertaintyFn ent = make_uncertainty("entropy", 3);
  for (int trial = 0; trial < 50; ++trial) {
    Vector alpha(3);
    for (int i = 0; i < 3; ++i) alpha[i] = rng.uniform(-4.0, 4.0);
    const double lse = std::log(alpha.array().exp().sum());
    CHECK(conjugate_eval(ent, alpha).value == doctest::Approx(lse).epsilon(1e-12));
  }
}

TEST_CASE("statistical information basics") {
  // Identical conditionals carry no information.
  const auto flat = validate_experiment(vec({0.4, 0.6}), rows({{0.5, 0.5}, {0.5, 0.5}}));
  const UncertaintyFn zo2 = make_uncertainty("zero-one", 2);
  CHECK(statistical_information(flat, zo2).information == doctest::Approx(0.0));

  // Separating experiment resolves all zero-one uncertainty.
  const auto sep = validate_experiment(vec({0.5, 0.5}), rows({{1, 0}, {0, 1}}));
  const InformationReport rep = statistical_information(sep, zo2);
  CHECK(rep.prior_uncertainty == doctest::Approx(0.5));
  CHECK(rep.posterior_uncertainty == doctest::Approx(0.0));
  CHECK(rep.information == doctest::Approx(0.5));
}

TEST_CASE("entropy information equals mutual information from the joint") {
  Rng rng(83);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + trial % 3;
    const int m = 2 + trial % 5;
    const auto exp = random_experiment(rng, k, m);
    const UncertaintyFn ent = make_uncertainty("entropy", k);
    const double info = statistical_information(exp, ent).information;

    // Independent oracle: I(X; Y) from the joint pmf.
    double mi = 0.0;
    Vector marginal = Vector::Zero(m);
    for (int y = 0; y < k; ++y) marginal += exp.prior[y] * exp.conditionals.row(y).transpose();
    for (int y = 0; y < k; ++y) {
      for (int x = 0; x < m; ++x) {
        const double joint = exp.prior[y] * exp.conditionals(y, x);
        if (joint > 0.0) mi += joint * std::log(joint / (exp.prior[y] * marginal[x]));
      }
    }
    CHECK(info == doctest::Approx(mi).epsilon(1e-10));
  }
}

TEST_CASE("information is nonnegative for all built-ins") {
  Rng rng(89);
  const Matrix cost3 = rows({{0.0, 1.5, 0.4}, {2.0, 0.0, 0.6}, {0.9, 1.1, 0.0}});
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 2 + trial % 3;
    const auto exp = random_experiment(rng, k, 2 + trial % 5);
    std::vector<UncertaintyFn> fns = {make_uncertainty("zero-one", k),
                                      make_uncertainty("entropy", k)};
    if (k == 3) {
      fns.push_back(make_uncertainty("cost-weighted", 3, cost3));
      fns.push_back(make_uncertainty("hinge-induced", 3, cost3));
    }
    for (const auto& u : fns) {
      CHECK(statistical_information(exp, u).information >= -1e-10);
    }
  }
}

TEST_CASE("quantization never increases information") {
  Rng rng(97);
  for (int trial = 0; trial < 400; ++trial) {
    const int k = 2 + trial % 3;
    const int m = 2 + trial % 5;
    const auto exp = random_experiment(rng, k, m);
    Quantizer q;
    q.num_codes = 1 + rng.uniform_int(m);
    q.assignment.resize(m);
    for (int x = 0; x < m; ++x) q.assignment[x] = rng.uniform_int(q.num_codes);
    const UncertaintyFn u =
        trial % 2 ? make_uncertainty("entropy", k) : make_uncertainty("zero-one", k);
    const double full = statistical_information(exp, u).information;
    const double quantized = statistical_information(exp, u, q).information;
    CHECK(quantized <= full + 1e-10);
    CHECK(quantized >= -1e-10);
  }
}

TEST_CASE("infimal uncertainty of built-in losses matches closed forms on a grid") {
  const Matrix cost = rows({{0.0, 1.2, 0.7}, {0.5, 0.0, 1.4}, {1.1, 0.9, 0.0}});
  const int k = 3;
  const LossFamily zo_loss = make_loss("zero-one", k);
  const LossFamily wzo_loss = make_loss("weighted-zero-one", k, cost);
  const LossFamily hinge_loss = make_loss("hinge", k, cost);
  const LossFamily logistic_loss = make_loss("logistic", k);
  const UncertaintyFn zo = make_uncertainty("zero-one", k);
  const UncertaintyFn cw = make_uncertainty("cost-weighted", k, cost);
  const UncertaintyFn hi = make_uncertainty("hinge-induced", k, cost);
  const UncertaintyFn ent = make_uncertainty("entropy", k);

  for (const Vector& pi : simplex_grid(k, 20)) {
    CHECK(std::abs(infimal_uncertainty(zo_loss, pi).value - zo.eval(pi)) <= 1e-12);
    CHECK(std::abs(infimal_uncertainty(wzo_loss, pi).value - cw.eval(pi)) <= 1e-12);
    CHECK(std::abs(infimal_uncertainty(hinge_loss, pi).value - hi.eval(pi)) <= 1e-12);
    CHECK(std::abs(infimal_uncertainty(logistic_loss, pi).value - ent.eval(pi)) <= 1e-6);
  }
}

TEST_CASE("frozen infimal values") {
  const LossFamily logistic_loss = make_loss("logistic", 2);
  CHECK(infimal_uncertainty(logistic_loss, vec({0.7, 0.3})).value ==
        doctest::Approx(0.61086).epsilon(1e-4));
  const LossFamily zo = make_loss("zero-one", 3);
  CHECK(infimal_uncertainty(zo, vec({0.5, 0.3, 0.2})).value == doctest::Approx(0.5));
  const LossFamily hinge = make_loss("hinge", 3);
  CHECK(infimal_uncertainty(hinge, vec({0.5, 0.3, 0.2})).value == doctest::Approx(1.5));
}
