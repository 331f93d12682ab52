#include "fdivkit/erm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "fdivkit/calibration.hpp"
#include "fdivkit/equivalence.hpp"

namespace fdivkit {

double quantized_bayes_risk(const DiscreteExperiment& exp, const LossFamily& loss,
                            const Quantizer& q, const SolverOptions& opt) {
  const Matrix masses = cell_masses(exp.conditionals, q);
  double risk = 0.0;
  for (int z = 0; z < masses.cols(); ++z) {
    const Vector joint = exp.prior.cwiseProduct(masses.col(z));
    const double mass = joint.sum();
    if (mass <= 0.0) continue;
    risk += mass * pointwise_bayes(loss, joint / mass, opt).value;
  }
  return risk;
}

QuantizerChoice optimize_quantizer(const DiscreteExperiment& exp, const LossFamily& loss,
                                   int max_codes, const SolverOptions& opt) {
  QuantizerChoice best;
  best.value = kInf;
  enumerate_quantizers(exp.alphabet_size(), max_codes, [&](const Quantizer& q) {
    const double value = quantized_bayes_risk(exp, loss, q, opt);
    ++best.candidates;
    if (value < best.value) {
      best.value = value;
      best.quantizer = q;
    }
    return true;
  });
  return best;
}

SampleSet draw_samples(const DiscreteExperiment& exp, int n, Rng& rng) {
  if (n < 1) throw ValidationError("sample size must be positive");
  SampleSet set;
  set.x.resize(n);
  set.y.resize(n);
  for (int i = 0; i < n; ++i) {
    const int label = rng.categorical(exp.prior);
    set.y[i] = label;
    set.x[i] = rng.categorical(exp.conditionals.row(label).transpose());
  }
  return set;
}

ErmFit erm_fit_joint(const Matrix& joint, const LossFamily& loss, const ErmConfig& config) {
  const int k = static_cast<int>(joint.rows());
  const int m = static_cast<int>(joint.cols());
  if (k != loss.k) throw ValidationError("joint pmf class count does not match loss");

  ErmFit best;
  best.empirical_risk = kInf;
  enumerate_quantizers(m, config.max_codes, [&](const Quantizer& q) {
    Matrix cell_joint = Matrix::Zero(k, q.num_codes);
    for (int x = 0; x < m; ++x) cell_joint.col(q.assignment[x]) += joint.col(x);

    double risk = 0.0;
    double gap = 0.0;
    DiscriminantTable table;
    table.alpha.assign(q.num_codes, Vector::Zero(k));
    for (int z = 0; z < q.num_codes; ++z) {
      const double mass = cell_joint.col(z).sum();
      if (mass <= 0.0) continue;  // empty cell keeps the all-zero decision
      const BayesSolution sol = pointwise_bayes(loss, cell_joint.col(z) / mass, config.solver);
      table.alpha[z] = sol.argmin;
      risk += mass * sol.value;
      gap += mass * sol.gap_estimate;
    }
    if (risk < best.empirical_risk) {
      best.empirical_risk = risk;
      best.quantizer = q;
      best.discriminants = table;
      best.solver_gap = gap;
    }
    return true;
  });
  return best;
}

ErmFit erm_fit(const SampleSet& samples, int alphabet_size, const LossFamily& loss,
               const ErmConfig& config) {
  const int n = static_cast<int>(samples.x.size());
  if (n == 0) throw ValidationError("empty sample");
  Matrix joint = Matrix::Zero(loss.k, alphabet_size);
  for (int i = 0; i < n; ++i) {
    if (samples.x[i] < 0 || samples.x[i] >= alphabet_size || samples.y[i] < 0 ||
        samples.y[i] >= loss.k) {
      throw ValidationError("sample outside the declared alphabets");
    }
    joint(samples.y[i], samples.x[i]) += 1.0 / n;
  }
  return erm_fit_joint(joint, loss, config);
}

double true_weighted_risk(const DiscreteExperiment& exp, const Matrix& cost, const Quantizer& q,
                          const DiscriminantTable& table) {
  const int k = exp.num_classes();
  const Matrix masses = cell_masses(exp.conditionals, q);
  double risk = 0.0;
  for (int z = 0; z < masses.cols(); ++z) {
    const Vector& alpha = table.alpha[z];
    const double top = alpha.maxCoeff();
    for (int y = 0; y < k; ++y) {
      double worst = 0.0;
      for (int i = 0; i < k; ++i) {
        if (alpha[i] == top) worst = std::max(worst, cost(y, i));
      }
      risk += exp.prior[y] * masses(y, z) * worst;
    }
  }
  return risk;
}

ConsistencyReport consistency_experiment(const DiscreteExperiment& exp, const LossFamily& loss,
                                         const std::vector<int>& schedule, int replications,
                                         std::uint64_t seed, const ErmConfig& config,
                                         bool force) {
  const int k = exp.num_classes();
  const Matrix cost = loss.cost.size() ? loss.cost : zero_one_cost(k);

  if (!force) {
    // The harness only promises convergence for losses calibrated for the
    // target cost matrix and universally equivalent to its weighted loss.
    const UncertaintyFn u_target = make_uncertainty("cost-weighted", k, cost);
    const UncertaintyFn u_loss = induced_uncertainty(loss);
    const AffineFit fit = affine_equivalence_U(u_target, u_loss, 12);
    bool calibrated = true;
    Rng rng(seed ^ 0xCA11B8A7EDULL);
    for (int trial = 0; trial < 20; ++trial) {
      const Vector pi = rng.simplex_interior(k, 0.05);
      const Vector w = cost.transpose() * pi;
      int top = 0;
      w.maxCoeff(&top);
      if (!(w[top] > w.minCoeff())) continue;
      if (!calibration_check(loss, pi, top, cost).calibrated) {
        calibrated = false;
        break;
      }
    }
    if (!fit.equivalent || !calibrated) {
      std::ostringstream msg;
      msg << "loss '" << loss.tag << "' is not " << (fit.equivalent ? "calibrated" : "equivalent")
          << " for the target cost-weighted loss; pass force to run anyway";
      throw ValidationError(msg.str());
    }
  }

  const LossFamily target = make_loss("weighted-zero-one", k, cost);
  const QuantizerChoice target_best = optimize_quantizer(exp, target, config.max_codes);
  const QuantizerChoice surrogate_best = optimize_quantizer(exp, loss, config.max_codes);

  ConsistencyReport report;
  report.schedule = schedule;
  report.r_star = target_best.value;
  report.replications = replications;
  report.approximation_error = 0.0;  // the family is the full search space

  for (std::size_t ni = 0; ni < schedule.size(); ++ni) {
    const int n = schedule[ni];
    double sum_gap = 0.0;
    double sum_gap_sq = 0.0;
    double sum_est = 0.0;
    double sum_solver = 0.0;
    std::map<std::vector<int>, int> chosen;
    for (int rep = 0; rep < replications; ++rep) {
      Rng rng = Rng(seed).split(ni * 7919 + 1).split(rep);
      const SampleSet samples = draw_samples(exp, n, rng);
      const ErmFit fit = erm_fit(samples, exp.alphabet_size(), loss, config);

      const double true_risk = true_weighted_risk(exp, cost, fit.quantizer, fit.discriminants);
      const double gap = true_risk - target_best.value;
      sum_gap += gap;
      sum_gap_sq += gap * gap;
      sum_solver += fit.solver_gap;
      ++chosen[fit.quantizer.assignment];

      // Realized estimation error at the fitted pair.
      double true_surrogate = 0.0;
      {
        const Matrix masses = cell_masses(exp.conditionals, fit.quantizer);
        for (int z = 0; z < masses.cols(); ++z) {
          const Vector& alpha = fit.discriminants.alpha[z];
          for (int y = 0; y < k; ++y) {
            if (exp.prior[y] * masses(y, z) > 0.0) {
              true_surrogate += exp.prior[y] * masses(y, z) * loss.component(y, alpha);
            }
          }
        }
      }
      sum_est += std::abs(fit.empirical_risk - true_surrogate);

      // Pointwise Fisher bound: true gap <= (1 + 1/k) * surrogate gap.
      const double surrogate_gap = true_surrogate - surrogate_best.value;
      if (gap > (1.0 + 1.0 / k) * surrogate_gap + 1e-9) {
        ++report.fisher_violations;
      }
    }
    const double mean = sum_gap / replications;
    report.mean_gap.push_back(mean);
    report.std_gap.push_back(std::sqrt(std::max(0.0, sum_gap_sq / replications - mean * mean)));
    report.mean_est_error.push_back(sum_est / replications);
    report.mean_solver_gap.push_back(sum_solver / replications);

    const auto modal = std::max_element(chosen.begin(), chosen.end(),
                                        [](const auto& a, const auto& b) { return a.second < b.second; });
    Quantizer q;
    q.assignment = modal->first;
    q.num_codes = *std::max_element(q.assignment.begin(), q.assignment.end()) + 1;
    report.modal_quantizer.push_back(q);
    report.modal_count.push_back(modal->second);
  }
  return report;
}

}  // namespace fdivkit
