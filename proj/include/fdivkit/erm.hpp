#pragma once

#include <cstdint>
#include <vector>

#include "fdivkit/experiment.hpp"
#include "fdivkit/loss.hpp"
#include "fdivkit/quantizer.hpp"
#include "fdivkit/rng.hpp"

namespace fdivkit {

/// Best attainable expected loss when decisions depend only on q(X):
/// sum_z inf_alpha sum_i prior_i l_i(alpha) P_i(q^{-1}(z)). Zero-mass cells
/// contribute nothing.
double quantized_bayes_risk(const DiscreteExperiment& exp, const LossFamily& loss,
                            const Quantizer& q, const SolverOptions& opt = SolverOptions());

struct QuantizerChoice {
  Quantizer quantizer;
  double value = 0.0;
  long candidates = 0;
};

/// Exhaustive minimizer of the quantized Bayes risk over all partitions of
/// the alphabet into at most max_codes cells; ties keep the earliest
/// partition in canonical enumeration order.
QuantizerChoice optimize_quantizer(const DiscreteExperiment& exp, const LossFamily& loss,
                                   int max_codes, const SolverOptions& opt = SolverOptions());

/// An i.i.d. sample (x_i, y_i) from an experiment: y ~ prior, x ~ P_y.
struct SampleSet {
  std::vector<int> x;
  std::vector<int> y;
  std::uint64_t seed = 0;
};

SampleSet draw_samples(const DiscreteExperiment& exp, int n, Rng& rng);

/// Per-cell decision vectors for a quantizer's code alphabet.
struct DiscriminantTable {
  std::vector<Vector> alpha;  // one entry per code
};

struct ErmConfig {
  int max_codes = 2;
  SolverOptions solver;
};

struct ErmFit {
  Quantizer quantizer;
  DiscriminantTable discriminants;
  double empirical_risk = 0.0;
  double solver_gap = 0.0;  // upper bound on the optimization error
};

/// Joint empirical-risk minimization over (quantizer, per-cell decision):
/// for each candidate partition, per-cell pointwise Bayes on the empirical
/// cell frequencies; the overall argmin. Cells with no samples default to
/// the all-zero decision vector. Deterministic given identical samples.
ErmFit erm_fit(const SampleSet& samples, int alphabet_size, const LossFamily& loss,
               const ErmConfig& config);

/// Same fit with an explicit joint pmf over (class, outcome) in place of the
/// empirical frequencies; with the true joint this is the population limit.
ErmFit erm_fit_joint(const Matrix& joint, const LossFamily& loss, const ErmConfig& config);

/// Expected cost-weighted risk of a fitted (quantizer, discriminant) pair
/// under the true experiment, with the max-over-attainers tie rule.
double true_weighted_risk(const DiscreteExperiment& exp, const Matrix& cost, const Quantizer& q,
                          const DiscriminantTable& table);

struct ConsistencyReport {
  std::vector<int> schedule;
  std::vector<double> mean_gap;
  std::vector<double> std_gap;
  std::vector<double> mean_est_error;      // realized |empirical - true| surrogate risk
  std::vector<double> mean_solver_gap;     // epsilon-opt, from the per-cell solver
  double approximation_error = 0.0;        // family covers the full search space
  double r_star = 0.0;                     // exhaustive optimum of the target risk
  std::vector<Quantizer> modal_quantizer;  // most frequently chosen per n
  std::vector<int> modal_count;
  int fisher_violations = 0;
  int replications = 0;
};

/// Runs the surrogate ERM harness: for each n in the schedule, R replications
/// of (sample, fit, evaluate true cost-weighted risk), reporting the mean gap
/// to the exhaustively computed optimum. Refuses losses that are not
/// calibrated and universally equivalent to the target cost-weighted loss
/// unless `force` is set. Each replication checks the pointwise bound
/// true gap <= (1 + 1/k) * surrogate gap and counts violations.
ConsistencyReport consistency_experiment(const DiscreteExperiment& exp, const LossFamily& loss,
                                         const std::vector<int>& schedule, int replications,
                                         std::uint64_t seed, const ErmConfig& config,
                                         bool force = false);

}  // namespace fdivkit
