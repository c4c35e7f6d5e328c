#pragma once

// Synthetic-data experiment runners: ground-truth comparison of the
// moment-matched posterior, sequential linear classification, and softplus
// regression against a gradient-trained baseline. All runners are
// deterministic given (seed, config); per-trial generators are seeded with
// sub_seed(seed, trial) so trials are order-independent.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "bperc/oracle.hpp"
#include "bperc/perceptron.hpp"

namespace bperc {

struct SummaryStat {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
};

// ---------------------------------------------------------------------------
// Metrics

double mae(std::span<const double> errors);
double mae(std::span<const double> pred, std::span<const double> truth);
double rmse(std::span<const double> pred, std::span<const double> truth);
SummaryStat mean_and_stddev(std::span<const double> values);

// Right-continuous empirical CDF of |error|: sorted (value, cum_prob)
// pairs over the distinct values, ending at probability 1.
std::vector<std::pair<double, double>> cumulative_abs_error_distribution(
    std::span<const double> errors);

// ---------------------------------------------------------------------------
// Deterministic baselines

struct ClassicPerceptron {
  Eigen::VectorXd weights;
  double learning_rate = 0.05;
  Activation activation = Activation::linear();
};

// w <- w + rate * (y - f(w'x)) * x (the classic Hebbian-style rule).
ClassicPerceptron perceptron_rule_step(const ClassicPerceptron& p,
                                       const TrainingInstance& inst);

// Gradient step on the squared error 1/2 (y - f(w'x))^2:
// w <- w + rate * (y - f(a)) * f'(a) * x.
ClassicPerceptron gradient_regression_step(const ClassicPerceptron& p,
                                           const TrainingInstance& inst);

// ---------------------------------------------------------------------------
// Ground-truth comparison (sigmoid posterior over the pre-activation)

struct GroundTruthConfig {
  double mu_lo = -3.0, mu_hi = 3.0, mu_step = 0.1;
  double var_lo = 0.0, var_hi = 2.0, var_step = 0.2;
  double epsilon = 0.01;  // likelihood noise, recorded with the results
  QuadratureConfig quad;
};

struct GroundTruthRecord {
  double mu_a, sigma_a2, y;
  double approx_mean, approx_var;
  double true_mean, true_var;
  double err_mean, err_var;
};

struct GroundTruthResult {
  GroundTruthConfig config;
  std::vector<GroundTruthRecord> records;
  SummaryStat mean_abs_err;
  SummaryStat var_abs_err;
  // Empirical CDFs of the absolute errors (plot data).
  std::vector<std::pair<double, double>> mean_err_cdf;
  std::vector<std::pair<double, double>> var_err_cdf;

  double frac_mean_err_below(double threshold) const;
};

GroundTruthResult run_ground_truth_comparison(
    const GroundTruthConfig& cfg = {});

// ---------------------------------------------------------------------------
// Sequential linear binary classification

struct ClassificationConfig {
  std::uint64_t seed = 1;
  int trials = 50;
  int n_instances = 25;
  double data_lo = -3.0, data_hi = 3.0;
  double epsilon = 0.01;
  double prior_mean0 = -1.0, prior_mean1 = 0.0;
  double lattice_lo = -4.0, lattice_hi = 4.0, lattice_step = 0.1;
  double near_distance = 1.0, far_distance = 3.0;
};

struct FieldPoint {
  double x1, x2;
  double mu_y, sigma_a2;
};

struct ClassificationTrial {
  int trial = 0;
  WeightPosterior posterior;
  double cosine_similarity = 0.0;  // posterior mean vs [1 1] / sqrt(2)
  double angle_error_deg = 0.0;
  double lattice_accuracy = 0.0;
  double var_near_mean = 0.0;  // mean sigma_a^2 near the training data
  double var_far_mean = 0.0;   // mean sigma_a^2 far from all training data
};

struct ClassificationResult {
  ClassificationConfig config;
  std::vector<ClassificationTrial> trials;
  std::vector<FieldPoint> first_trial_field;  // predictive field, trial 0
  double median_cosine = 0.0;
  double median_accuracy = 0.0;
};

ClassificationResult run_linear_classification(
    const ClassificationConfig& cfg = {});

// ---------------------------------------------------------------------------
// Softplus regression vs gradient baseline

struct RegressionConfig {
  std::uint64_t seed = 1;
  int trials = 50;
  int n_train = 20;
  double train_lo = -4.0, train_hi = 2.0;
  int n_test = 40;
  double test_lo = -4.0, test_hi = 4.0;
  double gamma = 2.0, delta = 1.0;  // targets log(1 + exp(gamma*x + delta))
  double noise_var = 0.01;
  double epsilon = 0.01;
  double grad_learning_rate = 0.05;
  int grad_epochs = 1;          // gradient passes per incoming instance
  double grad_init_sd = 2.0;    // baseline weights drawn from N(0, sd^2 I)
  std::vector<int> checkpoints = {1, 5, 10, 15, 20};
  int band_points = 81;  // predictive-band samples over [test_lo, test_hi]
};

struct RegressionCheckpoint {
  int n = 0;
  double bp_rmse = 0.0, grad_rmse = 0.0;
  double bp_time_s = 0.0, grad_time_s = 0.0;  // cumulative training time
};

struct BandSample {
  double x, mu_y, sigma_y;
};

struct RegressionTrial {
  int trial = 0;
  std::vector<RegressionCheckpoint> checkpoints;
  std::vector<std::vector<BandSample>> bands;  // parallel to checkpoints
};

struct RegressionResult {
  RegressionConfig config;
  std::vector<RegressionTrial> trials;
  std::vector<int> checkpoint_ns;
  std::vector<SummaryStat> bp_rmse;    // per checkpoint, across trials
  std::vector<SummaryStat> grad_rmse;
  std::vector<SummaryStat> bp_time_s;
  std::vector<SummaryStat> grad_time_s;
};

RegressionResult run_softplus_regression(const RegressionConfig& cfg = {});

// ---------------------------------------------------------------------------
// CSV output (header row + one record per line, %.17g fields)

void write_ground_truth_csv(const GroundTruthResult& r, std::ostream& out);
void write_classification_csv(const ClassificationResult& r,
                              std::ostream& out);
void write_variance_field_csv(const ClassificationResult& r,
                              std::ostream& out);
void write_regression_csv(const RegressionResult& r, std::ostream& out);
void write_regression_band_csv(const RegressionResult& r, std::ostream& out);

}  // namespace bperc
