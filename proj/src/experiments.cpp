#include "bperc/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "bperc/rng.hpp"

namespace bperc {

namespace {

// Grid sizes built from indices so step accumulation cannot drift.
int grid_count(double lo, double hi, double step) {
  return static_cast<int>(std::llround((hi - lo) / step)) + 1;
}

double grid_value(double lo, double step, int i) { return lo + step * i; }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double softplus(double t) {
  if (t > 30.0) return t;  // log1p(exp(t)) == t to double precision
  return std::log1p(std::exp(t));
}

void put_field(std::ostream& out, double v, bool last = false) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf << (last ? '\n' : ',');
}

}  // namespace

// ---------------------------------------------------------------------------
// Metrics

double mae(std::span<const double> errors) {
  if (errors.empty()) throw std::invalid_argument("mae: empty input");
  double sum = 0.0;
  for (double e : errors) sum += std::abs(e);
  return sum / static_cast<double>(errors.size());
}

double mae(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) {
    throw std::invalid_argument("mae: length mismatch");
  }
  if (pred.empty()) throw std::invalid_argument("mae: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    sum += std::abs(pred[i] - truth[i]);
  }
  return sum / static_cast<double>(pred.size());
}

double rmse(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) {
    throw std::invalid_argument("rmse: length mismatch");
  }
  if (pred.empty()) throw std::invalid_argument("rmse: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - truth[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(pred.size()));
}

SummaryStat mean_and_stddev(std::span<const double> values) {
  if (values.empty()) {
    throw std::invalid_argument("mean_and_stddev: empty input");
  }
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return SummaryStat{mean, std::sqrt(ss / n)};
}

std::vector<std::pair<double, double>> cumulative_abs_error_distribution(
    std::span<const double> errors) {
  if (errors.empty()) {
    throw std::invalid_argument(
        "cumulative_abs_error_distribution: empty input");
  }
  std::vector<double> abs_errors(errors.size());
  std::transform(errors.begin(), errors.end(), abs_errors.begin(),
                 [](double e) { return std::abs(e); });
  std::sort(abs_errors.begin(), abs_errors.end());
  std::vector<std::pair<double, double>> cdf;
  const double n = static_cast<double>(abs_errors.size());
  for (std::size_t i = 0; i < abs_errors.size(); ++i) {
    const double v = abs_errors[i];
    if (i + 1 < abs_errors.size() && abs_errors[i + 1] == v) continue;
    cdf.emplace_back(v, static_cast<double>(i + 1) / n);
  }
  return cdf;
}

// ---------------------------------------------------------------------------
// Deterministic baselines

ClassicPerceptron perceptron_rule_step(const ClassicPerceptron& p,
                                       const TrainingInstance& inst) {
  if (inst.x.size() != p.weights.size()) {
    throw std::invalid_argument("perceptron_rule_step: dimension mismatch");
  }
  const double err = inst.y - p.activation(p.weights.dot(inst.x));
  ClassicPerceptron out = p;
  out.weights += p.learning_rate * err * inst.x;
  return out;
}

ClassicPerceptron gradient_regression_step(const ClassicPerceptron& p,
                                           const TrainingInstance& inst) {
  if (inst.x.size() != p.weights.size()) {
    throw std::invalid_argument(
        "gradient_regression_step: dimension mismatch");
  }
  const double a = p.weights.dot(inst.x);
  const double err = inst.y - p.activation(a);
  ClassicPerceptron out = p;
  out.weights += p.learning_rate * err * p.activation.derivative(a) * inst.x;
  return out;
}

// ---------------------------------------------------------------------------
// Ground-truth comparison

double GroundTruthResult::frac_mean_err_below(double threshold) const {
  if (records.empty()) return 0.0;
  const auto below = std::count_if(
      records.begin(), records.end(),
      [&](const GroundTruthRecord& r) { return r.err_mean <= threshold; });
  return static_cast<double>(below) / static_cast<double>(records.size());
}

GroundTruthResult run_ground_truth_comparison(const GroundTruthConfig& cfg) {
  const Activation act = Activation::sigmoid();
  GroundTruthResult result;
  result.config = cfg;

  const int n_mu = grid_count(cfg.mu_lo, cfg.mu_hi, cfg.mu_step);
  const int n_var = grid_count(cfg.var_lo, cfg.var_hi, cfg.var_step);
  result.records.reserve(static_cast<std::size_t>(n_mu) * n_var);

  for (int i = 0; i < n_mu; ++i) {
    const double mu_a = grid_value(cfg.mu_lo, cfg.mu_step, i);
    const double y = mu_a > 0.0 ? 1.0 : 0.0;
    for (int j = 0; j < n_var; ++j) {
      const double sigma_a2 = grid_value(cfg.var_lo, cfg.var_step, j);
      const Gaussian1D prior{
          mu_a, std::max(sigma_a2, BayesianPerceptron::kVarianceFloor)};

      // Moment-matched conditional: scalar gain on the prediction.
      const OutputMoments m = output_moments(act, prior);
      const double k = m.sigma_ya / (m.sigma_y2 + cfg.epsilon);
      GroundTruthRecord rec;
      rec.mu_a = mu_a;
      rec.sigma_a2 = sigma_a2;
      rec.y = y;
      rec.approx_mean = prior.mean + k * (y - m.mu_y);
      rec.approx_var = prior.variance - k * m.sigma_ya;

      const Gaussian1D truth =
          true_posterior_a(act, prior, y, cfg.epsilon, cfg.quad);
      rec.true_mean = truth.mean;
      rec.true_var = truth.variance;
      rec.err_mean = std::abs(rec.approx_mean - rec.true_mean);
      rec.err_var = std::abs(rec.approx_var - rec.true_var);
      result.records.push_back(rec);
    }
  }

  std::vector<double> errs_mean, errs_var;
  errs_mean.reserve(result.records.size());
  errs_var.reserve(result.records.size());
  for (const auto& r : result.records) {
    errs_mean.push_back(r.err_mean);
    errs_var.push_back(r.err_var);
  }
  result.mean_abs_err = mean_and_stddev(errs_mean);
  result.var_abs_err = mean_and_stddev(errs_var);
  result.mean_err_cdf = cumulative_abs_error_distribution(errs_mean);
  result.var_err_cdf = cumulative_abs_error_distribution(errs_var);
  return result;
}

// ---------------------------------------------------------------------------
// Linear binary classification

ClassificationResult run_linear_classification(
    const ClassificationConfig& cfg) {
  if (cfg.trials < 1) {
    throw std::invalid_argument("run_linear_classification: trials < 1");
  }
  ClassificationResult result;
  result.config = cfg;
  result.trials.reserve(cfg.trials);

  const int n_lat = grid_count(cfg.lattice_lo, cfg.lattice_hi,
                               cfg.lattice_step);

  for (int trial = 0; trial < cfg.trials; ++trial) {
    Rng rng(sub_seed(cfg.seed, static_cast<std::uint64_t>(trial)));

    std::vector<TrainingInstance> data(cfg.n_instances);
    for (auto& inst : data) {
      inst.x = Eigen::Vector2d(rng.uniform(cfg.data_lo, cfg.data_hi),
                               rng.uniform(cfg.data_lo, cfg.data_hi));
      inst.y = inst.x.sum() > 0.0 ? 1.0 : 0.0;
    }

    WeightPosterior prior;
    prior.mean = Eigen::Vector2d(cfg.prior_mean0, cfg.prior_mean1);
    prior.cov = Eigen::Matrix2d::Identity();
    BayesianPerceptron model(2, Activation::sigmoid(), prior,
                             /*bias=*/false, cfg.epsilon);
    model = model.fit(data);

    ClassificationTrial rec;
    rec.trial = trial;
    rec.posterior = model.weights();
    const Eigen::Vector2d target(1.0, 1.0);
    const double norm = rec.posterior.mean.norm();
    rec.cosine_similarity =
        norm > 0.0 ? rec.posterior.mean.dot(target) / (norm * target.norm())
                   : 0.0;
    rec.angle_error_deg =
        std::acos(std::clamp(rec.cosine_similarity, -1.0, 1.0)) * 180.0 /
        3.14159265358979323846;

    int correct = 0;
    int n_near = 0, n_far = 0;
    double var_near = 0.0, var_far = 0.0;
    for (int ix = 0; ix < n_lat; ++ix) {
      const double x1 = grid_value(cfg.lattice_lo, cfg.lattice_step, ix);
      for (int iy = 0; iy < n_lat; ++iy) {
        const double x2 = grid_value(cfg.lattice_lo, cfg.lattice_step, iy);
        const Eigen::Vector2d x(x1, x2);
        const Prediction p = model.predict(x);
        const int truth = x1 + x2 > 0.0 ? 1 : 0;
        correct += (p.mu_y > 0.5 ? 1 : 0) == truth;

        double dmin = std::numeric_limits<double>::infinity();
        for (const auto& inst : data) {
          dmin = std::min(dmin, (x - inst.x).norm());
        }
        if (dmin <= cfg.near_distance) {
          var_near += p.sigma_a2;
          ++n_near;
        } else if (dmin > cfg.far_distance) {
          var_far += p.sigma_a2;
          ++n_far;
        }
        if (trial == 0) {
          result.first_trial_field.push_back(
              FieldPoint{x1, x2, p.mu_y, p.sigma_a2});
        }
      }
    }
    rec.lattice_accuracy =
        static_cast<double>(correct) / static_cast<double>(n_lat * n_lat);
    rec.var_near_mean = n_near > 0 ? var_near / n_near : 0.0;
    rec.var_far_mean = n_far > 0 ? var_far / n_far : 0.0;
    result.trials.push_back(std::move(rec));
  }

  std::vector<double> cosines, accuracies;
  for (const auto& t : result.trials) {
    cosines.push_back(t.cosine_similarity);
    accuracies.push_back(t.lattice_accuracy);
  }
  result.median_cosine = median(cosines);
  result.median_accuracy = median(accuracies);
  return result;
}

// ---------------------------------------------------------------------------
// Softplus regression

RegressionResult run_softplus_regression(const RegressionConfig& cfg) {
  if (cfg.trials < 1) {
    throw std::invalid_argument("run_softplus_regression: trials < 1");
  }
  using clock = std::chrono::steady_clock;
  RegressionResult result;
  result.config = cfg;
  result.checkpoint_ns = cfg.checkpoints;
  result.trials.reserve(cfg.trials);

  const double noise_sd = std::sqrt(cfg.noise_var);
  auto target = [&](double x) { return softplus(cfg.gamma * x + cfg.delta); };

  for (int trial = 0; trial < cfg.trials; ++trial) {
    Rng rng(sub_seed(cfg.seed, static_cast<std::uint64_t>(trial)));

    std::vector<TrainingInstance> train(cfg.n_train);
    for (auto& inst : train) {
      const double x = rng.uniform(cfg.train_lo, cfg.train_hi);
      inst.x = Eigen::VectorXd::Constant(1, x);
      inst.y = target(x) + rng.normal(0.0, noise_sd);
    }
    std::vector<double> test_x(cfg.n_test), test_y(cfg.n_test);
    for (int i = 0; i < cfg.n_test; ++i) {
      test_x[i] = rng.uniform(cfg.test_lo, cfg.test_hi);
      test_y[i] = target(test_x[i]) + rng.normal(0.0, noise_sd);
    }

    BayesianPerceptron model(1, Activation::relu(),
                             isotropic_posterior(2, 0.0, 1.0),
                             /*bias=*/true, cfg.epsilon);
    ClassicPerceptron grad;
    grad.weights = Eigen::Vector2d(rng.normal(0.0, cfg.grad_init_sd),
                                   rng.normal(0.0, cfg.grad_init_sd));
    grad.learning_rate = cfg.grad_learning_rate;
    grad.activation = Activation::relu();

    RegressionTrial rec;
    rec.trial = trial;
    double bp_time = 0.0, grad_time = 0.0;

    for (int i = 0; i < cfg.n_train; ++i) {
      auto t0 = clock::now();
      model = model.update(train[i]);
      auto t1 = clock::now();
      bp_time += std::chrono::duration<double>(t1 - t0).count();

      TrainingInstance aug;
      aug.x = Eigen::Vector2d(1.0, train[i].x(0));
      aug.y = train[i].y;
      t0 = clock::now();
      for (int e = 0; e < cfg.grad_epochs; ++e) {
        grad = gradient_regression_step(grad, aug);
      }
      t1 = clock::now();
      grad_time += std::chrono::duration<double>(t1 - t0).count();

      const int n = i + 1;
      if (std::find(cfg.checkpoints.begin(), cfg.checkpoints.end(), n) ==
          cfg.checkpoints.end()) {
        continue;
      }
      std::vector<double> bp_pred(cfg.n_test), grad_pred(cfg.n_test);
      for (int k = 0; k < cfg.n_test; ++k) {
        bp_pred[k] =
            model.predict(Eigen::VectorXd::Constant(1, test_x[k])).mu_y;
        grad_pred[k] =
            grad.activation(grad.weights.dot(Eigen::Vector2d(1.0, test_x[k])));
      }
      RegressionCheckpoint cp;
      cp.n = n;
      cp.bp_rmse = rmse(bp_pred, test_y);
      cp.grad_rmse = rmse(grad_pred, test_y);
      cp.bp_time_s = bp_time;
      cp.grad_time_s = grad_time;
      rec.checkpoints.push_back(cp);

      std::vector<BandSample> band(cfg.band_points);
      for (int k = 0; k < cfg.band_points; ++k) {
        const double x =
            cfg.test_lo + (cfg.test_hi - cfg.test_lo) * k /
                              std::max(1, cfg.band_points - 1);
        const Prediction p = model.predict(Eigen::VectorXd::Constant(1, x));
        band[k] = BandSample{x, p.mu_y, std::sqrt(p.sigma_y2)};
      }
      rec.bands.push_back(std::move(band));
    }
    result.trials.push_back(std::move(rec));
  }

  // Aggregate per checkpoint across trials. Checkpoints beyond n_train are
  // never reached and aggregate to zeros.
  for (std::size_t c = 0; c < result.checkpoint_ns.size(); ++c) {
    std::vector<double> bp, gr, bpt, grt;
    for (const auto& t : result.trials) {
      if (c < t.checkpoints.size()) {
        bp.push_back(t.checkpoints[c].bp_rmse);
        gr.push_back(t.checkpoints[c].grad_rmse);
        bpt.push_back(t.checkpoints[c].bp_time_s);
        grt.push_back(t.checkpoints[c].grad_time_s);
      }
    }
    result.bp_rmse.push_back(bp.empty() ? SummaryStat{} : mean_and_stddev(bp));
    result.grad_rmse.push_back(gr.empty() ? SummaryStat{}
                                          : mean_and_stddev(gr));
    result.bp_time_s.push_back(bpt.empty() ? SummaryStat{}
                                           : mean_and_stddev(bpt));
    result.grad_time_s.push_back(grt.empty() ? SummaryStat{}
                                             : mean_and_stddev(grt));
  }
  return result;
}

// ---------------------------------------------------------------------------
// CSV output

void write_ground_truth_csv(const GroundTruthResult& r, std::ostream& out) {
  out << "mu_a,sigma_a2,y,approx_mean,approx_var,true_mean,true_var,"
         "err_mean,err_var\n";
  for (const auto& rec : r.records) {
    put_field(out, rec.mu_a);
    put_field(out, rec.sigma_a2);
    put_field(out, rec.y);
    put_field(out, rec.approx_mean);
    put_field(out, rec.approx_var);
    put_field(out, rec.true_mean);
    put_field(out, rec.true_var);
    put_field(out, rec.err_mean);
    put_field(out, rec.err_var, true);
  }
}

void write_classification_csv(const ClassificationResult& r,
                              std::ostream& out) {
  out << "trial,cosine_similarity,angle_error_deg,lattice_accuracy,"
         "var_near_mean,var_far_mean,mean0,mean1,cov00,cov01,cov11\n";
  for (const auto& t : r.trials) {
    out << t.trial << ',';
    put_field(out, t.cosine_similarity);
    put_field(out, t.angle_error_deg);
    put_field(out, t.lattice_accuracy);
    put_field(out, t.var_near_mean);
    put_field(out, t.var_far_mean);
    put_field(out, t.posterior.mean(0));
    put_field(out, t.posterior.mean(1));
    put_field(out, t.posterior.cov(0, 0));
    put_field(out, t.posterior.cov(0, 1));
    put_field(out, t.posterior.cov(1, 1), true);
  }
}

void write_variance_field_csv(const ClassificationResult& r,
                              std::ostream& out) {
  out << "x1,x2,mu_y,sigma_a2\n";
  for (const auto& p : r.first_trial_field) {
    put_field(out, p.x1);
    put_field(out, p.x2);
    put_field(out, p.mu_y);
    put_field(out, p.sigma_a2, true);
  }
}

void write_regression_csv(const RegressionResult& r, std::ostream& out) {
  out << "trial,checkpoint_n,bp_rmse,grad_rmse,bp_time_s,grad_time_s\n";
  for (const auto& t : r.trials) {
    for (const auto& cp : t.checkpoints) {
      out << t.trial << ',' << cp.n << ',';
      put_field(out, cp.bp_rmse);
      put_field(out, cp.grad_rmse);
      put_field(out, cp.bp_time_s);
      put_field(out, cp.grad_time_s, true);
    }
  }
}

void write_regression_band_csv(const RegressionResult& r, std::ostream& out) {
  out << "trial,checkpoint_n,x,mu_y,sigma_y\n";
  for (const auto& t : r.trials) {
    for (std::size_t c = 0; c < t.checkpoints.size(); ++c) {
      for (const auto& s : t.bands[c]) {
        out << t.trial << ',' << t.checkpoints[c].n << ',';
        put_field(out, s.x);
        put_field(out, s.mu_y);
        put_field(out, s.sigma_y, true);
      }
    }
  }
}

}  // namespace bperc
