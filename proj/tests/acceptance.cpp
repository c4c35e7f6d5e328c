// Acceptance suite. Runs every agreed criterion at its stated tolerance and
// prints one pass/fail line per criterion; exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "bperc/experiments.hpp"
#include "bperc/model_io.hpp"
#include "bperc/oracle.hpp"
#include "bperc/perceptron.hpp"
#include "bperc/rng.hpp"

using namespace bperc;

namespace {

int failures = 0;

void report(const std::string& name, bool pass, const std::string& details) {
  std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(),
              details.c_str());
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// Criterion 1: moment-matched posterior vs numerical ground truth over the
// default grid; mean mae in [0.05, 0.15], variance mae in [0.08, 0.20],
// >= 75% of grid points with mean error <= 0.2, under 30 s.
void criterion_ground_truth() {
  const auto t0 = std::chrono::steady_clock::now();
  const GroundTruthResult r = run_ground_truth_comparison();
  const double elapsed = seconds_since(t0);
  const double frac = r.frac_mean_err_below(0.2);
  const bool pass = r.mean_abs_err.mean >= 0.05 &&
                    r.mean_abs_err.mean <= 0.15 &&
                    r.var_abs_err.mean >= 0.08 && r.var_abs_err.mean <= 0.20 &&
                    frac >= 0.75 && elapsed <= 30.0;
  report("ground-truth posterior agreement", pass,
         "mean mae " + fmt(r.mean_abs_err.mean) + "+-" +
             fmt(r.mean_abs_err.stddev) + " in [0.05,0.15], var mae " +
             fmt(r.var_abs_err.mean) + "+-" + fmt(r.var_abs_err.stddev) +
             " in [0.08,0.20], frac(err<=0.2) " + fmt(frac) + " >= 0.75, " +
             fmt(elapsed) + "s <= 30s");
}

// Criterion 2: 50 sequential classification trials; median cosine to the
// true boundary direction >= 0.97 and median lattice accuracy >= 95%,
// under 10 s.
void criterion_classification() {
  const auto t0 = std::chrono::steady_clock::now();
  const ClassificationResult r = run_linear_classification();
  const double elapsed = seconds_since(t0);
  const bool pass = r.median_cosine >= 0.97 && r.median_accuracy >= 0.95 &&
                    elapsed <= 10.0;
  report("sequential classification", pass,
         "median cosine " + fmt(r.median_cosine) +
             " >= 0.97, median accuracy " + fmt(r.median_accuracy) +
             " >= 0.95, " + fmt(elapsed) + "s <= 10s");
}

// Criterion 3: 50 softplus-regression trials; mean Bayesian rmse no worse
// than the gradient baseline at every checkpoint, and less volatile (rmse
// standard deviation) at the first checkpoint, under 30 s.
void criterion_regression() {
  const auto t0 = std::chrono::steady_clock::now();
  const RegressionResult r = run_softplus_regression();
  const double elapsed = seconds_since(t0);
  bool ordering = true;
  std::string detail;
  for (std::size_t c = 0; c < r.checkpoint_ns.size(); ++c) {
    ordering = ordering && r.bp_rmse[c].mean <= r.grad_rmse[c].mean;
    detail += "n=" + std::to_string(r.checkpoint_ns[c]) + " " +
              fmt(r.bp_rmse[c].mean) + "<=" + fmt(r.grad_rmse[c].mean) + " ";
  }
  const bool volatility = r.bp_rmse[0].stddev < r.grad_rmse[0].stddev;
  const bool pass = ordering && volatility && elapsed <= 30.0;
  report("regression vs gradient baseline", pass,
         detail + "| sd(n=1) " + fmt(r.bp_rmse[0].stddev) + " < " +
             fmt(r.grad_rmse[0].stddev) + ", " + fmt(elapsed) + "s <= 30s");
}

// Criterion 4: closed-form moments vs quadrature on the dense grid
// (sigmoid within 0.02/0.04/0.03, piece-wise linear within 1e-8), and the
// linear-activation update equal to the conjugate posterior within 1e-12
// over 1000 randomized instances up to dimension 8.
void criterion_oracle_equivalence() {
  double sig_dm = 0.0, sig_dv = 0.0, sig_dc = 0.0, pwl_d = 0.0;
  const std::vector<Activation> pwls = {
      Activation::relu(), Activation::leaky_relu(0.1),
      Activation::pwl(0.3, 1.7), Activation::linear()};
  for (int i = 0; i <= 48; ++i) {
    const double mu = -6.0 + 0.25 * i;
    for (int j = 0; j <= 16; ++j) {
      const Gaussian1D a{mu, 0.25 * j};
      const OutputMoments sig = output_moments(Activation::sigmoid(), a);
      const OutputMoments s_or = quad_output_moments(Activation::sigmoid(), a);
      sig_dm = std::max(sig_dm, std::abs(sig.mu_y - s_or.mu_y));
      sig_dv = std::max(sig_dv, std::abs(sig.sigma_y2 - s_or.sigma_y2));
      sig_dc = std::max(sig_dc, std::abs(sig.sigma_ya - s_or.sigma_ya));
      for (const Activation& act : pwls) {
        const OutputMoments got = output_moments(act, a);
        const OutputMoments want = quad_output_moments(act, a);
        pwl_d = std::max(pwl_d, std::abs(got.mu_y - want.mu_y));
        pwl_d = std::max(pwl_d, std::abs(got.sigma_y2 - want.sigma_y2));
        pwl_d = std::max(pwl_d, std::abs(got.sigma_ya - want.sigma_ya));
      }
    }
  }

  double conj_d = 0.0;
  Rng rng(4711);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Index dim = 1 + static_cast<Eigen::Index>(rng.next_u64() % 8);
    Eigen::MatrixXd a(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
      for (Eigen::Index c = 0; c < dim; ++c) a(r, c) = rng.normal();
    }
    WeightPosterior prior;
    prior.cov = a * a.transpose();
    prior.cov = 0.5 * (prior.cov + prior.cov.transpose()).eval();
    prior.mean.resize(dim);
    for (Eigen::Index r = 0; r < dim; ++r) prior.mean(r) = rng.normal();
    Eigen::VectorXd x(dim);
    for (Eigen::Index r = 0; r < dim; ++r) x(r) = rng.normal();
    const double y = rng.normal(0.0, 2.0);
    const double epsilon = rng.uniform(1e-3, 2.0);
    const BayesianPerceptron model(dim, Activation::linear(), prior,
                                   /*bias=*/false, epsilon);
    const WeightPosterior got = model.update({x, y}).weights();
    const WeightPosterior want = exact_linear_posterior(prior, x, y, epsilon);
    conj_d = std::max(conj_d, (got.mean - want.mean).cwiseAbs().maxCoeff());
    conj_d = std::max(conj_d, (got.cov - want.cov).cwiseAbs().maxCoeff());
  }

  const bool pass = sig_dm <= 0.02 && sig_dv <= 0.04 && sig_dc <= 0.03 &&
                    pwl_d <= 1e-8 && conj_d <= 1e-12;
  report("oracle equivalence", pass,
         "sigmoid max err (" + fmt(sig_dm) + "," + fmt(sig_dv) + "," +
             fmt(sig_dc) + ") <= (0.02,0.04,0.03), pwl max err " + fmt(pwl_d) +
             " <= 1e-8, conjugate max err " + fmt(conj_d) + " <= 1e-12");
}

// Criterion 5: covariance symmetry and PSD across 10^4 randomized
// sequential updates, sigmoid output bounds on 10^5 random inputs, and
// central-difference agreement of the gradient baseline at 100 points per
// activation.
void criterion_structural_invariants() {
  bool symmetric = true, psd = true;
  Rng rng(31337);
  for (const Activation& act : {Activation::sigmoid(), Activation::relu()}) {
    BayesianPerceptron model(4, act, isotropic_posterior(4, 0.0, 1.0),
                             /*bias=*/false, 0.01);
    for (int i = 0; i < 5000; ++i) {
      Eigen::VectorXd x(4);
      for (Eigen::Index k = 0; k < 4; ++k) x(k) = rng.normal(0.0, 2.0);
      const double y = act.is_sigmoid()
                           ? static_cast<double>(rng.next_u64() % 2)
                           : rng.normal(0.0, 2.0);
      model = model.update({x, y});
      const Eigen::MatrixXd& cov = model.weights().cov;
      symmetric = symmetric &&
                  (cov - cov.transpose()).cwiseAbs().maxCoeff() == 0.0;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
          cov, Eigen::EigenvaluesOnly);
      psd = psd && es.eigenvalues().minCoeff() >=
                       -1e-10 * std::max(cov.trace(), 0.0);
    }
  }

  bool bounds = true;
  for (int i = 0; i < 100000; ++i) {
    const Gaussian1D a{rng.uniform(-50.0, 50.0), rng.uniform(0.0, 1000.0)};
    const auto [mu_y, sigma_y2] = sigmoid_mean_var(a);
    bounds = bounds && mu_y > 0.0 && mu_y < 1.0 && sigma_y2 >= 0.0 &&
             sigma_y2 < 0.25;
  }

  bool gradient_ok = true;
  for (const Activation& act :
       {Activation::sigmoid(), Activation::relu(), Activation::leaky_relu(0.1),
        Activation::linear()}) {
    int checked = 0;
    while (checked < 100) {
      ClassicPerceptron p;
      p.weights.resize(3);
      Eigen::VectorXd x(3);
      for (Eigen::Index k = 0; k < 3; ++k) {
        p.weights(k) = rng.normal();
        x(k) = rng.normal();
      }
      p.learning_rate = 0.05;
      p.activation = act;
      if (!act.is_sigmoid() && std::abs(p.weights.dot(x)) < 1e-3) continue;
      ++checked;
      const TrainingInstance inst{x, rng.normal(0.0, 2.0)};
      const Eigen::VectorXd delta =
          gradient_regression_step(p, inst).weights - p.weights;
      const double h = 1e-6;
      for (Eigen::Index k = 0; k < 3; ++k) {
        Eigen::VectorXd up = p.weights, dn = p.weights;
        up(k) += h;
        dn(k) -= h;
        const auto loss = [&](const Eigen::VectorXd& w) {
          const double r = inst.y - act(w.dot(x));
          return 0.5 * r * r;
        };
        const double fd = (loss(up) - loss(dn)) / (2.0 * h);
        gradient_ok =
            gradient_ok && std::abs(delta(k) + p.learning_rate * fd) <= 1e-6;
      }
    }
  }

  const bool pass = symmetric && psd && bounds && gradient_ok;
  report("structural invariants", pass,
         std::string("10^4 sequential updates: symmetry ") +
             (symmetric ? "exact" : "VIOLATED") + ", PSD " +
             (psd ? "held" : "VIOLATED") + "; sigmoid bounds on 10^5 inputs " +
             (bounds ? "held" : "VIOLATED") + "; finite-difference checks " +
             (gradient_ok ? "passed" : "FAILED"));
}

}  // namespace

int main() {
  criterion_ground_truth();
  criterion_classification();
  criterion_regression();
  criterion_oracle_equivalence();
  criterion_structural_invariants();
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
  } else {
    std::printf("all criteria passed\n");
  }
  return failures;
}
