#pragma once

// Independent ground-truth engines: adaptive quadrature and Monte Carlo
// for output moments, the numerically-exact posterior over the
// pre-activation, and the conjugate linear-Gaussian update. These back the
// expected values in the test suites and the ground-truth experiment; they
// share no code with the closed-form moment path they check.

#include <cstdint>
#include <functional>
#include <stdexcept>

#include "bperc/activation.hpp"
#include "bperc/gaussian.hpp"

namespace bperc {

struct QuadratureConfig {
  double abs_tol = 1e-10;
  double half_width_sigmas = 12.0;  // integration half-width, >= 8
  int max_subdivisions = 100000;
  int initial_panels = 64;  // uniform panels seeded before adapting
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved_error() const { return achieved_; }

 private:
  double achieved_;
};

// Adaptive Simpson over [lo, hi]. Throws QuadratureError with the achieved
// error estimate when the subdivision budget runs out before abs_tol.
double integrate_adaptive(const std::function<double(double)>& f, double lo,
                          double hi, const QuadratureConfig& cfg = {});

// Numerical E{f(a)}, var, and cov(y, a) under a ~ N(mean, variance).
// Point masses return (f(mean), 0, 0) analytically. Pwl integrands are
// split at the kink.
OutputMoments quad_output_moments(const Activation& act, const Gaussian1D& a,
                                  const QuadratureConfig& cfg = {});

// Mean and variance of p(a | y) with likelihood N(y; f(a), epsilon),
// normalized numerically over the prior's support. Requires epsilon > 0
// and prior.variance > 0; throws std::runtime_error when the normalization
// constant vanishes beyond numeric range.
Gaussian1D true_posterior_a(const Activation& act, const Gaussian1D& prior,
                            double y, double epsilon,
                            const QuadratureConfig& cfg = {});

// Conjugate Bayesian linear regression (scalar Kalman measurement update):
//   mean' = mean + C x (y - x'mean) / (x'Cx + epsilon)
//   cov'  = C - C x x' C / (x'Cx + epsilon)
WeightPosterior exact_linear_posterior(const WeightPosterior& w,
                                       const Eigen::VectorXd& x, double y,
                                       double epsilon);

struct McMoments {
  double mu_y = 0.0;
  double sigma_y2 = 0.0;
  double sigma_ya = 0.0;
  double se_mu_y = 0.0;
  double se_sigma_y2 = 0.0;
  double se_sigma_ya = 0.0;
};

// Sample moments over n_samples draws (>= 10^4), deterministic given the
// seed. Point masses return the exact values with zero standard errors.
McMoments mc_output_moments(const Activation& act, const Gaussian1D& a,
                            std::size_t n_samples, std::uint64_t seed);

}  // namespace bperc
