#pragma once

// Scalar and vector Gaussian primitives: densities, the probit CDF,
// truncated raw moments, the linear prediction step, and the rank-1
// posterior reweighting used by the backward pass.

#include <Eigen/Dense>

namespace bperc {

// Scalar Gaussian belief (mean, variance). variance >= 0.
struct Gaussian1D {
  double mean = 0.0;
  double variance = 0.0;
};

// Gaussian belief over the (possibly bias-augmented) weight vector.
// When bias-augmented, entry 0 of the mean is the bias weight.
struct WeightPosterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  Eigen::Index dim() const { return mean.size(); }

  // Throws std::invalid_argument if dimensions disagree, the covariance is
  // asymmetric beyond 1e-12 relative tolerance, or an eigenvalue falls
  // below -1e-10 * trace.
  void validate() const;
};

// N(mean_value * 1, variance * I) over `dim` weights.
WeightPosterior isotropic_posterior(Eigen::Index dim, double mean_value,
                                    double variance);

// Probability mass and raw moments of a scalar Gaussian split at zero.
struct PartialMoments {
  double p0;  // Prob(a >= 0)
  double t1;  // integral of a * p(a) over [0, inf)
  double t2;  // integral of a^2 * p(a) over [0, inf)
  double e1;  // full first raw moment (= mean)
  double e2;  // full second raw moment (= mean^2 + variance)
  double pa;  // variance * p(0)
};

// Standard normal density (2*pi)^(-1/2) * exp(-z^2 / 2).
double std_normal_pdf(double z);

// Standard normal CDF, 0.5 * erfc(-z / sqrt(2)). The erfc form keeps the
// lower tail accurate where 1 + erf cancels.
double std_normal_cdf(double z);

// Closed-form split moments. Point masses (variance == 0) use the explicit
// limits: p0 is the Heaviside step (1/2 at mean == 0), t1 = max(0, mean),
// t2 = mean^2 * step, pa = 0. Throws std::invalid_argument on negative
// variance.
PartialMoments partial_moments(const Gaussian1D& g);

// Pre-activation belief of x' * w: mean = x' * mu, variance = x' * C * x.
// Round-off negatives below 1e-14 * (trace + 1) are clamped to zero.
// Throws std::invalid_argument on dimension mismatch.
Gaussian1D affine_forward(const WeightPosterior& w, const Eigen::VectorXd& x);

// Smoother-form weight update: folds a refined pre-activation belief back
// into the weight posterior along gain l = C * x / sigma_a^2.
//   mean' = mean + l * (updated.mean - prior.mean)
//   cov'  = cov + l * (updated.variance - prior.variance) * l'
// The result is re-symmetrized. Requires prior_a.variance > 0 (callers
// floor degenerate variances first); prior_a must be affine_forward(w, x).
WeightPosterior posterior_reweight(const WeightPosterior& w,
                                   const Eigen::VectorXd& x,
                                   const Gaussian1D& prior_a,
                                   const Gaussian1D& updated_a);

}  // namespace bperc
