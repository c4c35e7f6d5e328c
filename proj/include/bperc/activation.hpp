#pragma once

// Closed-form output moments (mu_y, sigma_y^2) and cross-covariance
// sigma_ya for sigmoid and piece-wise linear activations under a Gaussian
// pre-activation belief. Sigmoid moments use the probit substitution and
// are close approximations; pwl moments are exact.

#include <utility>

#include "bperc/gaussian.hpp"

namespace bperc {

// Probit scaling that best matches the sigmoid, sqrt(pi / 8).
inline constexpr double kProbitLambda = 0.62665706865775012560;

enum class ActivationKind { kSigmoid, kPwl };

// Sigmoid, or the two-piece linear family f(a) = max(alpha*a, beta*a) with
// 0 <= alpha <= 1, beta >= 0, alpha <= beta. alpha=0, beta=1 is ReLU;
// beta=1 is leaky ReLU; alpha=beta=1 is the identity.
class Activation {
 public:
  static Activation sigmoid() { return Activation(); }
  static Activation pwl(double alpha, double beta);
  static Activation relu() { return pwl(0.0, 1.0); }
  static Activation leaky_relu(double slope) { return pwl(slope, 1.0); }
  static Activation linear() { return pwl(1.0, 1.0); }

  ActivationKind kind() const { return kind_; }
  bool is_sigmoid() const { return kind_ == ActivationKind::kSigmoid; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  // Pointwise f(a).
  double operator()(double a) const;
  // Pointwise derivative; pwl uses the lower slope alpha at the kink
  // (ReLU subgradient 0 at a == 0).
  double derivative(double a) const;

 private:
  Activation() : kind_(ActivationKind::kSigmoid) {}
  Activation(double alpha, double beta)
      : kind_(ActivationKind::kPwl), alpha_(alpha), beta_(beta) {}

  ActivationKind kind_;
  double alpha_ = 0.0;
  double beta_ = 0.0;
};

// Logistic function 1 / (1 + exp(-a)).
double logistic(double a);

struct OutputMoments {
  double mu_y = 0.0;
  double sigma_y2 = 0.0;
  double sigma_ya = 0.0;  // cov(y, a); nonnegative for these activations
};

// Probit-substitution approximations with t = sqrt(1 + lambda^2 * var):
//   mu_y      ~= s(mu_a / t)
//   sigma_y^2 ~= mu_y * (1 - mu_y) * (1 - 1/t)
// mu_y lies in (0,1) and sigma_y^2 in [0, 1/4); var == 0 gives (s(mu_a), 0).
std::pair<double, double> sigmoid_mean_var(const Gaussian1D& a);

// sigma_ya ~= (lambda * var / t) * N(lambda * mu_a / t; 0, 1).
double sigmoid_cross_cov(const Gaussian1D& a);

// Exact moments of max(alpha*a, beta*a):
//   mu_y      = alpha * e1 + (beta - alpha) * t1
//   sigma_y^2 = alpha^2 * e2 + (beta^2 - alpha^2) * t2 - mu_y^2
// The variance is clamped at zero against cancellation for tiny variances.
std::pair<double, double> pwl_mean_var(const Activation& act,
                                       const Gaussian1D& a);

// Exact sigma_ya = alpha * e2 + (beta - alpha) * t2 - mu_y * mu_a, where
// mu_y must be pwl_mean_var's mean for the same (act, a).
double pwl_cross_cov(const Activation& act, const Gaussian1D& a, double mu_y);

// Dispatches on the activation kind and returns all three moments.
OutputMoments output_moments(const Activation& act, const Gaussian1D& a);

}  // namespace bperc
