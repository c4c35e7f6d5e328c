#include "bperc/activation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace bperc {

Activation Activation::pwl(double alpha, double beta) {
  if (!(alpha >= 0.0 && alpha <= 1.0 && beta >= 0.0 && alpha <= beta)) {
    throw std::invalid_argument(
        "Activation::pwl: requires 0 <= alpha <= 1, beta >= 0, alpha <= beta "
        "(got alpha=" +
        std::to_string(alpha) + ", beta=" + std::to_string(beta) + ")");
  }
  return Activation(alpha, beta);
}

double logistic(double a) { return 1.0 / (1.0 + std::exp(-a)); }

double Activation::operator()(double a) const {
  if (kind_ == ActivationKind::kSigmoid) return logistic(a);
  return std::max(alpha_ * a, beta_ * a);
}

double Activation::derivative(double a) const {
  if (kind_ == ActivationKind::kSigmoid) {
    const double s = logistic(a);
    return s * (1.0 - s);
  }
  return a > 0.0 ? beta_ : alpha_;
}

std::pair<double, double> sigmoid_mean_var(const Gaussian1D& a) {
  if (!(a.variance >= 0.0)) {
    throw std::invalid_argument("sigmoid_mean_var: negative variance");
  }
  const double t =
      std::sqrt(1.0 + kProbitLambda * kProbitLambda * a.variance);
  // The logistic saturates to 0 or 1 in floating point around |z| > 37;
  // the mean must stay inside the open unit interval.
  const double mu_y =
      std::clamp(logistic(a.mean / t), std::numeric_limits<double>::min(),
                 std::nextafter(1.0, 0.0));
  const double sigma_y2 = std::min(mu_y * (1.0 - mu_y) * (1.0 - 1.0 / t),
                                   std::nextafter(0.25, 0.0));
  return {mu_y, sigma_y2};
}

double sigmoid_cross_cov(const Gaussian1D& a) {
  if (!(a.variance >= 0.0)) {
    throw std::invalid_argument("sigmoid_cross_cov: negative variance");
  }
  if (a.variance == 0.0) return 0.0;
  const double t =
      std::sqrt(1.0 + kProbitLambda * kProbitLambda * a.variance);
  return kProbitLambda * a.variance / t *
         std_normal_pdf(kProbitLambda * a.mean / t);
}

std::pair<double, double> pwl_mean_var(const Activation& act,
                                       const Gaussian1D& a) {
  if (act.kind() != ActivationKind::kPwl) {
    throw std::invalid_argument("pwl_mean_var: sigmoid activation passed");
  }
  const PartialMoments m = partial_moments(a);
  const double alpha = act.alpha();
  const double beta = act.beta();
  const double mu_y = alpha * m.e1 + (beta - alpha) * m.t1;
  const double c = beta * beta - alpha * alpha;
  // Cancellation of t2-terms against mu_y^2 can leave round-off negatives.
  const double sigma_y2 =
      std::max(alpha * alpha * m.e2 + c * m.t2 - mu_y * mu_y, 0.0);
  return {mu_y, sigma_y2};
}

double pwl_cross_cov(const Activation& act, const Gaussian1D& a,
                     double mu_y) {
  if (act.kind() != ActivationKind::kPwl) {
    throw std::invalid_argument("pwl_cross_cov: sigmoid activation passed");
  }
  const PartialMoments m = partial_moments(a);
  const double alpha = act.alpha();
  const double beta = act.beta();
  return std::max(
      alpha * m.e2 + (beta - alpha) * m.t2 - mu_y * a.mean, 0.0);
}

OutputMoments output_moments(const Activation& act, const Gaussian1D& a) {
  OutputMoments out;
  if (act.is_sigmoid()) {
    std::tie(out.mu_y, out.sigma_y2) = sigmoid_mean_var(a);
    out.sigma_ya = sigmoid_cross_cov(a);
  } else {
    std::tie(out.mu_y, out.sigma_y2) = pwl_mean_var(act, a);
    out.sigma_ya = pwl_cross_cov(act, a, out.mu_y);
  }
  return out;
}

}  // namespace bperc
