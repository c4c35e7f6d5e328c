#include "bperc/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bperc {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014326779;  // 1 / sqrt(2*pi)
constexpr double kInvSqrt2 = 0.7071067811865475244;    // 1 / sqrt(2)
}  // namespace

void WeightPosterior::validate() const {
  if (cov.rows() != dim() || cov.cols() != dim()) {
    throw std::invalid_argument("WeightPosterior: covariance is " +
                                std::to_string(cov.rows()) + "x" +
                                std::to_string(cov.cols()) + " but mean has " +
                                std::to_string(dim()) + " entries");
  }
  if (!mean.allFinite() || !cov.allFinite()) {
    throw std::invalid_argument("WeightPosterior: non-finite entries");
  }
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  const double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw std::invalid_argument(
        "WeightPosterior: covariance asymmetric beyond tolerance");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov,
                                                    Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -1e-10 * std::max(cov.trace(), 0.0)) {
    throw std::invalid_argument(
        "WeightPosterior: covariance not positive semi-definite (min "
        "eigenvalue " +
        std::to_string(min_eig) + ")");
  }
}

WeightPosterior isotropic_posterior(Eigen::Index dim, double mean_value,
                                    double variance) {
  if (dim <= 0) throw std::invalid_argument("isotropic_posterior: dim <= 0");
  if (variance < 0.0) {
    throw std::invalid_argument("isotropic_posterior: negative variance");
  }
  return WeightPosterior{Eigen::VectorXd::Constant(dim, mean_value),
                         variance * Eigen::MatrixXd::Identity(dim, dim)};
}

double std_normal_pdf(double z) {
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

PartialMoments partial_moments(const Gaussian1D& g) {
  if (!(g.variance >= 0.0)) {
    throw std::invalid_argument("partial_moments: negative variance");
  }
  if (!std::isfinite(g.mean) || !std::isfinite(g.variance)) {
    throw std::invalid_argument("partial_moments: non-finite input");
  }
  PartialMoments m{};
  m.e1 = g.mean;
  m.e2 = g.mean * g.mean + g.variance;
  if (g.variance == 0.0) {
    // Point mass: Heaviside limits of the formulas below.
    m.p0 = g.mean > 0.0 ? 1.0 : (g.mean < 0.0 ? 0.0 : 0.5);
    m.t1 = std::max(0.0, g.mean);
    m.t2 = g.mean > 0.0 ? g.mean * g.mean : 0.0;
    m.pa = 0.0;
    return m;
  }
  const double sigma = std::sqrt(g.variance);
  const double z = g.mean / sigma;
  m.p0 = std_normal_cdf(z);
  m.pa = sigma * std_normal_pdf(z);  // == variance * N(0; mean, variance)
  m.t1 = g.mean * m.p0 + m.pa;
  m.t2 = m.e2 * m.p0 + g.mean * m.pa;
  return m;
}

Gaussian1D affine_forward(const WeightPosterior& w, const Eigen::VectorXd& x) {
  if (x.size() != w.dim()) {
    throw std::invalid_argument("affine_forward: input has " +
                                std::to_string(x.size()) +
                                " entries, posterior has " +
                                std::to_string(w.dim()));
  }
  Gaussian1D a;
  a.mean = x.dot(w.mean);
  a.variance = x.dot(w.cov * x);
  if (a.variance < 0.0) {
    // x'Cx is nonnegative for PSD C; below this threshold it is round-off.
    const double tol =
        1e-14 * (w.cov.trace() + 1.0) * std::max(1.0, x.squaredNorm());
    if (a.variance >= -tol) {
      a.variance = 0.0;
    } else {
      throw std::invalid_argument(
          "affine_forward: covariance not positive semi-definite");
    }
  }
  return a;
}

WeightPosterior posterior_reweight(const WeightPosterior& w,
                                   const Eigen::VectorXd& x,
                                   const Gaussian1D& prior_a,
                                   const Gaussian1D& updated_a) {
  if (x.size() != w.dim()) {
    throw std::invalid_argument("posterior_reweight: dimension mismatch");
  }
  if (!(prior_a.variance > 0.0)) {
    throw std::invalid_argument(
        "posterior_reweight: zero pre-activation variance (floor it first)");
  }
  const Eigen::VectorXd gain = (w.cov * x) / prior_a.variance;
  WeightPosterior out;
  out.mean = w.mean + gain * (updated_a.mean - prior_a.mean);
  out.cov = w.cov + (updated_a.variance - prior_a.variance) *
                        (gain * gain.transpose());
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

}  // namespace bperc
