#include "bperc/perceptron.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bperc {

BayesianPerceptron::BayesianPerceptron(Eigen::Index input_dim,
                                       Activation activation,
                                       WeightPosterior prior, bool bias,
                                       double epsilon)
    : input_dim_(input_dim),
      activation_(activation),
      weights_(std::move(prior)),
      bias_(bias),
      epsilon_(epsilon) {
  if (input_dim_ <= 0) {
    throw std::invalid_argument("BayesianPerceptron: input_dim <= 0");
  }
  if (!(epsilon_ >= 0.0)) {
    throw std::invalid_argument("BayesianPerceptron: epsilon < 0");
  }
  const Eigen::Index expected = input_dim_ + (bias_ ? 1 : 0);
  if (weights_.dim() != expected) {
    throw std::invalid_argument(
        "BayesianPerceptron: prior has " + std::to_string(weights_.dim()) +
        " weights, expected " + std::to_string(expected));
  }
  weights_.validate();
}

BayesianPerceptron BayesianPerceptron::standard(Eigen::Index input_dim,
                                                Activation activation,
                                                bool bias, double epsilon) {
  const Eigen::Index dim = input_dim + (bias ? 1 : 0);
  return BayesianPerceptron(input_dim, activation,
                            isotropic_posterior(dim, 0.0, 1.0), bias,
                            epsilon);
}

Eigen::VectorXd BayesianPerceptron::augment(const Eigen::VectorXd& x) const {
  if (!bias_) return x;
  Eigen::VectorXd xa(x.size() + 1);
  xa(0) = 1.0;
  xa.tail(x.size()) = x;
  return xa;
}

Prediction BayesianPerceptron::predict(const Eigen::VectorXd& x) const {
  if (x.size() != input_dim_) {
    throw std::invalid_argument("predict: input has " +
                                std::to_string(x.size()) +
                                " entries, expected " +
                                std::to_string(input_dim_));
  }
  const Gaussian1D a = affine_forward(weights_, augment(x));
  const OutputMoments m = output_moments(activation_, a);
  return Prediction{m.mu_y, m.sigma_y2, a.mean, a.variance};
}

BayesianPerceptron BayesianPerceptron::update(
    const TrainingInstance& inst) const {
  if (!inst.x.allFinite() || !std::isfinite(inst.y)) {
    throw std::invalid_argument("update: non-finite training instance");
  }
  if (inst.x.size() != input_dim_) {
    throw std::invalid_argument("update: input has " +
                                std::to_string(inst.x.size()) +
                                " entries, expected " +
                                std::to_string(input_dim_));
  }
  const Eigen::VectorXd xa = augment(inst.x);
  const Gaussian1D prior_a = affine_forward(weights_, xa);
  const OutputMoments m = output_moments(activation_, prior_a);

  const double sigma_y2_eff = m.sigma_y2 + epsilon_;
  if (!(sigma_y2_eff > 0.0)) {
    throw std::invalid_argument(
        "update: zero effective output variance (set epsilon > 0)");
  }

  // Scalar measurement update on the pre-activation belief. The sigmoid
  // moments are approximate and can overshoot Cauchy-Schwarz for tiny
  // epsilon, so the refined variance is clamped at zero to keep the weight
  // covariance positive semi-definite.
  const double k = m.sigma_ya / sigma_y2_eff;
  Gaussian1D updated_a;
  updated_a.mean = prior_a.mean + k * (inst.y - m.mu_y);
  updated_a.variance = std::max(prior_a.variance - k * m.sigma_ya, 0.0);

  Gaussian1D floored = prior_a;
  floored.variance = std::max(floored.variance, kVarianceFloor);

  BayesianPerceptron out = *this;
  out.weights_ = posterior_reweight(weights_, xa, floored, updated_a);
  return out;
}

BayesianPerceptron BayesianPerceptron::fit(
    std::span<const TrainingInstance> data) const {
  BayesianPerceptron model = *this;
  for (std::size_t i = 0; i < data.size(); ++i) {
    try {
      model = model.update(data[i]);
    } catch (const std::exception& e) {
      throw std::runtime_error("fit: update failed at instance " +
                               std::to_string(i) + ": " + e.what());
    }
  }
  return model;
}

Classification BayesianPerceptron::classify(const Eigen::VectorXd& x,
                                            double threshold) const {
  if (!activation_.is_sigmoid()) {
    throw std::invalid_argument("classify: requires a sigmoid activation");
  }
  const double mu_y = predict(x).mu_y;
  return Classification{mu_y > threshold ? 1 : 0, mu_y};
}

}  // namespace bperc
