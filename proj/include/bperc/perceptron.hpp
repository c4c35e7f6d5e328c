#pragma once

// The Bayesian perceptron: a Gaussian weight belief plus an activation,
// with a closed-form forward pass (prediction) and a gradient-free
// sequential backward pass (training).
//
// Models are immutable values: predict may be called concurrently on a
// shared model, and update/fit return new models instead of mutating.
// Training is order-dependent by construction.

#include <span>
#include <vector>

#include "bperc/activation.hpp"
#include "bperc/gaussian.hpp"

namespace bperc {

// Full forward-pass result. sigma_y2 excludes the output-noise epsilon;
// epsilon only enters the update's gain.
struct Prediction {
  double mu_y = 0.0;
  double sigma_y2 = 0.0;
  double mu_a = 0.0;
  double sigma_a2 = 0.0;
};

struct TrainingInstance {
  Eigen::VectorXd x;
  double y = 0.0;
};

struct Classification {
  int label = 0;  // 1 iff mu_y > threshold
  double mu_y = 0.0;
};

class BayesianPerceptron {
 public:
  // Matches the noise variance of typical synthetic regression targets.
  static constexpr double kDefaultEpsilon = 0.01;
  // Gains divide by sigma_a^2; degenerate priors are floored to this.
  static constexpr double kVarianceFloor = 1e-12;

  // Prior over input_dim weights, plus a leading bias weight when
  // bias is true. The prior dimension must match.
  BayesianPerceptron(Eigen::Index input_dim, Activation activation,
                     WeightPosterior prior, bool bias = true,
                     double epsilon = kDefaultEpsilon);

  // N(0, I) prior of the right dimension.
  static BayesianPerceptron standard(Eigen::Index input_dim,
                                     Activation activation, bool bias = true,
                                     double epsilon = kDefaultEpsilon);

  Eigen::Index input_dim() const { return input_dim_; }
  bool has_bias() const { return bias_; }
  double epsilon() const { return epsilon_; }
  const Activation& activation() const { return activation_; }
  const WeightPosterior& weights() const { return weights_; }
  Eigen::Index weight_dim() const { return weights_.dim(); }

  // [1; x] when the bias is configured, x otherwise.
  Eigen::VectorXd augment(const Eigen::VectorXd& x) const;

  // Forward pass: pre-activation belief then activation moments.
  Prediction predict(const Eigen::VectorXd& x) const;

  // Backward pass for one instance; returns the updated model. The gain
  // uses sigma_y^2 + epsilon. Throws on non-finite inputs or when the
  // effective output variance is zero (epsilon == 0 with a deterministic
  // output).
  [[nodiscard]] BayesianPerceptron update(const TrainingInstance& inst) const;

  // Left fold of update over the data, strictly in order. Errors are
  // rethrown with the offending instance index.
  [[nodiscard]] BayesianPerceptron fit(
      std::span<const TrainingInstance> data) const;

  // In-place convenience over the functional update/fit contract.
  void train(const TrainingInstance& inst) { *this = update(inst); }
  void train(std::span<const TrainingInstance> data) { *this = fit(data); }

  // Thresholded decision over mu_y = Prob(y = 1 | x). Ties at the
  // threshold go to class 0. Sigmoid models only.
  Classification classify(const Eigen::VectorXd& x,
                          double threshold = 0.5) const;

 private:
  Eigen::Index input_dim_;
  Activation activation_;
  WeightPosterior weights_;
  bool bias_;
  double epsilon_;
};

}  // namespace bperc
