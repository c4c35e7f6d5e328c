#include "bperc/oracle.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "bperc/rng.hpp"
#include "test_util.hpp"

using namespace bperc;
using bperc::testing::random_posterior;
using bperc::testing::random_vector;

TEST(IntegrateAdaptive, PolynomialsAndGaussians) {
  EXPECT_NEAR(integrate_adaptive([](double t) { return t * t; }, 0.0, 3.0),
              9.0, 1e-12);
  EXPECT_NEAR(integrate_adaptive(std_normal_pdf, -12.0, 12.0), 1.0, 1e-12);
  EXPECT_NEAR(
      integrate_adaptive([](double t) { return t * std_normal_pdf(t); },
                         -12.0, 12.0),
      0.0, 1e-12);
}

TEST(IntegrateAdaptive, ReportsNonConvergence) {
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-14;
  cfg.initial_panels = 1;
  cfg.max_subdivisions = 0;
  auto narrow_spike = [](double t) {
    return std_normal_pdf(t * 1e4) * 1e4;  // sd 1e-4 around zero
  };
  try {
    (void)integrate_adaptive(narrow_spike, -1.0, 1.0, cfg);
    FAIL() << "expected QuadratureError";
  } catch (const QuadratureError& e) {
    EXPECT_GT(e.achieved_error(), cfg.abs_tol);
  }
}

TEST(QuadOutputMoments, LinearClosedForm) {
  const OutputMoments m =
      quad_output_moments(Activation::linear(), {1.7, 2.3});
  EXPECT_NEAR(m.mu_y, 1.7, 1e-9);
  EXPECT_NEAR(m.sigma_y2, 2.3, 1e-9);
  EXPECT_NEAR(m.sigma_ya, 2.3, 1e-9);
}

TEST(QuadOutputMoments, ReluHalfGaussianClosedForms) {
  // Independent hand derivation: E{max(0,a)} = 1/sqrt(2 pi),
  // var = 1/2 - 1/(2 pi), cov = 1/2 for a ~ N(0, 1).
  const OutputMoments m = quad_output_moments(Activation::relu(), {0.0, 1.0});
  EXPECT_NEAR(m.mu_y, 0.39894228040143268, 1e-9);
  EXPECT_NEAR(m.sigma_y2, 0.34084505690810466, 1e-9);
  EXPECT_NEAR(m.sigma_ya, 0.5, 1e-9);
}

TEST(QuadOutputMoments, SigmoidSymmetryAndPointMass) {
  EXPECT_NEAR(quad_output_moments(Activation::sigmoid(), {0.0, 1.0}).mu_y,
              0.5, 1e-10);
  const OutputMoments point =
      quad_output_moments(Activation::sigmoid(), {2.0, 0.0});
  EXPECT_DOUBLE_EQ(point.mu_y, logistic(2.0));
  EXPECT_DOUBLE_EQ(point.sigma_y2, 0.0);
  EXPECT_DOUBLE_EQ(point.sigma_ya, 0.0);
}

TEST(QuadOutputMoments, StableUnderHalfWidth) {
  QuadratureConfig narrow, wide;
  narrow.half_width_sigmas = 10.0;
  wide.half_width_sigmas = 14.0;
  for (const Activation& act : {Activation::sigmoid(), Activation::relu()}) {
    const OutputMoments a = quad_output_moments(act, {1.0, 2.0}, narrow);
    const OutputMoments b = quad_output_moments(act, {1.0, 2.0}, wide);
    EXPECT_NEAR(a.mu_y, b.mu_y, 1e-10);
    EXPECT_NEAR(a.sigma_y2, b.sigma_y2, 1e-10);
    EXPECT_NEAR(a.sigma_ya, b.sigma_ya, 1e-10);
  }
}

TEST(TruePosterior, LinearMatchesKalmanClosedForm) {
  Rng rng(13);
  for (int i = 0; i < 20; ++i) {
    const Gaussian1D prior{rng.uniform(-2.0, 2.0), rng.uniform(0.1, 3.0)};
    const double y = rng.normal(0.0, 2.0);
    const double epsilon = rng.uniform(0.01, 1.0);
    const Gaussian1D post =
        true_posterior_a(Activation::linear(), prior, y, epsilon);
    const double gain = prior.variance / (prior.variance + epsilon);
    EXPECT_NEAR(post.mean, prior.mean + gain * (y - prior.mean), 1e-10);
    EXPECT_NEAR(post.variance, prior.variance - gain * prior.variance, 1e-10);
  }
}

TEST(TruePosterior, EvidencePushesMeanUp) {
  const Gaussian1D post =
      true_posterior_a(Activation::sigmoid(), {0.0, 1.0}, 1.0, 0.01);
  EXPECT_GT(post.mean, 0.0);
}

TEST(TruePosterior, FrozenFixtures) {
  std::ifstream in(std::string(BPERC_FIXTURE_DIR) +
                   "/true_posterior_sigmoid.csv");
  ASSERT_TRUE(in.is_open());
  std::string line;
  ASSERT_TRUE(std::getline(in, line));  // header
  int rows = 0;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    double mu, var, y, eps, tol, hw, want_mean, want_var;
    char c;
    ss >> mu >> c >> var >> c >> y >> c >> eps >> c >> tol >> c >> hw >> c >>
        want_mean >> c >> want_var;
    ASSERT_FALSE(ss.fail()) << line;
    QuadratureConfig cfg;
    cfg.abs_tol = tol;
    cfg.half_width_sigmas = hw;
    const Gaussian1D post =
        true_posterior_a(Activation::sigmoid(), {mu, var}, y, eps, cfg);
    EXPECT_NEAR(post.mean, want_mean, 1e-8) << line;
    EXPECT_NEAR(post.variance, want_var, 1e-8) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 3);
}

TEST(TruePosterior, Preconditions) {
  EXPECT_THROW(
      true_posterior_a(Activation::sigmoid(), {0.0, 1.0}, 1.0, 0.0),
      std::invalid_argument);
  EXPECT_THROW(
      true_posterior_a(Activation::sigmoid(), {0.0, 0.0}, 1.0, 0.01),
      std::invalid_argument);

  QuadratureConfig bad;
  bad.half_width_sigmas = 4.0;
  EXPECT_THROW(
      true_posterior_a(Activation::sigmoid(), {0.0, 1.0}, 1.0, 0.01, bad),
      std::invalid_argument);
  bad = QuadratureConfig{};
  bad.abs_tol = 0.0;
  EXPECT_THROW(quad_output_moments(Activation::relu(), {0.0, 1.0}, bad),
               std::invalid_argument);
}

TEST(ExactLinearPosterior, ScalarKalmanArithmetic) {
  const WeightPosterior out = exact_linear_posterior(
      isotropic_posterior(1, 0.0, 1.0), Eigen::VectorXd::Ones(1), 1.0, 1.0);
  EXPECT_DOUBLE_EQ(out.mean(0), 0.5);
  EXPECT_DOUBLE_EQ(out.cov(0, 0), 0.5);
}

TEST(ExactLinearPosterior, InfiniteNoiseKeepsPrior) {
  Rng rng(14);
  const WeightPosterior prior = random_posterior(rng, 4);
  const WeightPosterior out =
      exact_linear_posterior(prior, random_vector(rng, 4), 3.0, 1e15);
  EXPECT_LT((out.mean - prior.mean).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((out.cov - prior.cov).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(McOutputMoments, AgreesWithQuadrature) {
  const Gaussian1D a{1.0, 2.0};
  const McMoments mc =
      mc_output_moments(Activation::sigmoid(), a, 1000000, 2024);
  const OutputMoments quad = quad_output_moments(Activation::sigmoid(), a);
  EXPECT_NEAR(mc.mu_y, quad.mu_y, 4.0 * mc.se_mu_y);
  EXPECT_NEAR(mc.sigma_y2, quad.sigma_y2, 4.0 * mc.se_sigma_y2);
  EXPECT_NEAR(mc.sigma_ya, quad.sigma_ya, 4.0 * mc.se_sigma_ya);
}

TEST(McOutputMoments, QuadConsistencyAcrossRandomSweep) {
  Rng rng(15);
  for (int i = 0; i < 8; ++i) {
    const Gaussian1D a{rng.uniform(-3.0, 3.0), rng.uniform(0.2, 4.0)};
    const Activation act = (i % 2 == 0) ? Activation::sigmoid()
                                        : Activation::leaky_relu(0.1);
    const McMoments mc = mc_output_moments(act, a, 200000, 1000 + i);
    const OutputMoments quad = quad_output_moments(act, a);
    EXPECT_NEAR(mc.mu_y, quad.mu_y, 4.0 * mc.se_mu_y) << i;
    EXPECT_NEAR(mc.sigma_y2, quad.sigma_y2, 4.0 * mc.se_sigma_y2) << i;
    EXPECT_NEAR(mc.sigma_ya, quad.sigma_ya, 4.0 * mc.se_sigma_ya) << i;
  }
}

TEST(McOutputMoments, DeterministicAndEdgeCases) {
  const McMoments a =
      mc_output_moments(Activation::relu(), {0.5, 1.0}, 10000, 99);
  const McMoments b =
      mc_output_moments(Activation::relu(), {0.5, 1.0}, 10000, 99);
  EXPECT_EQ(a.mu_y, b.mu_y);
  EXPECT_EQ(a.sigma_y2, b.sigma_y2);
  EXPECT_EQ(a.sigma_ya, b.sigma_ya);

  const McMoments point =
      mc_output_moments(Activation::relu(), {2.0, 0.0}, 10000, 99);
  EXPECT_DOUBLE_EQ(point.mu_y, 2.0);
  EXPECT_DOUBLE_EQ(point.sigma_y2, 0.0);

  EXPECT_THROW(mc_output_moments(Activation::relu(), {0.0, 1.0}, 100, 1),
               std::invalid_argument);
}
