#pragma once

// Shared helpers for randomized tests: seeded generators for vectors and
// PSD covariance matrices.

#include <Eigen/Dense>

#include "bperc/gaussian.hpp"
#include "bperc/rng.hpp"

namespace bperc::testing {

inline Eigen::VectorXd random_vector(Rng& rng, Eigen::Index dim,
                                     double scale = 1.0) {
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = scale * rng.normal();
  return v;
}

// A A' is symmetric positive semi-definite by construction.
inline Eigen::MatrixXd random_psd(Rng& rng, Eigen::Index dim,
                                  double scale = 1.0) {
  Eigen::MatrixXd a(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) a(r, c) = scale * rng.normal();
  }
  Eigen::MatrixXd psd = a * a.transpose();
  return 0.5 * (psd + psd.transpose());
}

inline WeightPosterior random_posterior(Rng& rng, Eigen::Index dim,
                                        double mean_scale = 1.0,
                                        double cov_scale = 1.0) {
  return WeightPosterior{random_vector(rng, dim, mean_scale),
                         random_psd(rng, dim, cov_scale)};
}

inline double min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m,
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace bperc::testing
