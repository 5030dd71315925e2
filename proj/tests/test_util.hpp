#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "gcoh/core.hpp"
#include "gcoh/measurement.hpp"
#include "gcoh/rng.hpp"

namespace testutil {

/// Matrix exponential by scaling and squaring with a Taylor core; fine for
/// the small (<= 6x6) generators used in tests.
inline Eigen::MatrixXd expm_small(const Eigen::MatrixXd& m) {
  const int dim = static_cast<int>(m.rows());
  int scale = 0;
  double norm = m.cwiseAbs().maxCoeff();
  while (norm > 0.5) {
    norm *= 0.5;
    ++scale;
  }
  const Eigen::MatrixXd a = m / std::pow(2.0, scale);
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(dim, dim);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(dim, dim);
  for (int k = 1; k <= 18; ++k) {
    term = (term * a / static_cast<double>(k)).eval();
    result += term;
  }
  for (int s = 0; s < scale; ++s) result = (result * result).eval();
  return result;
}

/// Random physical state: sigma = S diag(nu) S^T with S = exp(Omega H),
/// H random symmetric; optional Gaussian-displaced mean.
inline gcoh::GaussianState random_state(gcoh::Rng& rng, int n_modes,
                                        double strength = 0.4, double max_nu = 3.0,
                                        bool displaced = false) {
  const int dim = 2 * n_modes;
  Eigen::MatrixXd h(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) h(i, j) = h(j, i) = strength * rng.normal();
  const Eigen::MatrixXd s = expm_small(gcoh::symplectic_form(n_modes) * h);
  Eigen::VectorXd d(dim);
  for (int m = 0; m < n_modes; ++m)
    d(2 * m) = d(2 * m + 1) = rng.uniform(1.0, max_nu);
  Eigen::MatrixXd cov = s * d.asDiagonal() * s.transpose();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  if (displaced)
    for (int i = 0; i < dim; ++i) mean(i) = rng.normal();
  return gcoh::GaussianState(mean, cov);
}

/// Random single-mode state with mean photon number at most max_nbar.
inline gcoh::GaussianState random_single_mode(gcoh::Rng& rng, double max_nbar,
                                              bool displaced) {
  for (;;) {
    const double nu = rng.uniform(1.0, 1.0 + 0.6 * max_nbar);
    const double r = rng.uniform(0.0, 0.8);
    const double theta = rng.uniform(0.0, M_PI);
    const Eigen::Matrix2d rot = gcoh::rotation2(theta);
    const Eigen::Matrix2d cov = nu * rot *
                                Eigen::Vector2d(std::exp(2.0 * r), std::exp(-2.0 * r))
                                    .asDiagonal() *
                                rot.transpose();
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    if (displaced) mean = Eigen::Vector2d(rng.normal(), rng.normal());
    const gcoh::GaussianState state(mean, cov);
    if (gcoh::mean_photon_number(state) <= max_nbar) return state;
  }
}

}  // namespace testutil
