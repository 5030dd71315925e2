#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "gcoh/core.hpp"
#include "gcoh/errors.hpp"

namespace gcoh {

/// Photon-number distribution p_0..p_K of a single-mode state plus an
/// estimate of the probability mass beyond the cutoff.
struct PhotonNumberDistribution {
  std::vector<double> probs;
  int cutoff = 0;
  double tail_bound = 0.0;
};

/// Joint distribution p_{nm} = <n,m|rho|n,m> of a two-mode state.
struct JointPhotonNumberDistribution {
  Eigen::MatrixXd probs;  // (K_A+1) x (K_B+1)
  double tail_bound = 0.0;
};

namespace detail {

using Complex = std::complex<double>;

/// Data defining a pure displaced Gaussian state through its nullifier
/// (a_j - sum_k B_jk a^dag_k - beta_j)|psi> = 0 and vacuum overlap c0.
struct PureStateKernel {
  Eigen::MatrixXcd b;      // symmetric n x n
  Eigen::VectorXcd beta;   // displacement part
  double c0 = 1.0;         // <0|psi>, taken real positive (global phase gauge)
};

/// Centered complex second moments M_jk = <da_j da_k>, N_jk = <da^dag_k da_j>
/// from the quadrature covariance matrix (vacuum = identity convention).
inline void complex_moments(const Eigen::MatrixXd& sigma, Eigen::MatrixXcd& m_out,
                            Eigen::MatrixXcd& n_out) {
  const int n = static_cast<int>(sigma.rows()) / 2;
  const Eigen::MatrixXd cov = 0.5 * sigma;  // symmetric-ordered covariance
  m_out.resize(n, n);
  n_out.resize(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      const double cxx = cov(2 * j, 2 * k);
      const double cxp = cov(2 * j, 2 * k + 1);
      const double cpx = cov(2 * j + 1, 2 * k);
      const double cpp = cov(2 * j + 1, 2 * k + 1);
      m_out(j, k) = 0.5 * Complex(cxx - cpp, cxp + cpx);
      const double delta = (j == k) ? 1.0 : 0.0;
      // N_jk = <a^dag_k a_j>: note the transposed role of (j,k) in cov lookups.
      const double dxx = cov(2 * k, 2 * j);
      const double dpp = cov(2 * k + 1, 2 * j + 1);
      const double dxp = cov(2 * k, 2 * j + 1);
      const double dpx = cov(2 * k + 1, 2 * j);
      n_out(j, k) = 0.5 * Complex(dxx + dpp - delta, dxp - dpx);
    }
  }
}

inline PureStateKernel pure_state_kernel(const Eigen::MatrixXd& sigma,
                                         const Eigen::VectorXd& mean) {
  const int n = static_cast<int>(sigma.rows()) / 2;
  Eigen::MatrixXcd m, nn;
  complex_moments(sigma, m, nn);
  PureStateKernel k;
  Eigen::MatrixXcd lhs = Eigen::MatrixXcd::Identity(n, n) + nn.transpose();
  k.b = lhs.transpose().fullPivLu().solve(m.transpose()).transpose();  // B = M (I+N^T)^-1
  k.b = 0.5 * (k.b + k.b.transpose()).eval();
  k.beta.resize(n);
  Eigen::VectorXcd alpha(n);
  for (int j = 0; j < n; ++j)
    alpha(j) = Complex(mean(2 * j), mean(2 * j + 1)) / std::sqrt(2.0);
  k.beta = alpha - k.b * alpha.conjugate();
  // |<0|psi>|^2 = 2^n exp(-r^T (sigma+1)^-1 r) / sqrt(det(sigma+1))
  Eigen::MatrixXd sp1 = sigma + Eigen::MatrixXd::Identity(2 * n, 2 * n);
  const double quad = mean.dot(sp1.llt().solve(mean));
  const double p0 = std::pow(2.0, n) * std::exp(-quad) / std::sqrt(sp1.determinant());
  k.c0 = std::sqrt(std::max(p0, 0.0));
  return k;
}

/// Fock amplitudes of a single-mode pure state up to cutoff, from the
/// recursion c_{n+1} = (beta c_n + B sqrt(n) c_{n-1}) / sqrt(n+1).
inline Eigen::VectorXcd amplitudes_1mode(const PureStateKernel& k, int cutoff) {
  Eigen::VectorXcd c(cutoff + 1);
  c(0) = k.c0;
  for (int n = 0; n < cutoff; ++n) {
    Complex v = k.beta(0) * c(n);
    if (n >= 1) v += k.b(0, 0) * std::sqrt(static_cast<double>(n)) * c(n - 1);
    c(n + 1) = v / std::sqrt(static_cast<double>(n + 1));
  }
  return c;
}

/// Two-mode pure-state amplitudes c_{n,m} on the box [0..Ka] x [0..Kb].
inline Eigen::MatrixXcd amplitudes_2mode(const PureStateKernel& k, int cut_a, int cut_b) {
  Eigen::MatrixXcd c(cut_a + 1, cut_b + 1);
  c(0, 0) = k.c0;
  // First row: raise mode 1 only.
  for (int m = 0; m < cut_b; ++m) {
    Complex v = k.beta(1) * c(0, m);
    if (m >= 1) v += k.b(1, 1) * std::sqrt(static_cast<double>(m)) * c(0, m - 1);
    c(0, m + 1) = v / std::sqrt(static_cast<double>(m + 1));
  }
  // Remaining rows: raise mode 0 from the row below.
  for (int n = 0; n < cut_a; ++n) {
    for (int m = 0; m <= cut_b; ++m) {
      Complex v = k.beta(0) * c(n, m);
      if (n >= 1) v += k.b(0, 0) * std::sqrt(static_cast<double>(n)) * c(n - 1, m);
      if (m >= 1) v += k.b(0, 1) * std::sqrt(static_cast<double>(m)) * c(n, m - 1);
      c(n + 1, m) = v / std::sqrt(static_cast<double>(n + 1));
    }
  }
  return c;
}

/// Purify a single-mode state: two-mode pure state whose first marginal is the
/// input. Built from a two-mode-squeezed pair at the Williamson occupancy,
/// locally reshaped by S = (sigma/nu)^{1/2} (symmetric, det 1, hence symplectic).
inline void purify_single_mode(const GaussianState& state, Eigen::MatrixXd& sigma_out,
                               Eigen::VectorXd& mean_out) {
  const Eigen::Matrix2d sigma = state.cov();
  double nu = std::sqrt(std::max(sigma.determinant(), 1.0));
  if (nu < 1.0) nu = 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(sigma / nu);
  const Eigen::Matrix2d s_local =
      es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
      es.eigenvectors().transpose();
  const double kappa = std::sqrt(std::max(nu * nu - 1.0, 0.0));
  const Eigen::Matrix2d p_flip = Eigen::Vector2d(1.0, -1.0).asDiagonal();
  sigma_out.resize(4, 4);
  sigma_out.block<2, 2>(0, 0) = sigma;
  sigma_out.block<2, 2>(0, 2) = kappa * s_local * p_flip;
  sigma_out.block<2, 2>(2, 0) = sigma_out.block<2, 2>(0, 2).transpose();
  sigma_out.block<2, 2>(2, 2) = nu * Eigen::Matrix2d::Identity();
  mean_out.resize(4);
  mean_out.head<2>() = state.mean();
  mean_out.tail<2>().setZero();
}

inline void clamp_probability(double& p) {
  if (p < 0.0) {
    if (p < -1e-12)
      throw convergence_error("negative probability beyond rounding: truncation bug");
    p = 0.0;
  }
}

}  // namespace detail

/// Photon-number distribution of a single-mode Gaussian state (mixed and/or
/// displaced states supported). The cutoff grows adaptively, starting at
/// ceil(10 (1 + nbar)) and doubling until the unaccounted mass is at most
/// target_tail.
inline PhotonNumberDistribution photon_number_distribution(const GaussianState& state,
                                                           double target_tail = 1e-10) {
  if (state.n_modes() != 1)
    throw dimension_error("photon_number_distribution: expected a single-mode state");
  if (!(target_tail > 0.0))
    throw unsupported_error("photon_number_distribution: target_tail must be > 0");

  Eigen::MatrixXd sigma_p;
  Eigen::VectorXd mean_p;
  detail::purify_single_mode(state, sigma_p, mean_p);
  const detail::PureStateKernel kernel = detail::pure_state_kernel(sigma_p, mean_p);

  const double nbar = mean_photon_number(state);
  const double nu = std::sqrt(std::max(state.cov().determinant(), 1.0));
  const double nbar_anc = 0.5 * (nu - 1.0);

  int cut = static_cast<int>(std::ceil(10.0 * (1.0 + nbar)));
  int cut_anc = static_cast<int>(std::ceil(10.0 * (1.0 + nbar_anc)));
  PhotonNumberDistribution dist;
  for (int attempt = 0; attempt < 10; ++attempt) {
    const Eigen::MatrixXcd amps = detail::amplitudes_2mode(kernel, cut, cut_anc);
    dist.probs.assign(cut + 1, 0.0);
    double mass = 0.0;
    for (int n = 0; n <= cut; ++n) {
      double p = amps.row(n).squaredNorm();
      detail::clamp_probability(p);
      dist.probs[n] = p;
      mass += p;
    }
    dist.cutoff = cut;
    dist.tail_bound = std::max(1.0 - mass, 0.0);
    if (dist.tail_bound <= target_tail) return dist;
    cut *= 2;
    cut_anc *= 2;
  }
  throw convergence_error("photon_number_distribution: tail target not reached");
}

/// Joint photon-number distribution of a pure, zero-mean two-mode state via
/// the two-variable amplitude recursion. Mixed or displaced inputs are routed
/// to the truncated-operator oracle instead.
inline JointPhotonNumberDistribution joint_photon_number_distribution(
    const GaussianState& state, int cutoff_a, int cutoff_b) {
  if (state.n_modes() != 2)
    throw dimension_error("joint_photon_number_distribution: expected two modes");
  if (std::abs(state.cov().determinant() - 1.0) > 1e-6)
    throw unsupported_error(
        "joint_photon_number_distribution: mixed state; use fock_oracle_density_matrix");
  if (state.mean().cwiseAbs().maxCoeff() > 1e-9)
    throw unsupported_error(
        "joint_photon_number_distribution: displaced state; use fock_oracle_density_matrix");
  if (cutoff_a < 1 || cutoff_b < 1)
    throw dimension_error("joint_photon_number_distribution: cutoffs must be >= 1");

  const detail::PureStateKernel kernel =
      detail::pure_state_kernel(state.cov(), state.mean());
  const Eigen::MatrixXcd amps = detail::amplitudes_2mode(kernel, cutoff_a, cutoff_b);
  JointPhotonNumberDistribution joint;
  joint.probs = amps.cwiseAbs2();
  for (int n = 0; n <= cutoff_a; ++n)
    for (int m = 0; m <= cutoff_b; ++m) detail::clamp_probability(joint.probs(n, m));
  joint.tail_bound = std::max(1.0 - joint.probs.sum(), 0.0);
  if (joint.tail_bound > 1e-5)
    throw convergence_error(
        "joint_photon_number_distribution: cutoffs too small (mass deficit > 1e-5)");
  return joint;
}

/// Shannon entropy of a distribution plus the tail-uncertainty bound
/// -t ln t + t (K + ln K) used to propagate truncation into entropy results.
struct ShannonEntropyResult {
  double value = 0.0;
  double uncertainty = 0.0;
};

namespace detail {
inline double tail_entropy_bound(double tail, int cutoff) {
  if (tail <= 0.0) return 0.0;
  const double k = std::max(cutoff, 2);
  return -tail * std::log(tail) + tail * (k + std::log(k));
}
}  // namespace detail

inline ShannonEntropyResult shannon_entropy(const PhotonNumberDistribution& dist) {
  ShannonEntropyResult r;
  for (double p : dist.probs)
    if (p > 0.0) r.value -= p * std::log(p);
  r.uncertainty = detail::tail_entropy_bound(dist.tail_bound, dist.cutoff);
  return r;
}

inline ShannonEntropyResult shannon_entropy(const JointPhotonNumberDistribution& dist) {
  ShannonEntropyResult r;
  for (Eigen::Index n = 0; n < dist.probs.rows(); ++n)
    for (Eigen::Index m = 0; m < dist.probs.cols(); ++m) {
      const double p = dist.probs(n, m);
      if (p > 0.0) r.value -= p * std::log(p);
    }
  const int k = static_cast<int>(dist.probs.rows() + dist.probs.cols() - 2);
  r.uncertainty = detail::tail_entropy_bound(dist.tail_bound, k);
  return r;
}

}  // namespace gcoh
