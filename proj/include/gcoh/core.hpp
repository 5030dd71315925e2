#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "gcoh/errors.hpp"

namespace gcoh {

/// Default tolerance for physicality checks (min symplectic eigenvalue >= 1 - tol).
inline constexpr double kPhysicalityTol = 1e-9;
inline constexpr double kSymmetryTol = 1e-10;

/// Symplectic form for n modes in x1,p1,...,xn,pn ordering.
inline Eigen::MatrixXd symplectic_form(int n_modes) {
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int m = 0; m < n_modes; ++m) {
    omega(2 * m, 2 * m + 1) = 1.0;
    omega(2 * m + 1, 2 * m) = -1.0;
  }
  return omega;
}

/// Thermal-entropy function h(x) = ((x+1)/2)ln((x+1)/2) - ((x-1)/2)ln((x-1)/2).
/// Continuous limit h(1) = 0; guarded slightly above 1 to avoid log(0).
inline double entropy_h(double x) {
  if (x < 1.0 + 1e-12) return 0.0;
  const double xp = 0.5 * (x + 1.0);
  const double xm = 0.5 * (x - 1.0);
  return xp * std::log(xp) - xm * std::log(xm);
}

namespace detail {

inline void check_cov_shape(const Eigen::MatrixXd& cov, double tol) {
  if (cov.rows() != cov.cols())
    throw dimension_error("covariance matrix must be square");
  if (cov.rows() == 0 || cov.rows() % 2 != 0)
    throw dimension_error("covariance matrix must have even, positive dimension");
  const double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol) {
    std::ostringstream os;
    os << "covariance matrix not symmetric (max asymmetry " << asym << ")";
    throw dimension_error(os.str());
  }
}

/// Moduli of the eigenvalues of i*Omega*cov, collapsed to n values (they come
/// in equal pairs) by sorting and averaging adjacent entries.
inline std::vector<double> raw_symplectic_moduli(const Eigen::MatrixXd& cov) {
  const int n = static_cast<int>(cov.rows()) / 2;
  Eigen::MatrixXd m = symplectic_form(n) * cov;
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
  std::vector<double> mods(2 * n);
  for (int i = 0; i < 2 * n; ++i) mods[i] = std::abs(es.eigenvalues()(i));
  std::sort(mods.begin(), mods.end());
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = 0.5 * (mods[2 * i] + mods[2 * i + 1]);
  return out;
}

}  // namespace detail

/// True iff cov is a valid covariance matrix: symmetric (within tol) and
/// min symplectic eigenvalue >= 1 - tol.
inline bool is_physical(const Eigen::MatrixXd& cov, double tol = kPhysicalityTol) {
  detail::check_cov_shape(cov, std::max(tol, kSymmetryTol));
  Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
  // sigma + i*Omega >= 0 requires sigma >= 0 first; reject early so the
  // eigenvalue moduli below cannot mask a negative-definite direction.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.eigenvalues()(0) < -tol) return false;
  const std::vector<double> nu = detail::raw_symplectic_moduli(sym);
  return nu.front() >= 1.0 - tol;
}

/// n-mode Gaussian state: first moments and covariance matrix, vacuum cov = identity.
/// Quadrature ordering is x1,p1,...,xn,pn. Immutable value type.
class GaussianState {
 public:
  GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd cov, double tol = kPhysicalityTol)
      : mean_(std::move(mean)), cov_(std::move(cov)) {
    detail::check_cov_shape(cov_, std::max(tol, kSymmetryTol));
    if (mean_.size() != cov_.rows())
      throw dimension_error("mean vector length does not match covariance dimension");
    cov_ = 0.5 * (cov_ + cov_.transpose()).eval();
    if (!is_physical(cov_, tol))
      throw validity_error("covariance matrix violates sigma + i*Omega >= 0");
  }

  static GaussianState vacuum(int n_modes) {
    return GaussianState(Eigen::VectorXd::Zero(2 * n_modes),
                         Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
  }

  /// Thermal state with N mean photons per mode: cov = (2N+1) * identity.
  static GaussianState thermal(double n_photons, int n_modes = 1) {
    if (n_photons < 0) throw validity_error("thermal occupancy must be >= 0");
    return GaussianState(Eigen::VectorXd::Zero(2 * n_modes),
                         (2.0 * n_photons + 1.0) *
                             Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
  }

  int n_modes() const { return static_cast<int>(cov_.rows()) / 2; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& cov() const { return cov_; }

  /// 2x2 covariance block between modes i and j.
  Eigen::Matrix2d cov_block(int i, int j) const { return cov_.block<2, 2>(2 * i, 2 * j); }
  Eigen::Vector2d mean_of_mode(int i) const { return mean_.segment<2>(2 * i); }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
};

/// Williamson spectrum of a state: n values, sorted ascending, all >= 1.
struct SymplecticSpectrum {
  std::vector<double> values;
};

/// Symplectic eigenvalues of a physical covariance matrix. Values within
/// 1e-9 below 1 are clamped to 1; anything lower is a validity error.
inline SymplecticSpectrum symplectic_eigenvalues(const Eigen::MatrixXd& cov,
                                                 double tol = kPhysicalityTol) {
  detail::check_cov_shape(cov, std::max(tol, kSymmetryTol));
  std::vector<double> nu = detail::raw_symplectic_moduli(0.5 * (cov + cov.transpose()));
  for (double& v : nu) {
    if (v < 1.0 - tol) {
      std::ostringstream os;
      os << "unphysical covariance matrix: symplectic eigenvalue " << v << " < 1";
      throw validity_error(os.str());
    }
    if (v < 1.0) v = 1.0;
  }
  return SymplecticSpectrum{std::move(nu)};
}

inline SymplecticSpectrum symplectic_eigenvalues(const GaussianState& state) {
  return symplectic_eigenvalues(state.cov());
}

/// Von Neumann entropy in nats: sum of h over the symplectic spectrum.
inline double von_neumann_entropy(const GaussianState& state) {
  double s = 0.0;
  for (double nu : symplectic_eigenvalues(state).values) s += entropy_h(nu);
  return s;
}

inline double von_neumann_entropy(const Eigen::MatrixXd& cov) {
  double s = 0.0;
  for (double nu : symplectic_eigenvalues(cov).values) s += entropy_h(nu);
  return s;
}

/// Marginal state on the listed modes (kept in the order given).
inline GaussianState partial_trace(const GaussianState& state,
                                   const std::vector<int>& keep_modes) {
  if (keep_modes.empty()) throw dimension_error("partial_trace: empty mode set");
  for (std::size_t i = 0; i < keep_modes.size(); ++i) {
    if (keep_modes[i] < 0 || keep_modes[i] >= state.n_modes())
      throw dimension_error("partial_trace: mode index out of range");
    for (std::size_t j = i + 1; j < keep_modes.size(); ++j)
      if (keep_modes[i] == keep_modes[j])
        throw dimension_error("partial_trace: duplicate mode index");
  }
  const int k = static_cast<int>(keep_modes.size());
  Eigen::VectorXd mean(2 * k);
  Eigen::MatrixXd cov(2 * k, 2 * k);
  for (int a = 0; a < k; ++a) {
    mean.segment<2>(2 * a) = state.mean_of_mode(keep_modes[a]);
    for (int b = 0; b < k; ++b)
      cov.block<2, 2>(2 * a, 2 * b) = state.cov_block(keep_modes[a], keep_modes[b]);
  }
  return GaussianState(std::move(mean), std::move(cov));
}

/// Mean photon number of mode i: (Tr[sigma_i] + 2|r_i|^2 - 2)/4.
inline double mean_photon_number_of_mode(const GaussianState& state, int mode) {
  if (mode < 0 || mode >= state.n_modes())
    throw dimension_error("mean_photon_number: mode index out of range");
  const Eigen::Matrix2d block = state.cov_block(mode, mode);
  const Eigen::Vector2d r = state.mean_of_mode(mode);
  return 0.25 * (block.trace() + 2.0 * r.squaredNorm() - 2.0);
}

/// Mean photon number of a single-mode state: Tr[sigma]/4 + |r|^2/2 - 1/2.
inline double mean_photon_number(const GaussianState& state) {
  if (state.n_modes() != 1)
    throw dimension_error("mean_photon_number: expected a single-mode state");
  return mean_photon_number_of_mode(state, 0);
}

inline Eigen::VectorXd mean_photon_numbers(const GaussianState& state) {
  Eigen::VectorXd n(state.n_modes());
  for (int m = 0; m < state.n_modes(); ++m) n(m) = mean_photon_number_of_mode(state, m);
  return n;
}

/// PPT test for two-mode states: partially transpose mode B
/// (Lambda = diag(1,1,1,-1)) and check physicality of the result.
inline bool is_separable_ppt(const GaussianState& state, double tol = kPhysicalityTol) {
  if (state.n_modes() != 2)
    throw dimension_error("is_separable_ppt: expected a two-mode state");
  Eigen::Vector4d lambda(1.0, 1.0, 1.0, -1.0);
  Eigen::MatrixXd tilde = lambda.asDiagonal() * state.cov() * lambda.asDiagonal();
  return is_physical(tilde, tol);
}

/// Global purity mu = 1/sqrt(det sigma).
inline double purity(const GaussianState& state) {
  return 1.0 / std::sqrt(state.cov().determinant());
}

}  // namespace gcoh
