#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "gcoh/coherence.hpp"
#include "gcoh/core.hpp"
#include "gcoh/errors.hpp"
#include "gcoh/rng.hpp"

namespace gcoh {

/// Continuously monitored linear model: system Hamiltonian matrix H_s
/// (H = r^T H_s r / 2), bath coupling C (H_C = r^T C r_in), bath CM sigma_E,
/// and the general-dyne measurement CM sigma_m on the output modes.
struct MonitoredModel {
  Eigen::MatrixXd h_s;      // 2n x 2n symmetric
  Eigen::MatrixXd c;        // 2n x 2m
  Eigen::MatrixXd sigma_e;  // 2m x 2m
  Eigen::MatrixXd sigma_m;  // 2m x 2m (ignored when homodyne is set)
  bool homodyne = false;

  int n_system_modes() const { return static_cast<int>(h_s.rows()) / 2; }
  int n_bath_modes() const { return static_cast<int>(sigma_e.rows()) / 2; }
};

struct DriftDiffusion {
  Eigen::MatrixXd a;  // drift
  Eigen::MatrixXd d;  // diffusion
};

/// Unconditional drift/diffusion: A = Omega H_s + Omega C Omega C^T / 2,
/// D = Omega C sigma_E C^T Omega^T.
inline DriftDiffusion drift_diffusion(const MonitoredModel& model) {
  const int n = model.n_system_modes();
  const int m = model.n_bath_modes();
  if (model.c.rows() != 2 * n || model.c.cols() != 2 * m)
    throw dimension_error("drift_diffusion: coupling matrix dimensions inconsistent");
  const Eigen::MatrixXd omega_s = symplectic_form(n);
  const Eigen::MatrixXd omega_e = symplectic_form(m);
  DriftDiffusion out;
  out.a = omega_s * model.h_s + 0.5 * omega_s * model.c * omega_e * model.c.transpose();
  out.d = omega_s * model.c * model.sigma_e * model.c.transpose() * omega_s.transpose();
  return out;
}

struct ConditionalMatrices {
  Eigen::MatrixXd a_tilde;
  Eigen::MatrixXd d_tilde;
  Eigen::MatrixXd b;
};

/// Conditional (filtered) matrices for general-dyne monitoring of the bath:
///   A~ = A - Omega C sigma_E (sigma_E+sigma_m)^-1 Omega_E C^T
///   D~ = D + Omega C sigma_E (sigma_E+sigma_m)^-1 sigma_E C^T Omega
///   B  = C Omega_E (sigma_E+sigma_m)^-1/2
/// so that the conditional CM obeys the Riccati flow
///   sigma' = A~ sigma + sigma A~^T + D~ - sigma B B^T sigma.
inline ConditionalMatrices conditional_matrices(const MonitoredModel& model) {
  if (model.homodyne)
    throw unsupported_error(
        "conditional_matrices: homodyne limit not finite; evaluate at large s");
  const int n = model.n_system_modes();
  const int m = model.n_bath_modes();
  const Eigen::MatrixXd omega_s = symplectic_form(n);
  const Eigen::MatrixXd omega_e = symplectic_form(m);
  const Eigen::MatrixXd total = model.sigma_e + model.sigma_m;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(total);
  if (es.eigenvalues()(0) <= 1e-12)
    throw validity_error("conditional_matrices: singular sigma_E + sigma_m");
  const Eigen::MatrixXd inv = es.operatorInverseSqrt() * es.operatorInverseSqrt();
  const DriftDiffusion dd = drift_diffusion(model);
  ConditionalMatrices out;
  out.a_tilde = dd.a - omega_s * model.c * model.sigma_e * inv * omega_e * model.c.transpose();
  out.d_tilde = dd.d + omega_s * model.c * model.sigma_e * inv * model.sigma_e *
                           model.c.transpose() * omega_s;
  out.b = model.c * omega_e * es.operatorInverseSqrt();
  return out;
}

/// Steady state of the conditional Riccati flow, integrated from the vacuum CM
/// with an adaptive RK4 until the update stalls (max residual < tol). The flow
/// preserves physicality; every accepted step is checked.
inline Eigen::MatrixXd riccati_steady_state(const MonitoredModel& model,
                                            double tol = 1e-10,
                                            double max_time = 1e5) {
  const ConditionalMatrices cm = conditional_matrices(model);
  const Eigen::MatrixXd bbt = cm.b * cm.b.transpose();
  const int dim = static_cast<int>(cm.a_tilde.rows());
  auto flow = [&](const Eigen::MatrixXd& s) -> Eigen::MatrixXd {
    return cm.a_tilde * s + s * cm.a_tilde.transpose() + cm.d_tilde - s * bbt * s;
  };
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(dim, dim);
  const double scale = std::max({cm.a_tilde.cwiseAbs().maxCoeff(),
                                 bbt.cwiseAbs().maxCoeff(), 1.0});
  double dt = 0.05 / scale;
  double t = 0.0;
  while (t < max_time) {
    const Eigen::MatrixXd k1 = flow(sigma);
    if (k1.cwiseAbs().maxCoeff() < tol) {
      if (!is_physical(sigma, 1e-6))
        throw convergence_error("riccati_steady_state: stalled at an unphysical point");
      return sigma;
    }
    const Eigen::MatrixXd k2 = flow(sigma + 0.5 * dt * k1);
    const Eigen::MatrixXd k3 = flow(sigma + 0.5 * dt * k2);
    const Eigen::MatrixXd k4 = flow(sigma + dt * k3);
    Eigen::MatrixXd next = sigma + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    next = 0.5 * (next + next.transpose()).eval();
    if (!next.allFinite() || !is_physical(next, 1e-6)) {
      dt *= 0.5;
      if (dt < 1e-12) throw convergence_error("riccati_steady_state: step size underflow");
      continue;
    }
    sigma = next;
    t += dt;
    dt = std::min(dt * 1.05, 0.2 / scale);
  }
  throw convergence_error("riccati_steady_state: no convergence within max_time (unstable?)");
}

/// Optical parametric oscillator: H = -(chi/2)(xp+px), loss rate gamma into a
/// bath with N thermal photons, monitored through squeezing r_m.
/// Stability requires chi_tilde = chi/gamma < 1/2.
struct OPOParams {
  double chi_tilde = 0.0;
  double gamma = 1.0;
  double n_thermal = 0.0;
  double r_m = 0.0;

  double mu() const { return 1.0 / (2.0 * n_thermal + 1.0); }
};

inline MonitoredModel opo_model(const OPOParams& p) {
  MonitoredModel m;
  const double chi = p.chi_tilde * p.gamma;
  m.h_s.resize(2, 2);
  m.h_s << 0.0, -chi, -chi, 0.0;
  m.c = std::sqrt(p.gamma) * Eigen::Matrix2d::Identity();
  m.sigma_e = (1.0 / p.mu()) * Eigen::Matrix2d::Identity();
  const double s = std::exp(2.0 * p.r_m);
  m.sigma_m = Eigen::Vector2d(s, 1.0 / s).asDiagonal();
  return m;
}

/// Closed-form OPO steady states. monitored=false gives the unconditional
/// Lyapunov solution (1/mu) diag(1/(1+2chi~), 1/(1-2chi~)); monitored=true the
/// diagonal Riccati fixed point; homodyne=true the exact r_m -> inf limit
/// (1/mu) diag(1-2chi~, 1/(1-2chi~)), a squeezed thermal state with N photons.
inline Eigen::Matrix2d opo_steady_state_closed_form(const OPOParams& p, bool monitored,
                                                    bool homodyne = false) {
  if (p.chi_tilde >= 0.5 || p.chi_tilde < 0.0)
    throw validity_error("opo_steady_state_closed_form: requires 0 <= chi_tilde < 1/2");
  const double mu = p.mu();
  if (!monitored)
    return (1.0 / mu) *
           Eigen::Vector2d(1.0 / (1.0 + 2.0 * p.chi_tilde), 1.0 / (1.0 - 2.0 * p.chi_tilde))
               .asDiagonal();
  if (homodyne)
    return (1.0 / mu) *
           Eigen::Vector2d(1.0 - 2.0 * p.chi_tilde, 1.0 / (1.0 - 2.0 * p.chi_tilde))
               .asDiagonal();
  const ConditionalMatrices cm = conditional_matrices(opo_model(p));
  const Eigen::Matrix2d bbt = cm.b * cm.b.transpose();
  Eigen::Matrix2d out = Eigen::Matrix2d::Zero();
  for (int i = 0; i < 2; ++i) {
    const double at = cm.a_tilde(i, i);
    out(i, i) = (at + std::sqrt(at * at + bbt(i, i) * cm.d_tilde(i, i))) / bbt(i, i);
  }
  return out;
}

/// Euler-Maruyama sample path of the conditional first moments in the
/// steady-state regime:
///   dr = A r dt + (Omega C sigma_E - sigma' C Omega)(sigma_E+sigma_m)^-1/2 dw/sqrt(2).
/// Returns n_steps+1 states including the zero initial condition.
inline std::vector<Eigen::VectorXd> simulate_trajectory(const MonitoredModel& model,
                                                        const Eigen::MatrixXd& sigma_steady,
                                                        double dt, int n_steps,
                                                        std::uint64_t rng_seed) {
  if (!(dt > 0.0)) throw validity_error("simulate_trajectory: dt must be > 0");
  const DriftDiffusion dd = drift_diffusion(model);
  const Eigen::MatrixXd omega_s = symplectic_form(model.n_system_modes());
  const Eigen::MatrixXd omega_e = symplectic_form(model.n_bath_modes());
  Eigen::EigenSolver<Eigen::MatrixXd> es(dd.a, false);
  const double spectral = es.eigenvalues().cwiseAbs().maxCoeff();
  if (spectral * dt > 0.1)
    throw validity_error("simulate_trajectory: dt too large (|eig(A)| dt > 0.1)");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> et(model.sigma_e + model.sigma_m);
  const Eigen::MatrixXd gain =
      (omega_s * model.c * model.sigma_e - sigma_steady * model.c * omega_e) *
      et.operatorInverseSqrt() / std::sqrt(2.0);
  Rng rng(rng_seed);
  const int dim = 2 * model.n_system_modes();
  const int noise_dim = 2 * model.n_bath_modes();
  std::vector<Eigen::VectorXd> path;
  path.reserve(n_steps + 1);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(dim);
  path.push_back(r);
  const double sqrt_dt = std::sqrt(dt);
  for (int step = 0; step < n_steps; ++step) {
    Eigen::VectorXd dw(noise_dim);
    for (int i = 0; i < noise_dim; ++i) dw(i) = sqrt_dt * rng.normal();
    r = r + dt * (dd.a * r) + gain * dw;
    path.push_back(r);
  }
  return path;
}

struct ThresholdResult {
  double r_m = 0.0;
  bool bracketed = true;  // false: no sign change on [0, 15], boundary returned
};

/// Measurement squeezing at which the monitored steady-state coherence equals
/// the unconditional one, found by bisection on r_m in [0, 15].
inline ThresholdResult threshold_squeezing(const OPOParams& params,
                                           CoherenceMeasure measure,
                                           double tol = 1e-6) {
  if (params.chi_tilde <= 0.0 || params.chi_tilde >= 0.5)
    throw validity_error("threshold_squeezing: requires 0 < chi_tilde < 1/2");
  const auto coherence_of = [&](const Eigen::Matrix2d& cov) {
    const GaussianState state(Eigen::Vector2d::Zero(), cov);
    return measure == CoherenceMeasure::gaussian ? gaussian_coherence(state)
                                                 : entropic_coherence(state).value;
  };
  const double target = coherence_of(opo_steady_state_closed_form(params, false));
  const auto gap = [&](double r_m) {
    OPOParams p = params;
    p.r_m = r_m;
    return coherence_of(opo_steady_state_closed_form(p, true)) - target;
  };
  double lo = 0.0, hi = 15.0;
  double glo = gap(lo), ghi = gap(hi);
  if (glo * ghi > 0.0) return {glo > 0.0 ? lo : hi, false};
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double gmid = gap(mid);
    if ((gmid < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gmid;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), true};
}

}  // namespace gcoh
