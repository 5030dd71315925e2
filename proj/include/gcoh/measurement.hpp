#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "gcoh/core.hpp"
#include "gcoh/errors.hpp"
#include "gcoh/rng.hpp"

namespace gcoh {

/// Pure single-mode general-dyne measurement: CM R(phi) diag(s, 1/s) R(phi)^T.
/// s = exp(2 r_m) >= 1; s = 1 is heterodyne. The homodyne flag selects the
/// exact s -> infinity limit of the phi-rotated measurement (sharp quadrature
/// along R(phi) e_p).
struct GeneralDyneMeasurement {
  double s = 1.0;
  double phi = 0.0;
  bool homodyne = false;

  static GeneralDyneMeasurement heterodyne() { return {1.0, 0.0, false}; }
  static GeneralDyneMeasurement from_squeezing(double r_m, double phi = 0.0) {
    return {std::exp(2.0 * r_m), phi, false};
  }
  static GeneralDyneMeasurement homodyne_limit(double phi = 0.0) {
    return {std::numeric_limits<double>::infinity(), phi, true};
  }
  double r_m() const { return 0.5 * std::log(s); }
};

/// Measurement outcome for one mode, with polar conversion helpers.
struct MeasurementOutcome {
  Eigen::Vector2d r;

  static MeasurementOutcome from_polar(double magnitude, double theta) {
    return {Eigen::Vector2d(magnitude * std::cos(theta), magnitude * std::sin(theta))};
  }
  double magnitude() const { return r.norm(); }
  double angle() const { return std::atan2(r(1), r(0)); }
};

inline Eigen::Matrix2d rotation2(double phi) {
  Eigen::Matrix2d rot;
  rot << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  return rot;
}

/// Measurement covariance matrix R(phi) diag(s, 1/s) R(phi)^T (finite s only).
inline Eigen::Matrix2d measurement_cm(const GeneralDyneMeasurement& m) {
  if (m.homodyne)
    throw unsupported_error(
        "measurement_cm: homodyne limit has no finite CM; use condition_on_outcome");
  if (!(m.s > 0.0) || !std::isfinite(m.s))
    throw validity_error("measurement_cm: squeezing parameter s must be finite and > 0");
  const Eigen::Matrix2d rot = rotation2(m.phi);
  return rot * Eigen::Vector2d(m.s, 1.0 / m.s).asDiagonal() * rot.transpose();
}

namespace detail {

struct Partition {
  std::vector<int> kept;
  Eigen::MatrixXd sigma_a;   // kept block
  Eigen::Matrix2d sigma_b;   // measured block
  Eigen::MatrixXd sigma_ab;  // kept x measured
  Eigen::VectorXd mean_a;
  Eigen::Vector2d mean_b;
};

inline Partition split_at(const GaussianState& state, int measured) {
  if (state.n_modes() < 2)
    throw dimension_error("conditioning requires at least two modes");
  if (measured < 0 || measured >= state.n_modes())
    throw dimension_error("measured mode index out of range");
  Partition p;
  for (int m = 0; m < state.n_modes(); ++m)
    if (m != measured) p.kept.push_back(m);
  const int k = static_cast<int>(p.kept.size());
  p.sigma_a.resize(2 * k, 2 * k);
  p.sigma_ab.resize(2 * k, 2);
  p.mean_a.resize(2 * k);
  for (int a = 0; a < k; ++a) {
    p.mean_a.segment<2>(2 * a) = state.mean_of_mode(p.kept[a]);
    p.sigma_ab.block<2, 2>(2 * a, 0) = state.cov_block(p.kept[a], measured);
    for (int b = 0; b < k; ++b)
      p.sigma_a.block<2, 2>(2 * a, 2 * b) = state.cov_block(p.kept[a], p.kept[b]);
  }
  p.sigma_b = state.cov_block(measured, measured);
  p.mean_b = state.mean_of_mode(measured);
  return p;
}

}  // namespace detail

/// Conditional state of the unmeasured modes after a general-dyne measurement
/// on one mode:
///   sigma'_A = sigma_A - sigma_AB (sigma_B + sigma_m)^-1 sigma_AB^T
///   r'_A     = r_A + sigma_AB (sigma_B + sigma_m)^-1 (r_out - r_B)
/// In the homodyne limit the inverse is replaced by the Moore-Penrose
/// pseudoinverse of Pi sigma_B Pi, with Pi the projector onto the measured
/// rotated quadrature; the outcome then enters only along that quadrature.
inline GaussianState condition_on_outcome(const GaussianState& state, int measured,
                                          const GeneralDyneMeasurement& m,
                                          const Eigen::Vector2d& outcome) {
  if (!outcome.allFinite()) throw validity_error("condition_on_outcome: outcome not finite");
  const detail::Partition p = detail::split_at(state, measured);

  Eigen::Matrix2d kernel;  // (sigma_B + sigma_m)^-1 or its homodyne limit
  if (m.homodyne) {
    const Eigen::Vector2d u(-std::sin(m.phi), std::cos(m.phi));
    const double var = u.dot(p.sigma_b * u);
    kernel = u * u.transpose() / var;  // pseudoinverse of Pi sigma_B Pi
  } else {
    const Eigen::Matrix2d total = p.sigma_b + measurement_cm(m);
    const double det = total.determinant();
    if (!(det > 1e-12))
      throw validity_error("condition_on_outcome: singular sigma_B + sigma_m");
    kernel = total.inverse();
  }

  Eigen::MatrixXd cov = p.sigma_a - p.sigma_ab * kernel * p.sigma_ab.transpose();
  Eigen::VectorXd mean = p.mean_a + p.sigma_ab * kernel * (outcome - p.mean_b);
  return GaussianState(std::move(mean), std::move(cov));
}

inline GaussianState condition_on_outcome(const GaussianState& state, int measured,
                                          const GeneralDyneMeasurement& m,
                                          const MeasurementOutcome& outcome) {
  return condition_on_outcome(state, measured, m, outcome.r);
}

/// Outcome probability density of Eq.-type
///   p(r) = exp(-(r - r_B)^T (sigma_m + sigma_B)^-1 (r - r_B)) / (pi sqrt(det(...)))
/// Defined for finite-s measurements only; normalized to 1 over the plane.
inline double outcome_density(const GaussianState& state, int measured,
                              const GeneralDyneMeasurement& m,
                              const Eigen::Vector2d& outcome) {
  if (m.homodyne)
    throw unsupported_error("outcome_density: not defined in the homodyne limit");
  const detail::Partition p = detail::split_at(state, measured);
  const Eigen::Matrix2d total = p.sigma_b + measurement_cm(m);
  const Eigen::Vector2d delta = outcome - p.mean_b;
  const double quad = delta.dot(total.inverse() * delta);
  return std::exp(-quad) / (M_PI * std::sqrt(total.determinant()));
}

/// Draw an outcome from the Gaussian outcome distribution: mean r_B,
/// classical covariance (sigma_m + sigma_B)/2. Deterministic for a fixed seed.
inline MeasurementOutcome sample_outcome(const GaussianState& state, int measured,
                                         const GeneralDyneMeasurement& m, Rng& rng) {
  if (m.homodyne)
    throw unsupported_error("sample_outcome: not defined in the homodyne limit");
  const detail::Partition p = detail::split_at(state, measured);
  const Eigen::Matrix2d cov = 0.5 * (p.sigma_b + measurement_cm(m));
  const Eigen::Matrix2d chol = Eigen::LLT<Eigen::Matrix2d>(cov).matrixL();
  const Eigen::Vector2d z(rng.normal(), rng.normal());
  return {p.mean_b + chol * z};
}

inline MeasurementOutcome sample_outcome(const GaussianState& state, int measured,
                                         const GeneralDyneMeasurement& m,
                                         std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  return sample_outcome(state, measured, m, rng);
}

/// Closed form for |r'_A|^2 of a symmetric-sign STS (c1 = -c2 = c) conditioned
/// on outcome (|r_out|, theta) under the measurement (s, phi):
///   |r'_A|^2 = c^2 |r_out|^2 s^2 / ((b+s)^2 (b s+1)^2)
///              * { (b^2-1) + (2b + s + 1/s) [ s sin^2(theta-phi) + cos^2(theta-phi)/s ] }
/// Equivalent to cos^2/(b+s)^2 + sin^2/(b+1/s)^2 times c^2 |r_out|^2; reduces to
/// c^2 |r_out|^2/(b+1)^2 at s=1 and to c^2 |r_out|^2 sin^2(theta-phi)/b^2 as s -> inf.
inline double conditional_first_moment_energy(double a, double b, double c, double s,
                                              double phi, double theta,
                                              double r_out_magnitude) {
  (void)a;  // the first-moment map does not involve sigma_A
  const double rel = theta - phi;
  const double sin2 = std::sin(rel) * std::sin(rel);
  const double cos2 = std::cos(rel) * std::cos(rel);
  const double braces = (b * b - 1.0) + (2.0 * b + s + 1.0 / s) * (s * sin2 + cos2 / s);
  const double den = (b + s) * (b * s + 1.0);
  const double pref = c * c * r_out_magnitude * r_out_magnitude * s * s / (den * den);
  return pref * braces;
}

}  // namespace gcoh
