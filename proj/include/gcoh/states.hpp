#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <vector>

#include "gcoh/core.hpp"
#include "gcoh/errors.hpp"
#include "gcoh/rng.hpp"

namespace gcoh {

enum class NormalFormClass { sts, mts, generic };

/// Two-mode normal form: sigma_A = a 1, sigma_B = b 1, sigma_AB = diag(c1, c2).
struct NormalFormParams {
  double a = 1.0;
  double b = 1.0;
  double c1 = 0.0;
  double c2 = 0.0;

  NormalFormClass classify(double tol = 1e-12) const {
    if (std::abs(c1 + c2) <= tol) return NormalFormClass::sts;
    if (std::abs(c1 - c2) <= tol) return NormalFormClass::mts;
    return NormalFormClass::generic;
  }
};

/// Parameters of the pure three-mode state built from interlinked bilinear
/// interactions; N_A = N_B + N_C by construction.
struct InterlinkedParams {
  double n_b = 0.0;
  double n_c = 0.0;
  double n_a() const { return n_b + n_c; }
};

inline Eigen::Matrix4d normal_form_cov(const NormalFormParams& p) {
  Eigen::Matrix4d cov = Eigen::Matrix4d::Zero();
  cov.block<2, 2>(0, 0) = p.a * Eigen::Matrix2d::Identity();
  cov.block<2, 2>(2, 2) = p.b * Eigen::Matrix2d::Identity();
  cov.block<2, 2>(0, 2) = Eigen::Vector2d(p.c1, p.c2).asDiagonal();
  cov.block<2, 2>(2, 0) = cov.block<2, 2>(0, 2);
  return cov;
}

/// Zero-mean two-mode state with the stated normal-form blocks. Unphysical
/// parameters are rejected with the violated inequality spelled out.
inline GaussianState normal_form_state(const NormalFormParams& p) {
  const Eigen::Matrix4d cov = normal_form_cov(p);
  if (!is_physical(cov)) {
    std::ostringstream os;
    os << "normal-form parameters violate physicality: need ";
    const NormalFormClass cls = p.classify();
    if (cls == NormalFormClass::sts)
      os << "|c| <= sqrt(ab - 1 - |a-b|) = "
         << std::sqrt(std::max(p.a * p.b - 1.0 - std::abs(p.a - p.b), 0.0));
    else if (cls == NormalFormClass::mts)
      os << "|c| <= sqrt(ab + 1 - a - b) = "
         << std::sqrt(std::max(p.a * p.b + 1.0 - p.a - p.b, 0.0));
    else
      os << "min symplectic eigenvalue of the normal-form CM >= 1";
    os << " (a=" << p.a << ", b=" << p.b << ", c1=" << p.c1 << ", c2=" << p.c2 << ")";
    throw validity_error(os.str());
  }
  return GaussianState(Eigen::Vector4d::Zero(), cov);
}

/// Physical parametrization of symmetric STS: a = b = (1+2N)cosh 2r,
/// c1 = -c2 = (1+2N)sinh 2r. Physical for every N, r >= 0.
inline NormalFormParams sts_from_physical_params(double n_thermal, double r) {
  if (n_thermal < 0 || r < 0)
    throw validity_error("sts_from_physical_params: N and r must be >= 0");
  NormalFormParams p;
  p.a = p.b = (1.0 + 2.0 * n_thermal) * std::cosh(2.0 * r);
  p.c1 = (1.0 + 2.0 * n_thermal) * std::sinh(2.0 * r);
  p.c2 = -p.c1;
  return p;
}

struct Thresholds {
  double c_phys = 0.0;  // largest |c| compatible with physicality (STS sign pattern)
  double c_sep = 0.0;   // largest |c| compatible with separability
};

/// Physicality and separability thresholds on |c| for STS in normal form.
inline Thresholds thresholds(double a, double b, bool symmetric) {
  if (a < 1.0 || b < 1.0) throw validity_error("thresholds: need a, b >= 1");
  Thresholds t;
  if (symmetric) {
    t.c_phys = std::sqrt(std::max(a * a - 1.0, 0.0));
    t.c_sep = a - 1.0;
  } else {
    t.c_phys = std::sqrt(std::max(a * b - 1.0 - std::abs(a - b), 0.0));
    t.c_sep = std::sqrt(std::max(a * b + 1.0 - a - b, 0.0));
  }
  return t;
}

/// Uniform sampling of normal-form states: a (and b) uniform on the given
/// ranges, then the off-diagonal entries uniform over the physical region by
/// rejection. With symmetric = true the second marginal is tied to the first
/// (b = a). Deterministic per seed.
inline NormalFormParams sample_normal_form(Rng& rng, double a_min, double a_max,
                                           double b_min, double b_max,
                                           NormalFormClass cls, bool symmetric = false) {
  if (a_min < 1.0 || b_min < 1.0 || a_max < a_min || b_max < b_min)
    throw validity_error("sample_normal_form: ranges must lie in [1, inf)");
  for (int attempt = 0; attempt < 100000; ++attempt) {
    NormalFormParams p;
    p.a = rng.uniform(a_min, a_max);
    p.b = symmetric ? p.a : rng.uniform(b_min, b_max);
    const double box = std::sqrt(p.a * p.b);  // |sigma_AB,ii| <= sqrt(ab) always
    switch (cls) {
      case NormalFormClass::sts: {
        p.c1 = rng.uniform(0.0, box);
        p.c2 = -p.c1;
        break;
      }
      case NormalFormClass::mts: {
        p.c1 = p.c2 = rng.uniform(0.0, box);
        break;
      }
      case NormalFormClass::generic: {
        p.c1 = rng.uniform(-box, box);
        p.c2 = rng.uniform(-box, box);
        break;
      }
    }
    if (is_physical(normal_form_cov(p))) return p;
  }
  throw convergence_error("sample_normal_form: rejection sampling failed");
}

/// Convenience overload: same range for a and b.
inline NormalFormParams sample_normal_form(Rng& rng, double lo, double hi,
                                           NormalFormClass cls, bool symmetric = false) {
  return sample_normal_form(rng, lo, hi, lo, hi, cls, symmetric);
}

struct MaxC1Result {
  double c1_separable_boundary = 0.0;  // closed form at c2 = 0
  double c1_max = 0.0;                 // maximized over c2 on the physicality surface
  double c2_at_max = 0.0;
};

namespace detail {

/// Largest c1 >= 0 keeping (a, b, c1, c2) physical, by bisection.
inline double max_physical_c1(double a, double b, double c2, double tol = 1e-8) {
  double lo = 0.0, hi = std::sqrt(a * b) + 1.0;
  NormalFormParams p{a, b, 0.0, c2};
  if (!is_physical(normal_form_cov(p))) return -1.0;  // c2 itself infeasible
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    p.c1 = 0.5 * (lo + hi);
    (is_physical(normal_form_cov(p)) ? lo : hi) = p.c1;
  }
  return lo;
}

}  // namespace detail

/// Boundary search for generic normal-form states: (i) the closed-form
/// separable boundary |c1| = sqrt((a^2-1)(b^2-1)/(ab)) at c2 = 0 and (ii) the
/// numerically maximized |c1| over the physicality surface (golden-section
/// over c2, physicality bisection on c1).
inline MaxC1Result max_c1_on_physicality(double a, double b) {
  if (a <= 1.0 || b <= 1.0)
    throw validity_error("max_c1_on_physicality: need a, b > 1");
  MaxC1Result out;
  out.c1_separable_boundary =
      std::sqrt((a * a - 1.0) * (b * b - 1.0) / (a * b));

  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = -std::sqrt(a * b), hi = std::sqrt(a * b);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = detail::max_physical_c1(a, b, x1), f2 = detail::max_physical_c1(a, b, x2);
  for (int it = 0; it < 120 && hi - lo > 1e-9; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = detail::max_physical_c1(a, b, x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = detail::max_physical_c1(a, b, x1);
    }
  }
  out.c2_at_max = 0.5 * (lo + hi);
  out.c1_max = detail::max_physical_c1(a, b, out.c2_at_max);
  return out;
}

/// Pure three-mode state from interlinked bilinear interactions:
/// sigma_A = (2N_A+1) 1, off-diagonal blocks proportional to P = diag(1,-1).
inline GaussianState interlinked_three_mode(const InterlinkedParams& p) {
  if (p.n_b < 0 || p.n_c < 0)
    throw validity_error("interlinked_three_mode: occupancies must be >= 0");
  const double n_a = p.n_a();
  const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
  const Eigen::Matrix2d pf = Eigen::Vector2d(1.0, -1.0).asDiagonal();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(6, 6);
  cov.block<2, 2>(0, 0) = (2.0 * n_a + 1.0) * id;
  cov.block<2, 2>(2, 2) = (2.0 * p.n_b + 1.0) * id;
  cov.block<2, 2>(4, 4) = (2.0 * p.n_c + 1.0) * id;
  cov.block<2, 2>(0, 2) = 2.0 * std::sqrt(p.n_b * (n_a + 1.0)) * pf;
  cov.block<2, 2>(0, 4) = 2.0 * std::sqrt(p.n_c * (n_a + 1.0)) * pf;
  cov.block<2, 2>(2, 4) = 2.0 * std::sqrt(p.n_b * p.n_c) * pf;
  cov.block<2, 2>(2, 0) = cov.block<2, 2>(0, 2);
  cov.block<2, 2>(4, 0) = cov.block<2, 2>(0, 4);
  cov.block<2, 2>(4, 2) = cov.block<2, 2>(2, 4);
  return GaussianState(Eigen::VectorXd::Zero(6), cov);
}

/// One Fock-basis amplitude table entry of the interlinked state: the
/// expansion has support on |p+q, p, q> only.
struct InterlinkedAmplitude {
  int n_a = 0;  // = p + q
  int p = 0;
  int q = 0;
  double amplitude = 0.0;
};

struct InterlinkedFockTable {
  std::vector<InterlinkedAmplitude> entries;
  double tail_bound = 0.0;  // thermal tail of the mode-A marginal beyond cutoff
};

/// Closed-form Fock amplitudes over p + q <= cutoff, evaluated in log space.
inline InterlinkedFockTable interlinked_fock_amplitudes(const InterlinkedParams& par,
                                                        int cutoff) {
  const double n_a = par.n_a();
  if (cutoff < 10.0 * (1.0 + n_a))
    throw unsupported_error("interlinked_fock_amplitudes: cutoff below 10*(1+N_A)");
  InterlinkedFockTable table;
  const double log_norm = -0.5 * std::log1p(n_a);
  const double log_rb = (par.n_b > 0) ? std::log(par.n_b / (1.0 + n_a)) : 0.0;
  const double log_rc = (par.n_c > 0) ? std::log(par.n_c / (1.0 + n_a)) : 0.0;
  for (int p = 0; p <= cutoff; ++p) {
    if (p > 0 && par.n_b == 0.0) break;
    for (int q = 0; p + q <= cutoff; ++q) {
      if (q > 0 && par.n_c == 0.0) break;
      const double log_amp = log_norm + 0.5 * p * log_rb + 0.5 * q * log_rc +
                             0.5 * (std::lgamma(p + q + 1.0) - std::lgamma(p + 1.0) -
                                    std::lgamma(q + 1.0));
      table.entries.push_back({p + q, p, q, std::exp(log_amp)});
    }
  }
  // Mode-A marginal is thermal with occupancy N_A: exact geometric tail.
  const double q_ratio = n_a / (n_a + 1.0);
  table.tail_bound = std::pow(q_ratio, cutoff + 1);
  return table;
}

}  // namespace gcoh
