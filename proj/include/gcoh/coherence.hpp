#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

#include "gcoh/core.hpp"
#include "gcoh/errors.hpp"
#include "gcoh/fock.hpp"
#include "gcoh/measurement.hpp"
#include "gcoh/rng.hpp"

namespace gcoh {

enum class CoherenceMeasure { gaussian, entropic };

/// Both coherence monotones of one state plus Fock-truncation diagnostics.
struct CoherenceReport {
  double c_s = 0.0;
  double c_s_gauss = 0.0;
  int cutoff = 0;
  double tail_bound = 0.0;
  double c_s_uncertainty = 0.0;
  int mode_count = 0;
};

/// Gaussian relative entropy of coherence: distance to the closest product of
/// thermal states, sum_i h(2 nbar_i + 1) - S(rho).
inline double gaussian_coherence(const GaussianState& state) {
  double thermal_entropy = 0.0;
  for (int m = 0; m < state.n_modes(); ++m)
    thermal_entropy += entropy_h(2.0 * mean_photon_number_of_mode(state, m) + 1.0);
  return thermal_entropy - von_neumann_entropy(state);
}

struct EntropicCoherenceResult {
  double value = 0.0;
  double uncertainty = 0.0;
  int cutoff = 0;
  double tail_bound = 0.0;
};

namespace detail {

/// Joint distribution with cutoffs grown until the mass deficit meets target_tail.
inline JointPhotonNumberDistribution joint_distribution_adaptive(
    const GaussianState& state, double target_tail, int* cutoff_out = nullptr) {
  int cut_a = static_cast<int>(
      std::ceil(10.0 * (1.0 + mean_photon_number_of_mode(state, 0))));
  int cut_b = static_cast<int>(
      std::ceil(10.0 * (1.0 + mean_photon_number_of_mode(state, 1))));
  for (int attempt = 0; attempt < 8; ++attempt) {
    JointPhotonNumberDistribution joint =
        joint_photon_number_distribution(state, cut_a, cut_b);
    if (joint.tail_bound <= target_tail) {
      if (cutoff_out) *cutoff_out = std::max(cut_a, cut_b);
      return joint;
    }
    cut_a *= 2;
    cut_b *= 2;
  }
  throw convergence_error("joint photon-number distribution: tail target not reached");
}

}  // namespace detail

/// Relative entropy of coherence C_S = H({p_n}) - S(rho) from the photon-number
/// distribution. Single-mode states of any kind; two-mode states must be pure
/// and zero-mean (mixed two-mode inputs are served by the oracle path).
inline EntropicCoherenceResult entropic_coherence(const GaussianState& state,
                                                  double target_tail = 1e-12) {
  EntropicCoherenceResult out;
  if (state.n_modes() == 1) {
    const PhotonNumberDistribution dist = photon_number_distribution(state, target_tail);
    const ShannonEntropyResult h = shannon_entropy(dist);
    out.value = h.value - von_neumann_entropy(state);
    out.uncertainty = h.uncertainty;
    out.cutoff = dist.cutoff;
    out.tail_bound = dist.tail_bound;
    return out;
  }
  if (state.n_modes() == 2) {
    int cutoff = 0;
    const JointPhotonNumberDistribution joint =
        detail::joint_distribution_adaptive(state, std::max(target_tail, 1e-13), &cutoff);
    const ShannonEntropyResult h = shannon_entropy(joint);
    out.value = h.value - von_neumann_entropy(state);
    out.uncertainty = h.uncertainty;
    out.cutoff = cutoff;
    out.tail_bound = joint.tail_bound;
    return out;
  }
  throw unsupported_error("entropic_coherence: supports 1 or 2 modes");
}

inline CoherenceReport coherence_report(const GaussianState& state,
                                        double target_tail = 1e-12) {
  CoherenceReport report;
  report.mode_count = state.n_modes();
  report.c_s_gauss = gaussian_coherence(state);
  const EntropicCoherenceResult e = entropic_coherence(state, target_tail);
  report.c_s = e.value;
  report.cutoff = e.cutoff;
  report.tail_bound = e.tail_bound;
  report.c_s_uncertainty = e.uncertainty;
  return report;
}

/// Quantum mutual information I_q = S(A) + S(B) - S(AB).
inline double quantum_mutual_information(const GaussianState& state) {
  if (state.n_modes() != 2)
    throw dimension_error("quantum_mutual_information: expected two modes");
  return von_neumann_entropy(partial_trace(state, {0})) +
         von_neumann_entropy(partial_trace(state, {1})) - von_neumann_entropy(state);
}

/// Correlated coherence Delta C = C(AB) - C(A) - C(B). The Gaussian flavor is
/// algebraically the quantum mutual information; the entropic flavor needs a
/// pure zero-mean two-mode state.
inline double correlated_coherence(const GaussianState& state, CoherenceMeasure measure,
                                   double target_tail = 1e-12) {
  if (state.n_modes() != 2)
    throw dimension_error("correlated_coherence: expected two modes");
  const GaussianState marg_a = partial_trace(state, {0});
  const GaussianState marg_b = partial_trace(state, {1});
  if (measure == CoherenceMeasure::gaussian)
    return gaussian_coherence(state) - gaussian_coherence(marg_a) -
           gaussian_coherence(marg_b);
  return entropic_coherence(state, target_tail).value -
         entropic_coherence(marg_a, target_tail).value -
         entropic_coherence(marg_b, target_tail).value;
}

/// Discord of a pure bipartite state: the entanglement entropy S(rho_A).
inline double pure_state_discord(const GaussianState& state) {
  if (state.n_modes() != 2)
    throw dimension_error("pure_state_discord: expected two modes");
  if (std::abs(state.cov().determinant() - 1.0) > 1e-6)
    throw unsupported_error("pure_state_discord: state is mixed");
  return von_neumann_entropy(partial_trace(state, {0}));
}

/// Coherence created on the unmeasured mode by a general-dyne measurement on
/// mode `measured` (default: mode B). First moments of the conditional state
/// are kept, so nonzero outcomes contribute.
inline double remote_coherence(const GaussianState& state, const GeneralDyneMeasurement& m,
                               const Eigen::Vector2d& outcome, CoherenceMeasure measure,
                               int measured = 1, double target_tail = 1e-12) {
  const GaussianState conditional = condition_on_outcome(state, measured, m, outcome);
  if (measure == CoherenceMeasure::gaussian) return gaussian_coherence(conditional);
  return entropic_coherence(conditional, target_tail).value;
}

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
};

/// Monte Carlo average of the remote coherence over the outcome distribution.
/// Sample i uses the seed mix(master_seed, i), so the estimate is reproducible
/// and partitionable across workers.
inline MonteCarloEstimate average_remote_coherence(const GaussianState& state,
                                                   const GeneralDyneMeasurement& m,
                                                   CoherenceMeasure measure,
                                                   std::int64_t n_samples,
                                                   std::uint64_t rng_seed,
                                                   int measured = 1,
                                                   double target_tail = 1e-10) {
  if (m.homodyne)
    throw unsupported_error("average_remote_coherence: homodyne outcomes have no density");
  if (n_samples < 1000)
    throw unsupported_error("average_remote_coherence: need at least 1e3 samples");
  double mean = 0.0, m2 = 0.0;
  for (std::int64_t i = 0; i < n_samples; ++i) {
    const MeasurementOutcome outcome =
        sample_outcome(state, measured, m, mix_seed(rng_seed, static_cast<std::uint64_t>(i)));
    const double v = remote_coherence(state, m, outcome.r, measure, measured, target_tail);
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
  }
  MonteCarloEstimate est;
  est.mean = mean;
  est.n_samples = n_samples;
  est.std_error = std::sqrt(std::max(m2, 0.0) /
                            (static_cast<double>(n_samples) *
                             static_cast<double>(n_samples - 1)));
  return est;
}

}  // namespace gcoh
