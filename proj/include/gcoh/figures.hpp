#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gcoh/coherence.hpp"
#include "gcoh/core.hpp"
#include "gcoh/errors.hpp"
#include "gcoh/io.hpp"
#include "gcoh/measurement.hpp"
#include "gcoh/monitoring.hpp"
#include "gcoh/scan.hpp"
#include "gcoh/states.hpp"

// Data files behind the nine figures: conditional-coherence maps, random-state
// classifications, interlinked three-mode bounds, monitored-OPO thresholds and
// the nonzero-outcome / average-coherence studies.

namespace gcoh {
namespace cli_detail {

/// Zero-outcome conditional coherence of a normal-form state where mode B is
/// measured. Homodyne picks the quadrature matching the larger |c_i|.
struct ConditionalCoherence {
  double c_s = 0.0;
  double c_s_gauss = 0.0;
};

inline ConditionalCoherence conditional_coherence_of(const NormalFormParams& p,
                                                     const GeneralDyneMeasurement& m,
                                                     double target_tail = 1e-12) {
  const GaussianState state = normal_form_state(p);
  const GaussianState cond = condition_on_outcome(state, 1, m, Eigen::Vector2d::Zero());
  ConditionalCoherence out;
  out.c_s_gauss = gaussian_coherence(cond);
  out.c_s = entropic_coherence(cond, target_tail).value;
  return out;
}

/// Homodyne measurement of the quadrature correlated through max(|c1|,|c2|):
/// phi = 0 measures p (uses c2), phi = pi/2 measures x (uses c1).
inline GeneralDyneMeasurement optimal_homodyne(const NormalFormParams& p) {
  return GeneralDyneMeasurement::homodyne_limit(
      std::abs(p.c1) > std::abs(p.c2) ? M_PI / 2.0 : 0.0);
}

inline Table figure1(const ParamReader& reader, std::uint64_t) {
  const double r = reader.number("r", 1.0);
  const double n_max = reader.number("N-max", 10.0);
  const int n_steps = reader.integer("N-steps", 21);
  const double rm_max = reader.number("rm-max", 3.0);
  const int rm_steps = reader.integer("rm-steps", 16);
  const double tail = reader.number("target-tail", 1e-12);
  Table t;
  t.columns = {"N", "r_m", "C_S", "C_S_G"};
  for (double n : linspace(0.0, n_max, n_steps))
    for (double rm : linspace(0.0, rm_max, rm_steps)) {
      const auto c = conditional_coherence_of(sts_from_physical_params(n, r),
                                              GeneralDyneMeasurement::from_squeezing(rm),
                                              tail);
      t.add_row({n, rm, c.c_s, c.c_s_gauss});
    }
  return t;
}

inline Table figure2(const ParamReader& reader, std::uint64_t) {
  const std::vector<double> a_list = parse_list("a-list", reader.text("a-list", "1.5,2,2.5"));
  const int c_steps = reader.integer("c-steps", 48);
  const double tail = reader.number("target-tail", 1e-12);
  Table t;
  t.columns = {"a", "c", "C_S", "C_S_G", "c_sep", "c_phys"};
  for (double a : a_list) {
    const Thresholds th = thresholds(a, a, true);
    for (double c : linspace(0.0, th.c_phys * (1.0 - 1e-9), c_steps)) {
      const auto v = conditional_coherence_of({a, a, c, -c},
                                              GeneralDyneMeasurement::homodyne_limit(), tail);
      t.add_row({a, c, v.c_s, v.c_s_gauss, th.c_sep, th.c_phys});
    }
  }
  return t;
}

inline Table figure3(const ParamReader& reader, std::uint64_t seed) {
  const int samples = reader.integer("samples", 50000);
  const double a_min = reader.number("a-min", 1.0);
  const double a_max = reader.number("a-max", 5.0);
  const double tail = reader.number("target-tail", 1e-12);
  Rng rng(seed);
  Table t;
  t.columns = {"a", "c", "C_S", "C_S_G", "entangled_flag", "threshold_CS_at_sep",
               "threshold_CSG_at_sep", "threshold_CS_at_phys", "threshold_CSG_at_phys"};
  const GeneralDyneMeasurement hom = GeneralDyneMeasurement::homodyne_limit();
  for (int i = 0; i < samples; ++i) {
    const NormalFormParams p =
        sample_normal_form(rng, a_min, a_max, NormalFormClass::sts, /*symmetric=*/true);
    const Thresholds th = thresholds(p.a, p.b, true);
    const auto v = conditional_coherence_of(p, hom, tail);
    const auto at_sep = conditional_coherence_of({p.a, p.a, th.c_sep, -th.c_sep}, hom, tail);
    const double c_phys_in = th.c_phys * (1.0 - 1e-12);
    const auto at_phys = conditional_coherence_of({p.a, p.a, c_phys_in, -c_phys_in}, hom, tail);
    const bool entangled = !is_separable_ppt(normal_form_state(p));
    t.add_row({p.a, p.c1, v.c_s, v.c_s_gauss, entangled ? 1.0 : 0.0, at_sep.c_s,
               at_sep.c_s_gauss, at_phys.c_s, at_phys.c_s_gauss});
  }
  return t;
}

inline Table figure4(const ParamReader& reader, std::uint64_t seed) {
  const std::string family = reader.text("family", "sts");
  const int samples = reader.integer("samples", family == "sts" ? 50000 : 5000);
  const double a_min = reader.number("a-min", 1.0);
  const double a_max = reader.number("a-max", 5.0);
  const double b_min = reader.number("b-min", 1.0);
  const double b_max = reader.number("b-max", 5.0);
  const double tail = reader.number("target-tail", 1e-12);
  Rng rng(seed);
  Table t;
  if (family == "sts") {
    t.columns = {"a", "b", "c", "C_S", "C_S_G", "entangled_flag", "threshold_CS_at_sep",
                 "threshold_CSG_at_sep", "threshold_CS_at_phys", "threshold_CSG_at_phys"};
    const GeneralDyneMeasurement hom = GeneralDyneMeasurement::homodyne_limit();
    for (int i = 0; i < samples; ++i) {
      const NormalFormParams p =
          sample_normal_form(rng, a_min, a_max, b_min, b_max, NormalFormClass::sts);
      const Thresholds th = thresholds(p.a, p.b, false);
      const auto v = conditional_coherence_of(p, hom, tail);
      const auto at_sep =
          conditional_coherence_of({p.a, p.b, th.c_sep, -th.c_sep}, hom, tail);
      const double cp = th.c_phys * (1.0 - 1e-12);
      const auto at_phys = conditional_coherence_of({p.a, p.b, cp, -cp}, hom, tail);
      const bool entangled = !is_separable_ppt(normal_form_state(p));
      t.add_row({p.a, p.b, p.c1, v.c_s, v.c_s_gauss, entangled ? 1.0 : 0.0, at_sep.c_s,
                 at_sep.c_s_gauss, at_phys.c_s, at_phys.c_s_gauss});
    }
    return t;
  }
  if (family != "generic")
    throw unsupported_error("figure 4: family must be 'sts' or 'generic'");
  t.columns = {"a", "b", "c1", "c2", "c_max", "C_S", "C_S_G", "entangled_flag",
               "surface_c1max_CS", "surface_c1max_CSG", "surface_c20_CS",
               "surface_c20_CSG"};
  for (int i = 0; i < samples; ++i) {
    const NormalFormParams p =
        sample_normal_form(rng, a_min, a_max, b_min, b_max, NormalFormClass::generic);
    const auto v = conditional_coherence_of(p, optimal_homodyne(p), tail);
    const bool entangled = !is_separable_ppt(normal_form_state(p));
    // Boundary states at the same (a, b): maximal |c1| and the c2 = 0 family.
    const double a = std::max(p.a, 1.0 + 1e-9), b = std::max(p.b, 1.0 + 1e-9);
    const MaxC1Result mx = max_c1_on_physicality(a, b);
    const NormalFormParams top{a, b, mx.c1_max * (1.0 - 1e-10), mx.c2_at_max};
    const auto v_top = conditional_coherence_of(top, optimal_homodyne(top), tail);
    const NormalFormParams sep{a, b, mx.c1_separable_boundary * (1.0 - 1e-10), 0.0};
    const auto v_sep = conditional_coherence_of(sep, optimal_homodyne(sep), tail);
    t.add_row({p.a, p.b, p.c1, p.c2, std::max(std::abs(p.c1), std::abs(p.c2)), v.c_s,
               v.c_s_gauss, entangled ? 1.0 : 0.0, v_top.c_s, v_top.c_s_gauss, v_sep.c_s,
               v_sep.c_s_gauss});
  }
  return t;
}

/// Conditional BC state of the interlinked three-mode state after a zero-
/// outcome general-dyne measurement on mode A.
inline GaussianState interlinked_conditional_bc(const InterlinkedParams& p, double r_m) {
  const GaussianState tri = interlinked_three_mode(p);
  return condition_on_outcome(tri, 0, GeneralDyneMeasurement::from_squeezing(r_m),
                              Eigen::Vector2d::Zero());
}

/// C_S of the (mixed) BC marginal from the closed-form Fock amplitudes of the
/// full pure state: p_{pq} = |amp(p+q, p, q)|^2.
inline double interlinked_marginal_entropic(const InterlinkedParams& p, int cutoff) {
  const InterlinkedFockTable table = interlinked_fock_amplitudes(p, cutoff);
  double h = 0.0;
  for (const auto& e : table.entries) {
    const double prob = e.amplitude * e.amplitude;
    if (prob > 0.0) h -= prob * std::log(prob);
  }
  const GaussianState bc = partial_trace(interlinked_three_mode(p), {1, 2});
  return h - von_neumann_entropy(bc);
}

inline Table figure5(const ParamReader& reader, std::uint64_t) {
  const std::string panel = reader.text("panel", "left");
  const double tail = reader.number("target-tail", 1e-10);
  Table t;
  t.columns = {"x", "C_S", "C_S_G", "discord", "marg_C_S", "marg_C_S_G"};
  const auto add_point = [&](double x, const InterlinkedParams& p, double r_m) {
    const GaussianState cond = interlinked_conditional_bc(p, r_m);
    const double cs = entropic_coherence(cond, tail).value;
    const double csg = gaussian_coherence(cond);
    const double disc = pure_state_discord(cond);
    const GaussianState marg = partial_trace(interlinked_three_mode(p), {1, 2});
    const int cutoff =
        std::max(40, static_cast<int>(std::ceil(10.0 * (1.0 + p.n_a()))));
    t.add_row({x, cs, csg, disc, interlinked_marginal_entropic(p, cutoff),
               gaussian_coherence(marg)});
  };
  if (panel == "left") {
    const InterlinkedParams p{reader.number("NB", 1.0), reader.number("NC", 2.0)};
    const double rm_max = reader.number("rm-max", 5.0);
    const int rm_steps = reader.integer("rm-steps", 21);
    for (double rm : linspace(0.0, rm_max, rm_steps)) add_point(rm, p, rm);
    return t;
  }
  if (panel != "right") throw unsupported_error("figure 5: panel must be left|right");
  const double rm = reader.number("rm", 5.0);
  const double na_max = reader.number("NA-max", 8.0);
  const int na_steps = reader.integer("NA-steps", 16);
  for (double na : linspace(0.5, na_max, na_steps))
    add_point(na, InterlinkedParams{0.5 * na, 0.5 * na}, rm);
  return t;
}

inline Table figure6(const ParamReader& reader, std::uint64_t) {
  const double n1 = reader.number("N", 0.1);
  const double n2 = reader.number("N2", 5.0);
  const double chi_min = reader.number("chi-min", 0.05);
  const double chi_max = reader.number("chi-max", 0.45);
  const int chi_steps = reader.integer("chi-steps", 9);
  Table t;
  t.columns = {"chi_tilde", "rth_CS_N1", "rth_CSG_N1", "rth_CS_N2", "rth_CSG_N2"};
  for (double chi : linspace(chi_min, chi_max, chi_steps)) {
    OPOParams p1{chi, 1.0, n1, 0.0};
    OPOParams p2{chi, 1.0, n2, 0.0};
    t.add_row({chi, threshold_squeezing(p1, CoherenceMeasure::entropic).r_m,
               threshold_squeezing(p1, CoherenceMeasure::gaussian).r_m,
               threshold_squeezing(p2, CoherenceMeasure::entropic).r_m,
               threshold_squeezing(p2, CoherenceMeasure::gaussian).r_m});
  }
  return t;
}

inline Table figure7(const ParamReader& reader, std::uint64_t seed) {
  const double r = reader.number("r", 1.0);
  const double n_min = reader.number("N-min", 0.1);
  const double n_max = reader.number("N-max", 5.0);
  const int n_steps = reader.integer("N-steps", 8);
  const double rm_min = reader.number("rm-min", 0.0);
  const double rm_max = reader.number("rm-max", 3.0);
  const int rm_steps = reader.integer("rm-steps", 7);
  const int samples = reader.integer("samples", 2000);
  const CoherenceMeasure measure = parse_measure(reader.text("measure", "gaussian"));
  Table t;
  t.columns = {"N", "r_m", "avg_coherence", "std_error", "n_samples"};
  std::uint64_t point = 0;
  for (double n : linspace(n_min, n_max, n_steps))
    for (double rm : linspace(rm_min, rm_max, rm_steps)) {
      const GaussianState sts = normal_form_state(sts_from_physical_params(n, r));
      const auto est =
          average_remote_coherence(sts, GeneralDyneMeasurement::from_squeezing(rm),
                                   measure, samples, mix_seed(seed, point++));
      t.add_row({n, rm, est.mean, est.std_error, static_cast<double>(samples)});
    }
  return t;
}

inline Table figure8(const ParamReader& reader, std::uint64_t) {
  const double n = reader.number("N", 1.0);
  const double r = reader.number("r", 1.0);
  const double rm = reader.number("rm", 1.0);
  const int theta_steps = reader.integer("theta-steps", 25);
  const std::vector<double> r_out_list =
      parse_list("r-out-list", reader.text("r-out-list", "1,2,4,6"));
  const double tail = reader.number("target-tail", 1e-10);
  const GaussianState sts = normal_form_state(sts_from_physical_params(n, r));
  const GeneralDyneMeasurement m = GeneralDyneMeasurement::from_squeezing(rm);
  Table t;
  t.columns = {"theta", "r_out", "C_S", "C_S_G"};
  for (double rout : r_out_list)
    for (double theta : linspace(0.0, M_PI, theta_steps)) {
      const Eigen::Vector2d outcome = MeasurementOutcome::from_polar(rout, theta).r;
      t.add_row({theta, rout,
                 remote_coherence(sts, m, outcome, CoherenceMeasure::entropic, 1, tail),
                 remote_coherence(sts, m, outcome, CoherenceMeasure::gaussian)});
    }
  return t;
}

inline Table figure9(const ParamReader& reader, std::uint64_t) {
  const double n = reader.number("N", 1.0);
  const double r = reader.number("r", 1.0);
  const double rm_max = reader.number("rm-max", 3.0);
  const int rm_steps = reader.integer("rm-steps", 13);
  const std::vector<double> r_out_list =
      parse_list("r-out-list", reader.text("r-out-list", "0,1,4"));
  const std::vector<double> theta_list =
      parse_list("theta-list", reader.text("theta-list", "0,0.78539816339744831,1.5707963267948966"));
  const double tail = reader.number("target-tail", 1e-10);
  const GaussianState sts = normal_form_state(sts_from_physical_params(n, r));
  Table t;
  t.columns = {"r_m", "r_out", "theta", "C_S", "C_S_G"};
  for (double rout : r_out_list)
    for (double theta : theta_list) {
      for (double rm : linspace(0.0, rm_max, rm_steps)) {
        const GeneralDyneMeasurement m = GeneralDyneMeasurement::from_squeezing(rm);
        const Eigen::Vector2d outcome = MeasurementOutcome::from_polar(rout, theta).r;
        t.add_row({rm, rout, theta,
                   remote_coherence(sts, m, outcome, CoherenceMeasure::entropic, 1, tail),
                   remote_coherence(sts, m, outcome, CoherenceMeasure::gaussian)});
      }
      if (rout == 0.0) break;  // zero outcome: angle is irrelevant
    }
  return t;
}

}  // namespace cli_detail

/// Compute the data table behind one figure (1-9).
inline Table run_figure_table(int figure_id, const RunConfig& config,
                              std::map<std::string, std::string>* effective = nullptr) {
  cli_detail::ParamReader reader(config, effective);
  switch (figure_id) {
    case 1: return cli_detail::figure1(reader, config.seed);
    case 2: return cli_detail::figure2(reader, config.seed);
    case 3: return cli_detail::figure3(reader, config.seed);
    case 4: return cli_detail::figure4(reader, config.seed);
    case 5: return cli_detail::figure5(reader, config.seed);
    case 6: return cli_detail::figure6(reader, config.seed);
    case 7: return cli_detail::figure7(reader, config.seed);
    case 8: return cli_detail::figure8(reader, config.seed);
    case 9: return cli_detail::figure9(reader, config.seed);
    default:
      throw unsupported_error("figure id must be in 1..9");
  }
}

/// Figure entry point: writes the data file and its metadata sidecar.
inline void run_figure(int figure_id, const RunConfig& config) {
  std::map<std::string, std::string> effective;
  const Table table = run_figure_table(figure_id, config, &effective);
  const std::string payload =
      config.format == OutputFormat::csv ? table_to_csv(table) : table_to_json(table);
  write_text_file(config.output_path, payload);
  write_meta_sidecar(config.output_path, config.command, effective, config.seed,
                     config.format);
}

}  // namespace gcoh
