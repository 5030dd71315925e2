#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "gcoh/coherence.hpp"
#include "gcoh/core.hpp"
#include "gcoh/errors.hpp"
#include "gcoh/io.hpp"
#include "gcoh/measurement.hpp"
#include "gcoh/monitoring.hpp"
#include "gcoh/states.hpp"

namespace gcoh {

/// Command configuration shared by `figure` and `scan`. Parameters are kept
/// stringly typed (they arrive from flags) and parsed on use; every consumed
/// parameter is echoed back with its effective value for the metadata sidecar.
struct RunConfig {
  std::string command;
  std::map<std::string, std::string> parameters;
  std::uint64_t seed = 1;
  std::string output_path;
  OutputFormat format = OutputFormat::csv;
};

namespace cli_detail {

class ParamReader {
 public:
  ParamReader(const RunConfig& config, std::map<std::string, std::string>* effective)
      : in_(config.parameters), out_(effective) {}

  double number(const std::string& key, double dflt) const {
    double v = dflt;
    if (auto it = in_.find(key); it != in_.end()) v = parse_number(key, it->second);
    record(key, format_double(v));
    return v;
  }

  int integer(const std::string& key, int dflt) const {
    return static_cast<int>(number(key, dflt));
  }

  std::string text(const std::string& key, const std::string& dflt) const {
    std::string v = dflt;
    if (auto it = in_.find(key); it != in_.end()) v = it->second;
    record(key, v);
    return v;
  }

  bool has(const std::string& key) const { return in_.count(key) > 0; }

  static double parse_number(const std::string& key, const std::string& text) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(text, &pos);
      if (pos != text.size()) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      throw unsupported_error("parameter '" + key + "': not a number: " + text);
    }
  }

 private:
  void record(const std::string& key, const std::string& value) const {
    if (out_) (*out_)[key] = value;
  }
  const std::map<std::string, std::string>& in_;
  std::map<std::string, std::string>* out_;
};

inline std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> v;
  if (count <= 1) {
    v.push_back(lo);
    return v;
  }
  v.reserve(count);
  for (int i = 0; i < count; ++i)
    v.push_back(lo + (hi - lo) * static_cast<double>(i) / (count - 1));
  return v;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string tok = text.substr(start, comma - start);
    if (!tok.empty()) out.push_back(ParamReader::parse_number(key, tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw unsupported_error("parameter '" + key + "': empty list");
  return out;
}

inline CoherenceMeasure parse_measure(const std::string& text) {
  if (text == "gaussian") return CoherenceMeasure::gaussian;
  if (text == "entropic") return CoherenceMeasure::entropic;
  throw unsupported_error("measure must be 'gaussian' or 'entropic', got: " + text);
}

/// Deterministic parallel map: evaluates fn(i) for i in [0, n) on `threads`
/// workers, results land in a preallocated slot per index.
template <typename Fn>
void parallel_for(std::int64_t n, int threads, Fn&& fn) {
  if (threads <= 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next(0);
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (;;) {
        const std::int64_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace cli_detail

/// One swept axis of a scan grid: inclusive linspace lo..hi with `count` points.
struct ScanAxis {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
  int count = 1;
};

/// "name=lo:hi:count" or "name=value" (single point).
inline ScanAxis parse_grid_spec(const std::string& spec) {
  const std::size_t eq = spec.find('=');
  if (eq == std::string::npos)
    throw unsupported_error("grid spec must be name=lo:hi:count, got: " + spec);
  ScanAxis axis;
  axis.name = spec.substr(0, eq);
  const std::string rhs = spec.substr(eq + 1);
  const std::size_t c1 = rhs.find(':');
  if (c1 == std::string::npos) {
    axis.lo = axis.hi = cli_detail::ParamReader::parse_number(axis.name, rhs);
    axis.count = 1;
    return axis;
  }
  const std::size_t c2 = rhs.find(':', c1 + 1);
  if (c2 == std::string::npos)
    throw unsupported_error("grid spec must be name=lo:hi:count, got: " + spec);
  axis.lo = cli_detail::ParamReader::parse_number(axis.name, rhs.substr(0, c1));
  axis.hi = cli_detail::ParamReader::parse_number(axis.name, rhs.substr(c1 + 1, c2 - c1 - 1));
  axis.count = static_cast<int>(
      cli_detail::ParamReader::parse_number(axis.name, rhs.substr(c2 + 1)));
  if (axis.count < 1) throw unsupported_error("grid spec: count must be >= 1");
  return axis;
}

namespace cli_detail {

using NumericParams = std::map<std::string, double>;

inline double need(const NumericParams& p, const std::string& key, double dflt) {
  auto it = p.find(key);
  return it == p.end() ? dflt : it->second;
}

struct QuantityOutput {
  std::vector<std::string> names;
  std::vector<double> values;
};

inline GaussianState scan_family_state(const std::string& family, const NumericParams& p) {
  if (family == "squeezed_vacuum") {
    const double r = need(p, "r", 1.0);
    const Eigen::Matrix2d cov =
        Eigen::Vector2d(std::exp(2.0 * r), std::exp(-2.0 * r)).asDiagonal();
    return GaussianState(Eigen::Vector2d::Zero(), cov);
  }
  if (family == "thermal") return GaussianState::thermal(need(p, "N", 1.0));
  if (family == "displaced_vacuum") {
    const double d = need(p, "d", 1.0);
    return GaussianState(Eigen::Vector2d(d, 0.0), Eigen::Matrix2d::Identity());
  }
  if (family == "sts_conditional") {
    const GaussianState sts =
        normal_form_state(sts_from_physical_params(need(p, "N", 1.0), need(p, "r", 1.0)));
    const double rm = need(p, "rm", 0.0);
    const GeneralDyneMeasurement m = std::isinf(rm)
                                         ? GeneralDyneMeasurement::homodyne_limit()
                                         : GeneralDyneMeasurement::from_squeezing(rm);
    return condition_on_outcome(sts, 1, m, Eigen::Vector2d::Zero());
  }
  throw unsupported_error("unknown state family: " + family);
}

inline QuantityOutput evaluate_quantity(const std::string& quantity,
                                        const NumericParams& numeric,
                                        const std::map<std::string, std::string>& text,
                                        std::uint64_t seed) {
  auto text_of = [&](const std::string& key, const std::string& dflt) {
    auto it = text.find(key);
    return it == text.end() ? dflt : it->second;
  };
  const CoherenceMeasure measure = parse_measure(text_of("measure", "gaussian"));

  if (quantity == "gaussian_coherence" || quantity == "entropic_coherence") {
    const GaussianState state =
        scan_family_state(text_of("family", "squeezed_vacuum"), numeric);
    const double value = quantity == "gaussian_coherence"
                             ? gaussian_coherence(state)
                             : entropic_coherence(state).value;
    return {{quantity}, {value}};
  }
  if (quantity == "remote_coherence") {
    const GaussianState sts = normal_form_state(
        sts_from_physical_params(need(numeric, "N", 1.0), need(numeric, "r", 1.0)));
    const double rm = need(numeric, "rm", 0.0);
    const bool homodyne = need(numeric, "homodyne", 0.0) != 0.0;
    const double phi = need(numeric, "phi", 0.0);
    const GeneralDyneMeasurement m =
        homodyne ? GeneralDyneMeasurement::homodyne_limit(phi)
                 : GeneralDyneMeasurement::from_squeezing(rm, phi);
    const Eigen::Vector2d outcome =
        MeasurementOutcome::from_polar(need(numeric, "r_out", 0.0),
                                       need(numeric, "theta", 0.0))
            .r;
    return {{"remote_coherence"}, {remote_coherence(sts, m, outcome, measure)}};
  }
  if (quantity == "average_remote_coherence") {
    const GaussianState sts = normal_form_state(
        sts_from_physical_params(need(numeric, "N", 1.0), need(numeric, "r", 1.0)));
    const GeneralDyneMeasurement m =
        GeneralDyneMeasurement::from_squeezing(need(numeric, "rm", 0.0));
    const auto est = average_remote_coherence(
        sts, m, measure, static_cast<std::int64_t>(need(numeric, "samples", 10000)), seed);
    return {{"average_remote_coherence", "std_error"}, {est.mean, est.std_error}};
  }
  if (quantity == "opo_coherence") {
    OPOParams p;
    p.chi_tilde = need(numeric, "chi_tilde", 0.4);
    p.n_thermal = need(numeric, "N", 0.0);
    p.r_m = need(numeric, "rm", 0.0);
    const bool monitored = need(numeric, "monitored", 1.0) != 0.0;
    const bool homodyne = std::isinf(p.r_m);
    const Eigen::Matrix2d cov = opo_steady_state_closed_form(p, monitored, homodyne);
    const GaussianState state(Eigen::Vector2d::Zero(), cov);
    const double value = measure == CoherenceMeasure::gaussian
                             ? gaussian_coherence(state)
                             : entropic_coherence(state).value;
    return {{"opo_coherence"}, {value}};
  }
  if (quantity == "opo_threshold_squeezing") {
    OPOParams p;
    p.chi_tilde = need(numeric, "chi_tilde", 0.4);
    p.n_thermal = need(numeric, "N", 0.0);
    const ThresholdResult t = threshold_squeezing(p, measure);
    return {{"opo_threshold_squeezing", "bracketed"},
            {t.r_m, t.bracketed ? 1.0 : 0.0}};
  }
  throw unsupported_error("unknown quantity: " + quantity);
}

}  // namespace cli_detail

/// Cartesian-product scan of a named quantity over up to three axes.
/// Deterministic per seed (point i uses mix(seed, i)), optionally parallel.
inline Table run_scan_table(const RunConfig& config,
                            std::map<std::string, std::string>* effective = nullptr) {
  cli_detail::ParamReader reader(config, effective);
  const std::string quantity = reader.text("quantity", "");
  if (quantity.empty()) throw unsupported_error("scan: --quantity is required");

  std::vector<ScanAxis> axes;
  std::map<std::string, std::string> text_params;
  cli_detail::NumericParams fixed;
  for (const auto& [key, value] : config.parameters) {
    if (key.rfind("grid:", 0) == 0) {
      axes.push_back(parse_grid_spec(key.substr(5) + "=" + value));
      if (effective) (*effective)[key] = value;
    } else if (key.rfind("fix:", 0) == 0) {
      const std::string name = key.substr(4);
      try {
        fixed[name] = cli_detail::ParamReader::parse_number(name, value);
      } catch (const unsupported_error&) {
        text_params[name] = value;  // string-valued parameter (family, measure)
      }
      if (effective) (*effective)[key] = value;
    }
  }
  if (axes.size() > 3) throw unsupported_error("scan: at most 3 swept axes");
  const int threads = reader.integer("parallel", 1);

  std::int64_t total = 1;
  for (const auto& axis : axes) total *= axis.count;
  if (total > 10'000'000) throw unsupported_error("scan: grid larger than 1e7 points");

  std::vector<std::vector<double>> axis_values;
  for (const auto& axis : axes)
    axis_values.push_back(cli_detail::linspace(axis.lo, axis.hi, axis.count));

  // Probe one point to learn the output column names.
  cli_detail::NumericParams probe = fixed;
  for (std::size_t a = 0; a < axes.size(); ++a) probe[axes[a].name] = axis_values[a][0];
  const cli_detail::QuantityOutput head =
      cli_detail::evaluate_quantity(quantity, probe, text_params, mix_seed(config.seed, 0));

  Table table;
  for (const auto& axis : axes) table.columns.push_back(axis.name);
  for (const auto& name : head.names) table.columns.push_back(name);
  table.rows.assign(total, {});

  cli_detail::parallel_for(total, threads, [&](std::int64_t index) {
    cli_detail::NumericParams point = fixed;
    std::vector<double> row;
    std::int64_t rem = index;
    for (std::size_t a = axes.size(); a-- > 0;) {
      const std::int64_t steps = axes[a].count;
      const double v = axis_values[a][rem % steps];
      rem /= steps;
      point[axes[a].name] = v;
    }
    for (std::size_t a = 0; a < axes.size(); ++a) row.push_back(point[axes[a].name]);
    const cli_detail::QuantityOutput out = cli_detail::evaluate_quantity(
        quantity, point, text_params, mix_seed(config.seed, static_cast<std::uint64_t>(index)));
    row.insert(row.end(), out.values.begin(), out.values.end());
    table.rows[index] = std::move(row);
  });
  return table;
}

/// Scan entry point: computes the table and writes data + metadata sidecar.
inline void run_scan(const RunConfig& config) {
  std::map<std::string, std::string> effective;
  const Table table = run_scan_table(config, &effective);
  const std::string payload =
      config.format == OutputFormat::csv ? table_to_csv(table) : table_to_json(table);
  write_text_file(config.output_path, payload);
  write_meta_sidecar(config.output_path, config.command, effective, config.seed,
                     config.format);
}

}  // namespace gcoh
