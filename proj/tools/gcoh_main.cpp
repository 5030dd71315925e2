// gcoh: data generation for Gaussian conditional-coherence studies.
//
// Subcommands:
//   gcoh figure <1-9> [--seed N] [--out PATH] [--format csv|json] [flags...]
//   gcoh scan --quantity NAME [--grid name=lo:hi:count ...] [--fix name=value ...]
//
// Exit codes: 0 success, 2 invalid arguments, 3 numerical failure, 4 I/O failure.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gcoh/figures.hpp"
#include "gcoh/scan.hpp"

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("GCOH_DEFAULT_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "gcoh: GCOH_DEFAULT_SEED is not a decimal integer: " << env << "\n";
      std::exit(2);
    }
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-state coherence toolkit: conditional states, coherence "
               "monotones, monitored steady states"};
  app.require_subcommand(1);

  gcoh::RunConfig config;
  config.seed = default_seed();
  std::string format = "csv";
  bool seed_given = false;
  std::uint64_t seed_flag = 0;

  // figure subcommand ------------------------------------------------------
  auto* fig = app.add_subcommand("figure", "emit the data file behind one figure (1-9)");
  int figure_id = 0;
  fig->add_option("id", figure_id, "figure number")->required()->check(CLI::Range(1, 9));
  // Figure-specific knobs; unused ones are ignored by the selected figure.
  std::map<std::string, std::string> fig_params;
  const std::vector<std::string> numeric_keys = {
      "samples",  "r",        "N",       "N2",      "N-min",    "N-max",
      "N-steps",  "rm",       "rm-min",  "rm-max",  "rm-steps", "a-min",
      "a-max",    "b-min",    "b-max",   "c-steps", "chi-min",  "chi-max",
      "chi-steps", "NB",      "NC",      "NA-max",  "NA-steps", "theta-steps",
      "target-tail"};
  std::map<std::string, std::string> staged;
  for (const auto& key : numeric_keys)
    fig->add_option_function<double>(
        "--" + key,
        [&staged, key](const double& v) { staged[key] = gcoh::format_double(v); },
        "figure parameter " + key);
  for (const std::string key : {"panel", "family", "measure", "a-list", "r-out-list",
                                "theta-list"})
    fig->add_option_function<std::string>(
        "--" + key, [&staged, key](const std::string& v) { staged[key] = v; },
        "figure parameter " + key);

  // scan subcommand --------------------------------------------------------
  auto* scan = app.add_subcommand("scan", "Cartesian sweep of a named quantity");
  std::string quantity;
  std::vector<std::string> grids, fixes;
  int parallel = 1;
  scan->add_option("--quantity", quantity, "quantity name")->required();
  scan->add_option("--grid", grids, "swept axis, name=lo:hi:count (up to 3)");
  scan->add_option("--fix", fixes, "fixed parameter, name=value");
  scan->add_option("--parallel", parallel, "worker threads");

  for (auto* sub : {fig, scan}) {
    sub->add_option("--out", config.output_path, "output path");
    sub->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& v) { seed_flag = v; seed_given = true; },
        "RNG seed (fallback: GCOH_DEFAULT_SEED, then 1)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // --help/--version exit 0; any parse failure is 2
  }

  if (seed_given) config.seed = seed_flag;
  config.format = format == "json" ? gcoh::OutputFormat::json : gcoh::OutputFormat::csv;

  try {
    if (fig->parsed()) {
      config.command = "figure " + std::to_string(figure_id);
      config.parameters = staged;
      if (config.output_path.empty())
        config.output_path = "fig" + std::to_string(figure_id) +
                             (config.format == gcoh::OutputFormat::csv ? ".csv" : ".json");
      gcoh::run_figure(figure_id, config);
    } else {
      config.command = "scan " + quantity;
      config.parameters["quantity"] = quantity;
      config.parameters["parallel"] = std::to_string(parallel);
      for (const auto& g : grids) {
        const std::size_t eq = g.find('=');
        if (eq == std::string::npos) {
          std::cerr << "gcoh: bad --grid spec: " << g << "\n";
          return 2;
        }
        config.parameters["grid:" + g.substr(0, eq)] = g.substr(eq + 1);
      }
      for (const auto& f : fixes) {
        const std::size_t eq = f.find('=');
        if (eq == std::string::npos) {
          std::cerr << "gcoh: bad --fix spec: " << f << "\n";
          return 2;
        }
        config.parameters["fix:" + f.substr(0, eq)] = f.substr(eq + 1);
      }
      if (config.output_path.empty())
        config.output_path =
            "scan" + std::string(config.format == gcoh::OutputFormat::csv ? ".csv" : ".json");
      gcoh::run_scan(config);
    }
  } catch (const gcoh::io_error& e) {
    std::cerr << "gcoh: I/O error: " << e.what() << "\n";
    return 4;
  } catch (const gcoh::unsupported_error& e) {
    std::cerr << "gcoh: invalid request: " << e.what() << "\n";
    return 2;
  } catch (const gcoh::dimension_error& e) {
    std::cerr << "gcoh: invalid request: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {  // validity, convergence: numerical failures
    std::cerr << "gcoh: numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
