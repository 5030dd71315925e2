#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "gcoh/errors.hpp"
#include "json.hpp"

#ifndef GCOH_VERSION
#define GCOH_VERSION "dev"
#endif

namespace gcoh {

enum class OutputFormat { csv, json };

/// Numeric table with named columns; the unit all outputs are built from.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row) { rows.push_back(std::move(row)); }
};

/// 17 significant digits, '.' decimal separator (C locale formatting).
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// RFC 4180 CSV: CRLF record separators, header row first.
inline std::string table_to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += ',';
    out += t.columns[i];
  }
  out += "\r\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += "\r\n";
  }
  return out;
}

inline std::string table_to_json(const Table& t) {
  std::string out = "[";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out += (r == 0) ? "\n" : ",\n";
    out += "  {";
    for (std::size_t i = 0; i < t.rows[r].size(); ++i) {
      if (i) out += ", ";
      out += '"' + t.columns[i] + "\": " + format_double(t.rows[r][i]);
    }
    out += '}';
  }
  out += "\n]\n";
  return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open for writing: " + path);
  f << content;
  if (!f) throw io_error("write failed: " + path);
}

/// Metadata sidecar <out>.meta.json: command, effective parameters, seed,
/// format and tool version. Deterministic content so re-runs are
/// byte-identical.
inline void write_meta_sidecar(const std::string& out_path, const std::string& command,
                               const std::map<std::string, std::string>& parameters,
                               std::uint64_t seed, OutputFormat format) {
  nlohmann::ordered_json meta;
  meta["command"] = command;
  meta["format"] = format == OutputFormat::csv ? "csv" : "json";
  meta["parameters"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : parameters) meta["parameters"][key] = value;
  meta["seed"] = seed;
  meta["tool_version"] = GCOH_VERSION;
  write_text_file(out_path + ".meta.json", meta.dump(2) + "\n");
}

}  // namespace gcoh
