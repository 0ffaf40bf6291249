#pragma once

#include <fstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fkpp/common.hpp"

namespace fkpp::io {

using Json = nlohmann::ordered_json;

/// Creates the directory (and parents) if missing.
void ensure_dir(const std::string& dir);

std::string join_path(const std::string& dir, const std::string& name);

/// Streaming CSV writer: fixed header, 17-significant-digit values, one
/// row per record.  Output is byte-stable for identical inputs.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<double>& values);
  void close();
  const std::string& path() const { return path_; }

 private:
  std::ofstream out_;
  std::string path_;
  std::size_t n_cols_;
};

/// One-shot CSV convenience for small tables.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Serializes checks as [{name, stat, tol, pass}, ...] — the shape every
/// report embeds.
Json checks_to_json(const std::vector<CheckResult>& checks);

/// Writes JSON with 2-space indentation and a trailing newline.
void write_json(const std::string& path, const Json& j);

/// Lowercase hex SHA-256 digests.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::string& path);

struct RunManifest {
  std::string tool_version;
  std::vector<std::pair<std::string, std::string>> config_echo;
  std::string input_hash;  // hash of the canonical config echo
  std::vector<std::pair<std::string, std::string>> outputs;  // path -> sha256
  std::vector<std::pair<std::string, double>> timings;       // phase -> seconds
};

/// Canonical hash of a resolved config echo; the manifest's input_hash.
std::string config_echo_hash(
    const std::vector<std::pair<std::string, std::string>>& echo);

/// Writes the manifest; callers emit it after every other output so the
/// recorded hashes cover final file contents.
void write_manifest(const std::string& path, const RunManifest& manifest);

struct PlotSeries {
  std::string label;
  std::string color = "#1f77b4";
  bool dashed = false;
  std::vector<std::pair<double, double>> points;
};

/// Minimal deterministic SVG line plot: framed axes, ticks, legend, one
/// polyline per series.
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series);

}  // namespace fkpp::io
