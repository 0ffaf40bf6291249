#include "fkpp/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include <openssl/evp.h>

namespace fkpp::io {
namespace {

[[noreturn]] void io_fail(const std::string& path, const char* what) {
  std::ostringstream msg;
  msg << what << " \"" << path << "\"";
  throw RunAborted(msg.str());
}

std::string format_g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) io_fail(dir, "cannot create directory");
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& header)
    : out_(path, std::ios::binary), path_(path), n_cols_(header.size()) {
  if (!out_) io_fail(path, "cannot open for writing");
  if (header.empty()) throw InvalidArgument("CSV header must not be empty");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ << ',';
    out_ << header[i];
  }
  out_ << '\n';
}

CsvWriter::~CsvWriter() {
  try {
    close();
  } catch (...) {
  }
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != n_cols_)
    throw InvalidArgument("CSV row width does not match the header");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out_ << ',';
    out_ << format_g17(values[i]);
  }
  out_ << '\n';
  if (!out_) io_fail(path_, "write failed for");
}

void CsvWriter::close() {
  if (out_.is_open()) {
    out_.flush();
    if (!out_) io_fail(path_, "write failed for");
    out_.close();
  }
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  CsvWriter w(path, header);
  for (const auto& r : rows) w.row(r);
  w.close();
}

Json checks_to_json(const std::vector<CheckResult>& checks) {
  Json arr = Json::array();
  for (const auto& c : checks) {
    Json item;
    item["name"] = c.name;
    item["stat"] = c.stat;
    item["tol"] = c.tol;
    item["pass"] = c.pass;
    arr.push_back(std::move(item));
  }
  return arr;
}

void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) io_fail(path, "cannot open for writing");
  out << j.dump(2) << '\n';
  if (!out) io_fail(path, "write failed for");
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw RunAborted("SHA-256 digest failed");
  }
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail(path, "cannot open for hashing");
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

std::string config_echo_hash(
    const std::vector<std::pair<std::string, std::string>>& echo) {
  std::string canon;
  for (const auto& [k, v] : echo) {
    canon += k;
    canon += '=';
    canon += v;
    canon += '\n';
  }
  return sha256_hex(canon);
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
  Json j;
  j["tool_version"] = manifest.tool_version;
  Json cfg = Json::object();
  for (const auto& [k, v] : manifest.config_echo) cfg[k] = v;
  j["config"] = std::move(cfg);
  j["input_hash"] = manifest.input_hash;
  Json outs = Json::array();
  for (const auto& [p, h] : manifest.outputs) {
    Json o;
    o["path"] = p;
    o["sha256"] = h;
    outs.push_back(std::move(o));
  }
  j["outputs"] = std::move(outs);
  Json times = Json::object();
  for (const auto& [phase, sec] : manifest.timings) times[phase] = sec;
  j["timings"] = std::move(times);
  write_json(path, j);
}

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series) {
  const double width = 720, height = 480;
  const double ml = 80, mr = 24, mt = 48, mb = 56;
  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  bool have = false;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (!have) {
        x_min = x_max = x;
        y_min = y_max = y;
        have = true;
      } else {
        x_min = std::min(x_min, x);
        x_max = std::max(x_max, x);
        y_min = std::min(y_min, y);
        y_max = std::max(y_max, y);
      }
    }
  if (x_max - x_min < 1e-300) x_max = x_min + 1.0;
  if (y_max - y_min < 1e-300) y_max = y_min + 1.0;
  double x_pad = 0.04 * (x_max - x_min), y_pad = 0.06 * (y_max - y_min);
  x_min -= x_pad;
  x_max += x_pad;
  y_min -= y_pad;
  y_max += y_pad;
  auto px = [&](double x) {
    return ml + (x - x_min) / (x_max - x_min) * (width - ml - mr);
  };
  auto py = [&](double y) {
    return height - mb - (y - y_min) / (y_max - y_min) * (height - mt - mb);
  };

  std::ofstream out(path, std::ios::binary);
  if (!out) io_fail(path, "cannot open for writing");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"" << mt - 18
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">"
      << title << "</text>\n";

  const int n_ticks = 5;
  for (int i = 0; i <= n_ticks; ++i) {
    double fx = x_min + (x_max - x_min) * i / n_ticks;
    double fy = y_min + (y_max - y_min) * i / n_ticks;
    double gx = px(fx), gy = py(fy);
    out << "<line x1=\"" << format_g6(gx) << "\" y1=\"" << py(y_min)
        << "\" x2=\"" << format_g6(gx) << "\" y2=\"" << py(y_max)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << px(x_min) << "\" y1=\"" << format_g6(gy)
        << "\" x2=\"" << px(x_max) << "\" y2=\"" << format_g6(gy)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << format_g6(gx) << "\" y=\"" << height - mb + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << format_g6(fx) << "</text>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << format_g6(gy + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << format_g6(fy) << "</text>\n";
  }
  out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\""
      << width - ml - mr << "\" height=\"" << height - mt - mb
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">"
      << x_label << "</text>\n";
  out << "<text x=\"18\" y=\"" << height / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 18 "
      << height / 2 << ")\">" << y_label << "</text>\n";

  for (const auto& s : series) {
    if (s.points.empty()) continue;
    out << "<polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"1.5\"";
    if (s.dashed) out << " stroke-dasharray=\"6 4\"";
    out << " points=\"";
    for (const auto& [x, y] : s.points)
      out << format_g6(px(x)) << ',' << format_g6(py(y)) << ' ';
    out << "\"/>\n";
  }
  double ly = mt + 16;
  for (const auto& s : series) {
    out << "<line x1=\"" << width - mr - 150 << "\" y1=\"" << ly
        << "\" x2=\"" << width - mr - 120 << "\" y2=\"" << ly
        << "\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
    if (s.dashed) out << " stroke-dasharray=\"6 4\"";
    out << "/>\n";
    out << "<text x=\"" << width - mr - 114 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label
        << "</text>\n";
    ly += 16;
  }
  out << "</svg>\n";
  if (!out) io_fail(path, "write failed for");
}

}  // namespace fkpp::io
