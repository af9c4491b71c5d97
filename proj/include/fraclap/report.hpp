#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fraclap/rng.hpp"
#include "fraclap/space.hpp"

namespace fraclap {

// Report emission. Every artifact embeds the hash of the run configuration
// and the seed, and doubles are printed with "%.17g" so identical configs
// produce byte-identical files.

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct RunStamp {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;

  static RunStamp make(const std::string& canonical_config,
                       std::uint64_t seed) {
    RunStamp st;
    st.config_hash = fnv1a64(canonical_config.data(), canonical_config.size());
    st.seed = seed;
    return st;
  }
};

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const RunStamp& stamp,
            const std::vector<std::string>& columns)
      : out_(path) {
    if (!out_) throw IoError("cannot open " + path + " for writing");
    out_ << "# config_hash=" << stamp.config_hash << " seed=" << stamp.seed
         << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
      out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

inline void write_json(const std::string& path, nlohmann::json j,
                       const RunStamp& stamp) {
  j["config_hash"] = stamp.config_hash;
  j["seed"] = stamp.seed;
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

// Minimal standalone scatter plot on log-log axes.
inline void write_svg_scatter(const std::string& path, const RunStamp& stamp,
                              const std::vector<double>& xs,
                              const std::vector<double>& ys,
                              const std::string& xlabel,
                              const std::string& ylabel) {
  if (xs.size() != ys.size())
    throw ValidationError("svg scatter: length mismatch");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  const int W = 640, H = 480, M = 60;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) continue;
    double lx = std::log10(xs[i]), ly = std::log10(ys[i]);
    pts.emplace_back(lx, ly);
    xmin = std::min(xmin, lx); xmax = std::max(xmax, lx);
    ymin = std::min(ymin, ly); ymax = std::max(ymax, ly);
  }
  if (pts.empty()) { xmin = xmax = ymin = ymax = 0.0; }
  if (xmax - xmin < 1e-12) { xmax += 0.5; xmin -= 0.5; }
  if (ymax - ymin < 1e-12) { ymax += 0.5; ymin -= 0.5; }
  auto px = [&](double lx) {
    return M + (lx - xmin) / (xmax - xmin) * (W - 2 * M);
  };
  auto py = [&](double ly) {
    return H - M - (ly - ymin) / (ymax - ymin) * (H - 2 * M);
  };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\">\n";
  out << "<!-- config_hash=" << stamp.config_hash << " seed=" << stamp.seed
      << " -->\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << M << "\" y1=\"" << H - M << "\" x2=\"" << W - M
      << "\" y2=\"" << H - M << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << M << "\" y1=\"" << M << "\" x2=\"" << M
      << "\" y2=\"" << H - M << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"" << H - 15
      << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel
      << " (log10)</text>\n";
  out << "<text x=\"18\" y=\"" << H / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
      << H / 2 << ")\">" << ylabel << " (log10)</text>\n";
  for (auto [lx, ly] : pts)
    out << "<circle cx=\"" << format_double(px(lx)) << "\" cy=\""
        << format_double(py(ly)) << "\" r=\"2.5\" fill=\"steelblue\"/>\n";
  out << "</svg>\n";
}

}  // namespace fraclap
