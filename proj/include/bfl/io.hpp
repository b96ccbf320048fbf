#pragma once

// Output plumbing for the CLI: locale-independent CSV, run manifests with
// checksums, and a minimal self-contained SVG chart emitter.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bfl {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Locale-independent decimal with 12 significant digits.
inline std::string format_number(double v) {
  char buf[40];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

inline std::string format_number(std::uint64_t v) { return std::to_string(v); }
inline std::string format_number(long v) { return std::to_string(v); }

/// CSV table accumulated in memory and written atomically (temp + rename).
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header)
      : header_(std::move(header)) {}

  template <class... Ts>
  void row(const Ts&... fields) {
    std::ostringstream os;
    bool first = true;
    ((os << (first ? "" : ","), first = false, os << as_field(fields)), ...);
    rows_.push_back(os.str());
  }

  std::string content() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < header_.size(); ++i)
      os << (i ? "," : "") << header_[i];
    os << "\n";
    for (const auto& r : rows_) os << r << "\n";
    return os.str();
  }

 private:
  static std::string as_field(const std::string& s) { return s; }
  static std::string as_field(const char* s) { return s; }
  static std::string as_field(double v) { return format_number(v); }
  static std::string as_field(std::uint64_t v) { return std::to_string(v); }
  static std::string as_field(long v) { return std::to_string(v); }
  static std::string as_field(int v) { return std::to_string(v); }

  std::vector<std::string> header_;
  std::vector<std::string> rows_;
};

inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("rename failed: " + path.string());
}

/// FNV-1a 64-bit, used for manifest file checksums.
inline std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf);
}

// ---------------------------------------------------------------------------
// Minimal SVG line/scatter chart. One series = named list of (x, y) points.
// Log axes supported; no external plotting dependency.

struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

struct PlotSpec {
  std::string title, xlabel, ylabel;
  bool log_x = false, log_y = false;
  std::vector<PlotSeries> series;
};

inline std::string render_svg(const PlotSpec& spec) {
  const double width = 720, height = 480;
  const double ml = 70, mr = 150, mt = 40, mb = 55;
  const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                           "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  const auto tx = [&](double x) { return spec.log_x ? std::log10(x) : x; };
  const auto ty = [&](double y) { return spec.log_y ? std::log10(y) : y; };
  for (const auto& s : spec.series)
    for (const auto& [x, y] : s.points) {
      xmin = std::min(xmin, tx(x));
      xmax = std::max(xmax, tx(x));
      ymin = std::min(ymin, ty(y));
      ymax = std::max(ymax, ty(y));
    }
  if (xmin > xmax) {
    xmin = 0;
    xmax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymin > ymax) {
    ymin = 0;
    ymax = 1;
  }
  if (ymax == ymin) ymax = ymin + 1;
  const double padx = 0.04 * (xmax - xmin), pady = 0.06 * (ymax - ymin);
  xmin -= padx;
  xmax += padx;
  ymin -= pady;
  ymax += pady;

  const auto px = [&](double x) {
    return ml + (tx(x) - xmin) / (xmax - xmin) * (width - ml - mr);
  };
  const auto py = [&](double y) {
    return height - mb - (ty(y) - ymin) / (ymax - ymin) * (height - mt - mb);
  };

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
      << "' height='" << height << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n"
      << "<text x='" << (ml + (width - ml - mr) / 2) << "' y='22' "
      << "text-anchor='middle' font-size='15'>" << spec.title << "</text>\n";

  // axes
  svg << "<line x1='" << ml << "' y1='" << (height - mb) << "' x2='"
      << (width - mr) << "' y2='" << (height - mb)
      << "' stroke='black'/>\n<line x1='" << ml << "' y1='" << mt << "' x2='"
      << ml << "' y2='" << (height - mb) << "' stroke='black'/>\n";
  svg << "<text x='" << (ml + (width - ml - mr) / 2) << "' y='"
      << (height - 12) << "' text-anchor='middle' font-size='12'>"
      << spec.xlabel << (spec.log_x ? " (log)" : "") << "</text>\n";
  svg << "<text x='16' y='" << (mt + (height - mt - mb) / 2)
      << "' font-size='12' text-anchor='middle' transform='rotate(-90 16 "
      << (mt + (height - mt - mb) / 2) << ")'>" << spec.ylabel
      << (spec.log_y ? " (log)" : "") << "</text>\n";

  // ticks: 5 per axis in transformed coordinates
  for (int i = 0; i <= 4; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 4.0;
    const double fy = ymin + (ymax - ymin) * i / 4.0;
    const double vx = spec.log_x ? std::pow(10.0, fx) : fx;
    const double vy = spec.log_y ? std::pow(10.0, fy) : fy;
    const double sx = ml + (fx - xmin) / (xmax - xmin) * (width - ml - mr);
    const double sy =
        height - mb - (fy - ymin) / (ymax - ymin) * (height - mt - mb);
    svg << "<line x1='" << sx << "' y1='" << (height - mb) << "' x2='" << sx
        << "' y2='" << (height - mb + 5) << "' stroke='black'/>"
        << "<text x='" << sx << "' y='" << (height - mb + 18)
        << "' text-anchor='middle' font-size='10'>" << format_number(vx)
        << "</text>\n";
    svg << "<line x1='" << (ml - 5) << "' y1='" << sy << "' x2='" << ml
        << "' y2='" << sy << "' stroke='black'/>"
        << "<text x='" << (ml - 8) << "' y='" << (sy + 3)
        << "' text-anchor='end' font-size='10'>" << format_number(vy)
        << "</text>\n";
  }

  for (std::size_t s = 0; s < spec.series.size(); ++s) {
    const char* color = palette[s % 8];
    const auto& pts = spec.series[s].points;
    if (pts.size() > 1) {
      svg << "<polyline fill='none' stroke='" << color
          << "' stroke-width='1.5' points='";
      for (const auto& [x, y] : pts) svg << px(x) << "," << py(y) << " ";
      svg << "'/>\n";
    }
    for (const auto& [x, y] : pts)
      svg << "<circle cx='" << px(x) << "' cy='" << py(y)
          << "' r='3' fill='" << color << "'/>\n";
    svg << "<text x='" << (width - mr + 10) << "' y='" << (mt + 16 * s + 10)
        << "' font-size='11' fill='" << color << "'>" << spec.series[s].name
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace bfl
