#include "blowup/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace blowup::svg {

namespace {

constexpr double kWidth = 640.0, kHeight = 420.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 40.0, kBottom = 50.0;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(hi > lo)) {
      const double w = lo == 0.0 ? 1.0 : 0.05 * std::abs(lo);
      lo -= w;
      hi += w;
    }
  }
};

}  // namespace

bool write_plot(const std::filesystem::path& path, const Plot& plot, const std::string& hash) noexcept {
  try {
    auto tx = [&](double v) { return plot.log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return plot.log_y ? std::log10(v) : v; };
    auto usable = [&](double x, double y) {
      return std::isfinite(x) && std::isfinite(y) && (!plot.log_x || x > 0.0) && (!plot.log_y || y > 0.0);
    };
    Range rx, ry;
    for (const Series& s : plot.series) {
      for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
        if (!usable(s.x[i], s.y[i])) continue;
        rx.add(tx(s.x[i]));
        ry.add(ty(s.y[i]));
      }
    }
    if (!std::isfinite(rx.lo)) return false;
    rx.pad();
    ry.pad();
    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto px = [&](double v) { return kLeft + (tx(v) - rx.lo) / (rx.hi - rx.lo) * pw; };
    auto py = [&](double v) { return kTop + (ry.hi - ty(v)) / (ry.hi - ry.lo) * ph; };
    auto label = [&](double v, bool log) { return log ? "1e" + num(v) : num(v); };

    std::ofstream out(path, std::ios::trunc);
    if (!out) return false;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<!-- config_hash=" << hash << " -->\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(plot.title)
        << "</text>\n";
    out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
      const double fx = rx.lo + (rx.hi - rx.lo) * k / 4.0;
      const double fy = ry.lo + (ry.hi - ry.lo) * k / 4.0;
      const double gx = kLeft + pw * k / 4.0, gy = kTop + ph * (1.0 - k / 4.0);
      out << "<text x=\"" << gx << "\" y=\"" << kTop + ph + 16 << "\" text-anchor=\"middle\">" << label(fx, plot.log_x)
          << "</text>\n";
      out << "<text x=\"" << kLeft - 6 << "\" y=\"" << gy + 4 << "\" text-anchor=\"end\">" << label(fy, plot.log_y)
          << "</text>\n";
    }
    out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">"
        << escape(plot.xlabel) << "</text>\n";
    out << "<text x=\"16\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << kTop + ph / 2 << ")\">" << escape(plot.ylabel) << "</text>\n";

    for (std::size_t k = 0; k < plot.series.size(); ++k) {
      const Series& s = plot.series[k];
      const char* color = kColors[k % std::size(kColors)];
      std::string pts;
      for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
        if (!usable(s.x[i], s.y[i])) continue;
        if (s.points) {
          out << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i])) << "\" r=\"2.5\" fill=\"" << color
              << "\"/>\n";
        } else {
          pts += num(px(s.x[i])) + "," + num(py(s.y[i])) + " ";
        }
      }
      if (!pts.empty()) out << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"" << pts << "\"/>\n";
      out << "<text x=\"" << kLeft + 8 << "\" y=\"" << kTop + 16 + 14 * k << "\" fill=\"" << color << "\">"
          << escape(s.name) << "</text>\n";
    }
    out << "</svg>\n";
    return static_cast<bool>(out);
  } catch (...) {
    return false;
  }
}

}  // namespace blowup::svg
