#include "msci/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "msci/error.hpp"

namespace msci::plot {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  // Avoid "-0.00".
  if (std::string_view(buf) == "-0.00") return "0.00";
  return buf;
}

std::string tick_label(double v, double step) {
  char buf[32];
  const int decimals = step >= 1.0 ? 0 : static_cast<int>(std::ceil(-std::log10(step)));
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s = buf;
  if (s.find_first_not_of("-0.") == std::string::npos) s = "0";
  return s;
}

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  return (r < 1.5 ? 1.0 : r < 3.0 ? 2.0 : r < 7.0 ? 5.0 : 10.0) * mag;
}

struct Axis {
  double lo, hi;
  void pad() {
    if (hi <= lo) {
      const double d = std::max(std::abs(lo) * 0.1, 1.0);
      lo -= d;
      hi += d;
    } else {
      const double d = 0.05 * (hi - lo);
      lo -= d;
      hi += d;
    }
  }
};

}  // namespace

std::string render_svg(const Dataset& d, const ModelSpec* spec, std::span<const double> params,
                       const analyze::IntervalBand* band, const Figure& fig) {
  if (d.empty()) throw Error("plot: empty dataset");
  const auto xs = d.xs();
  const auto ys = d.ys();
  Axis ax{*std::min_element(xs.begin(), xs.end()), *std::max_element(xs.begin(), xs.end())};
  Axis ay{*std::min_element(ys.begin(), ys.end()), *std::max_element(ys.begin(), ys.end())};
  const double data_xlo = ax.lo, data_xhi = ax.hi;

  std::vector<std::pair<double, double>> curve;
  if (spec) {
    const std::size_t m = std::max<std::size_t>(fig.curve_samples, 2);
    for (std::size_t i = 0; i < m; ++i) {
      const double x = data_xlo + (data_xhi - data_xlo) * static_cast<double>(i) / static_cast<double>(m - 1);
      const double y = evaluate(*spec, params, x);
      curve.emplace_back(x, y);
      if (std::isfinite(y)) {
        ay.lo = std::min(ay.lo, y);
        ay.hi = std::max(ay.hi, y);
      }
    }
  }
  if (band) {
    for (std::size_t i = 0; i < band->x.size(); ++i) {
      if (std::isfinite(band->lower[i])) ay.lo = std::min(ay.lo, band->lower[i]);
      if (std::isfinite(band->upper[i])) ay.hi = std::max(ay.hi, band->upper[i]);
    }
  }
  ax.pad();
  ay.pad();

  const double left = 70, right = 160, top = 40, bottom = 55;
  const double pw = fig.width - left - right;
  const double ph = fig.height - top - bottom;
  auto px = [&](double x) { return left + (x - ax.lo) / (ax.hi - ax.lo) * pw; };
  auto py = [&](double y) { return top + (1.0 - (y - ay.lo) / (ay.hi - ay.lo)) * ph; };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fig.width << "\" height=\""
    << fig.height << "\" viewBox=\"0 0 " << fig.width << ' ' << fig.height << "\">\n";
  o << "<rect x=\"0\" y=\"0\" width=\"" << fig.width << "\" height=\"" << fig.height << "\" fill=\"white\"/>\n";
  if (!fig.title.empty()) {
    o << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"15\">" << escape(fig.title) << "</text>\n";
  }

  // Axes and ticks.
  o << "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n";
  o << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(left + pw) << "\" y2=\""
    << fmt(top + ph) << "\"/>\n";
  o << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(left) << "\" y2=\""
    << fmt(top + ph) << "\"/>\n";
  o << "</g>\n<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
  const double sx = nice_step(ax.hi - ax.lo, 8);
  for (double t = std::ceil(ax.lo / sx) * sx; t <= ax.hi + 1e-9 * sx; t += sx) {
    o << "<line x1=\"" << fmt(px(t)) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(px(t)) << "\" y2=\""
      << fmt(top + ph + 5) << "\" stroke=\"black\"/>";
    o << "<text x=\"" << fmt(px(t)) << "\" y=\"" << fmt(top + ph + 18) << "\" text-anchor=\"middle\">"
      << tick_label(t, sx) << "</text>\n";
  }
  const double sy = nice_step(ay.hi - ay.lo, 6);
  for (double t = std::ceil(ay.lo / sy) * sy; t <= ay.hi + 1e-9 * sy; t += sy) {
    o << "<line x1=\"" << fmt(left - 5) << "\" y1=\"" << fmt(py(t)) << "\" x2=\"" << fmt(left) << "\" y2=\""
      << fmt(py(t)) << "\" stroke=\"black\"/>";
    o << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(py(t) + 4) << "\" text-anchor=\"end\">"
      << tick_label(t, sy) << "</text>\n";
  }
  o << "</g>\n";
  o << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(fig.height - 12.0)
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape(fig.x_label) << "</text>\n";
  o << "<text x=\"18\" y=\"" << fmt(top + ph / 2) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
    << "font-size=\"13\" transform=\"rotate(-90 18 " << fmt(top + ph / 2) << ")\">" << escape(fig.y_label)
    << "</text>\n";

  if (band && !band->x.empty()) {
    o << "<polygon class=\"band\" fill=\"#999999\" fill-opacity=\"0.25\" stroke=\"none\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < band->x.size(); ++i) {
      if (!std::isfinite(band->upper[i])) continue;
      o << (first ? "" : " ") << fmt(px(band->x[i])) << ',' << fmt(py(band->upper[i]));
      first = false;
    }
    for (std::size_t i = band->x.size(); i-- > 0;) {
      if (!std::isfinite(band->lower[i])) continue;
      o << ' ' << fmt(px(band->x[i])) << ',' << fmt(py(band->lower[i]));
    }
    o << "\"/>\n";
  }

  // Scatter, colored per study in study-id order.
  std::map<std::string, std::size_t> color_of;
  for (const auto& [id, meta] : d.studies()) color_of.emplace(id, color_of.size());
  o << "<g class=\"points\" stroke=\"none\">\n";
  for (const auto& p : d.points()) {
    o << "<circle cx=\"" << fmt(px(p.x)) << "\" cy=\"" << fmt(py(p.y)) << "\" r=\"3\" fill=\""
      << kPalette[color_of[p.study_id] % std::size(kPalette)] << "\" fill-opacity=\"0.8\"/>\n";
  }
  o << "</g>\n";

  if (spec) {
    o << "<path class=\"curve\" fill=\"none\" stroke=\"black\" stroke-width=\"2\" d=\"";
    bool pen_down = false;
    for (const auto& [x, y] : curve) {
      if (!std::isfinite(y)) {
        pen_down = false;
        continue;
      }
      o << (pen_down ? " L" : " M") << fmt(px(x)) << ',' << fmt(py(std::clamp(y, ay.lo, ay.hi)));
      pen_down = true;
    }
    o << "\"/>\n";
  }

  // Legend.
  o << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"11\">\n";
  double ly = top + 10;
  for (const auto& [id, idx] : color_of) {
    const auto& meta = d.studies().at(id);
    std::string label = meta.first_author.empty() ? id : meta.first_author + " " + std::to_string(meta.year);
    o << "<rect x=\"" << fmt(left + pw + 15) << "\" y=\"" << fmt(ly - 8) << "\" width=\"10\" height=\"10\" fill=\""
      << kPalette[idx % std::size(kPalette)] << "\"/>";
    o << "<text x=\"" << fmt(left + pw + 30) << "\" y=\"" << fmt(ly + 1) << "\">" << escape(label) << " (n="
      << meta.n_observations << ")</text>\n";
    ly += 16;
  }
  o << "</g>\n</svg>\n";
  return o.str();
}

}  // namespace msci::plot
