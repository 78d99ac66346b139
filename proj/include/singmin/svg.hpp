#ifndef SINGMIN_SVG_HPP
#define SINGMIN_SVG_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "singmin/field.hpp"

namespace singmin {

namespace detail {

/// Linear blue -> yellow -> red ramp for t in [0, 1].
inline std::string ramp_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  double r, g, b;
  if (t < 0.5) {
    const double s = 2.0 * t;
    r = 40 + s * (250 - 40);
    g = 60 + s * (220 - 60);
    b = 200 - s * (200 - 60);
  } else {
    const double s = 2.0 * (t - 0.5);
    r = 250 - s * (250 - 200);
    g = 220 - s * 220;
    b = 60 - s * 30;
  }
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(r), static_cast<int>(g), static_cast<int>(b));
  return buf;
}

inline std::string xml_escape(const std::string& in) {
  std::string out;
  for (char c : in) {
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

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace detail

/// Heatmap of the non-exterior nodes with a min/max legend.
inline std::string svg_heatmap(const ScalarField& f, const std::string& title = {}) {
  const GridDomain& d = f.domain();
  double lo = INFINITY, hi = -INFINITY;
  for (int n = 0; n < d.node_count(); ++n) {
    if (d.kind(n) == NodeKind::exterior) continue;
    lo = std::min(lo, f[n]);
    hi = std::max(hi, f[n]);
  }
  if (!std::isfinite(lo)) lo = hi = 0.0;
  const double span = hi > lo ? hi - lo : 1.0;
  const int cell = std::max(1, std::min(8, 512 / std::max(d.nx(), d.ny())));
  const int W = d.nx() * cell, H = d.ny() * cell;
  const int legend = 90;
  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(W + legend) + "\" height=\"" +
       std::to_string(H + 30) + "\" viewBox=\"0 0 " + std::to_string(W + legend) + " " + std::to_string(H + 30) +
       "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) s += "<text x=\"4\" y=\"16\" font-size=\"12\" font-family=\"sans-serif\">" + detail::xml_escape(title) + "</text>\n";
  s += "<g transform=\"translate(0,24)\" shape-rendering=\"crispEdges\">\n";
  for (int n = 0; n < d.node_count(); ++n) {
    if (d.kind(n) == NodeKind::exterior) continue;
    const int x = d.ix_of(n) * cell;
    const int y = (d.ny() - 1 - d.iy_of(n)) * cell;  // +y up
    s += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" + std::to_string(cell) +
         "\" height=\"" + std::to_string(cell) + "\" fill=\"" + detail::ramp_color((f[n] - lo) / span) + "\"/>\n";
  }
  s += "</g>\n";
  // legend: gradient bar with max on top, min at the bottom
  const int lx = W + 20, ly = 24, lh = std::max(60, H - 20);
  s += "<defs><linearGradient id=\"ramp\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">";
  for (int k = 0; k <= 4; ++k)
    s += "<stop offset=\"" + detail::fmt(k / 4.0) + "\" stop-color=\"" + detail::ramp_color(k / 4.0) + "\"/>";
  s += "</linearGradient></defs>\n";
  s += "<rect x=\"" + std::to_string(lx) + "\" y=\"" + std::to_string(ly + 10) + "\" width=\"16\" height=\"" +
       std::to_string(lh - 20) + "\" fill=\"url(#ramp)\" stroke=\"black\"/>\n";
  s += "<text x=\"" + std::to_string(lx) + "\" y=\"" + std::to_string(ly + 6) +
       "\" font-size=\"10\" font-family=\"sans-serif\">max " + detail::fmt(hi) + "</text>\n";
  s += "<text x=\"" + std::to_string(lx) + "\" y=\"" + std::to_string(ly + lh + 2) +
       "\" font-size=\"10\" font-family=\"sans-serif\">min " + detail::fmt(lo) + "</text>\n";
  s += "</svg>\n";
  return s;
}

}  // namespace singmin

#endif  // SINGMIN_SVG_HPP
