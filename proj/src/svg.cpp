#include "csivc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace csivc::svg {

namespace {

constexpr double panel_w = 420.0;
constexpr double panel_h = 320.0;
constexpr double margin_l = 60.0;
constexpr double margin_r = 20.0;
constexpr double margin_t = 40.0;
constexpr double margin_b = 50.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;  // data range
  double left, top;       // pixel origin of the panel

  double px(double x) const { return left + margin_l + (x - x0) / (x1 - x0) * (panel_w - margin_l - margin_r); }
  double py(double y) const { return top + panel_h - margin_b - (y - y0) / (y1 - y0) * (panel_h - margin_t - margin_b); }
};

// Polyline segments split at undefined points.
std::string path_data(const Frame& f, const Series& s) {
  std::string d;
  bool pen_down = false;
  for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
    if (!s.y[k] || !std::isfinite(*s.y[k])) {
      pen_down = false;
      continue;
    }
    d += (pen_down ? "L" : "M") + num(f.px(s.x[k])) + "," + num(f.py(*s.y[k])) + " ";
    pen_down = true;
  }
  return d;
}

// Closed polygons over runs where both band edges are defined.
std::string band_data(const Frame& f, const Series& lo, const Series& hi) {
  std::string d;
  std::size_t k = 0;
  const std::size_t n = std::min({lo.x.size(), lo.y.size(), hi.y.size()});
  while (k < n) {
    while (k < n && !(lo.y[k] && hi.y[k])) ++k;
    const std::size_t begin = k;
    while (k < n && lo.y[k] && hi.y[k]) ++k;
    if (k - begin < 2) continue;
    d += "M" + num(f.px(lo.x[begin])) + "," + num(f.py(*hi.y[begin])) + " ";
    for (std::size_t i = begin + 1; i < k; ++i) d += "L" + num(f.px(lo.x[i])) + "," + num(f.py(*hi.y[i])) + " ";
    for (std::size_t i = k; i-- > begin;) d += "L" + num(f.px(lo.x[i])) + "," + num(f.py(*lo.y[i])) + " ";
    d += "Z ";
  }
  return d;
}

void extend(const Series& s, double& lo, double& hi) {
  for (const auto& v : s.y) {
    if (v && std::isfinite(*v)) {
      lo = std::min(lo, *v);
      hi = std::max(hi, *v);
    }
  }
}

double nice_step(double span) {
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

void draw_panel(std::ostringstream& out, const Panel& p, double left) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  for (const Series* s : {&p.median, &p.lower, &p.upper, &p.truth}) {
    for (double x : s->x) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
    }
  }
  double y0 = std::numeric_limits<double>::infinity(), y1 = -y0;
  for (const Series* s : {&p.median, &p.lower, &p.upper, &p.truth}) extend(*s, y0, y1);
  if (!std::isfinite(x0) || x0 == x1) {
    x0 = 0.0;
    x1 = 1.0;
  }
  if (!std::isfinite(y0)) {
    y0 = 0.0;
    y1 = 1.0;
  }
  if (y1 - y0 < 1e-9) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  const Frame f{x0, x1, y0, y1, left, 0.0};

  out << "<g>\n";
  out << "<rect x=\"" << num(f.px(x0)) << "\" y=\"" << num(f.py(y1)) << "\" width=\"" << num(f.px(x1) - f.px(x0))
      << "\" height=\"" << num(f.py(y0) - f.py(y1)) << "\" fill=\"none\" stroke=\"#000\" stroke-width=\"1\"/>\n";
  const double xs = nice_step(x1 - x0);
  for (double x = std::ceil(x0 / xs) * xs; x <= x1 + 1e-9; x += xs) {
    out << "<line x1=\"" << num(f.px(x)) << "\" y1=\"" << num(f.py(y0)) << "\" x2=\"" << num(f.px(x)) << "\" y2=\""
        << num(f.py(y0) + 5) << "\" stroke=\"#000\"/>\n";
    out << "<text x=\"" << num(f.px(x)) << "\" y=\"" << num(f.py(y0) + 18)
        << "\" font-size=\"11\" text-anchor=\"middle\">" << num(std::abs(x) < 1e-12 ? 0.0 : x) << "</text>\n";
  }
  const double ys = nice_step(y1 - y0);
  for (double y = std::ceil(y0 / ys) * ys; y <= y1 + 1e-9; y += ys) {
    out << "<line x1=\"" << num(f.px(x0) - 5) << "\" y1=\"" << num(f.py(y)) << "\" x2=\"" << num(f.px(x0))
        << "\" y2=\"" << num(f.py(y)) << "\" stroke=\"#000\"/>\n";
    out << "<text x=\"" << num(f.px(x0) - 8) << "\" y=\"" << num(f.py(y) + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">" << num(std::abs(y) < 1e-12 ? 0.0 : y) << "</text>\n";
  }
  out << "<path d=\"" << band_data(f, p.lower, p.upper) << "\" fill=\"#c8d7ea\" stroke=\"none\"/>\n";
  out << "<path d=\"" << path_data(f, p.lower) << "\" fill=\"none\" stroke=\"#4a6fa5\" stroke-width=\"1\" stroke-dasharray=\"2,2\"/>\n";
  out << "<path d=\"" << path_data(f, p.upper) << "\" fill=\"none\" stroke=\"#4a6fa5\" stroke-width=\"1\" stroke-dasharray=\"2,2\"/>\n";
  out << "<path d=\"" << path_data(f, p.truth) << "\" fill=\"none\" stroke=\"#000\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"/>\n";
  out << "<path d=\"" << path_data(f, p.median) << "\" fill=\"none\" stroke=\"#b22222\" stroke-width=\"2\"/>\n";
  out << "<text x=\"" << num(left + panel_w / 2) << "\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">"
      << escape(p.title) << "</text>\n";
  out << "<text x=\"" << num(f.px((x0 + x1) / 2)) << "\" y=\"" << num(panel_h - 10)
      << "\" font-size=\"12\" text-anchor=\"middle\">" << escape(p.x_label) << "</text>\n";
  out << "</g>\n";
}

}  // namespace

std::string render(const std::vector<Panel>& panels, const std::string& caption) {
  const double width = panel_w * static_cast<double>(std::max<std::size_t>(1, panels.size()));
  const double height = panel_h + 30.0;
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
      << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\" font-family=\"sans-serif\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << num(width) << "\" height=\"" << num(height) << "\" fill=\"#fff\"/>\n";
  for (std::size_t k = 0; k < panels.size(); ++k) draw_panel(out, panels[k], panel_w * static_cast<double>(k));
  out << "<text x=\"" << num(width / 2) << "\" y=\"" << num(height - 8)
      << "\" font-size=\"13\" text-anchor=\"middle\">" << escape(caption) << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace csivc::svg
