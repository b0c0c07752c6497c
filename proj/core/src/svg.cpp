#include "bmrisk/svg.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace bmrisk {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 170, kTop = 40, kBottom = 60;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct Frame {
  double x_max, y_max;
  double px(double x) const { return kLeft + (kWidth - kLeft - kRight) * (x / x_max); }
  double py(double y) const { return kHeight - kBottom - (kHeight - kTop - kBottom) * (y / y_max); }
};

std::vector<XY> staircase(const std::vector<XY>& pts, double x_end) {
  std::vector<XY> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i > 0) out.emplace_back(pts[i].first, pts[i - 1].second);
    out.push_back(pts[i]);
  }
  if (!pts.empty() && pts.back().first < x_end) out.emplace_back(x_end, pts.back().second);
  return out;
}

std::string path_of(const Frame& f, const std::vector<XY>& pts) {
  std::ostringstream os;
  for (std::size_t i = 0; i < pts.size(); ++i) os << (i ? " L" : "M") << num(f.px(pts[i].first)) << ',' << num(f.py(pts[i].second));
  return os.str();
}

double nice_step(double range) {
  const double raw = range / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) return m * mag;
  return 10.0 * mag;
}

}  // namespace

std::string xml_escape(const std::string& s, bool quotes) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"':
        if (quotes) {
          out += "&quot;";
          break;
        }
        [[fallthrough]];
      default: out += c;
    }
  }
  return out;
}

std::string render_plot(const PlotSpec& spec) {
  const Frame f{spec.x_max > 0 ? spec.x_max : 1.0, spec.y_max > 0 ? spec.y_max : 1.0};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  if (!spec.metadata.empty()) os << "<metadata>" << xml_escape(spec.metadata, false) << "</metadata>\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  os << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(spec.title)
     << "</text>\n";

  // axes and grid
  const double x0 = f.px(0), x1 = f.px(f.x_max), y0 = f.py(0), y1 = f.py(f.y_max);
  os << "<g stroke=\"#cccccc\" stroke-width=\"0.5\">\n";
  const double xs = nice_step(f.x_max), ys = nice_step(f.y_max);
  for (double x = 0; x <= f.x_max + 1e-9; x += xs) os << "<line x1=\"" << num(f.px(x)) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(f.px(x)) << "\" y2=\"" << num(y1) << "\"/>\n";
  for (double y = 0; y <= f.y_max + 1e-9; y += ys) os << "<line x1=\"" << num(x0) << "\" y1=\"" << num(f.py(y)) << "\" x2=\"" << num(x1) << "\" y2=\"" << num(f.py(y)) << "\"/>\n";
  os << "</g>\n<g fill=\"#333333\">\n";
  for (double x = 0; x <= f.x_max + 1e-9; x += xs) os << "<text x=\"" << num(f.px(x)) << "\" y=\"" << num(y0 + 16) << "\" text-anchor=\"middle\">" << num(x) << "</text>\n";
  for (double y = 0; y <= f.y_max + 1e-9; y += ys) os << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(f.py(y) + 4) << "\" text-anchor=\"end\">" << num(y) << "</text>\n";
  os << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 18) << "\" text-anchor=\"middle\">" << xml_escape(spec.x_label) << "</text>\n";
  os << "<text transform=\"translate(18," << num((y0 + y1) / 2) << ") rotate(-90)\" text-anchor=\"middle\">" << xml_escape(spec.y_label) << "</text>\n";
  os << "</g>\n";
  os << "<rect x=\"" << num(x0) << "\" y=\"" << num(y1) << "\" width=\"" << num(x1 - x0) << "\" height=\"" << num(y0 - y1)
     << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  if (spec.diagonal) {
    os << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x1) << "\" y2=\"" << num(y1)
       << "\" stroke=\"#999999\" stroke-dasharray=\"4 4\"/>\n";
  }

  for (const auto& s : spec.series) {
    if (!s.band_lower.empty() && s.band_lower.size() == s.band_upper.size()) {
      auto lo = s.step ? staircase(s.band_lower, f.x_max) : s.band_lower;
      auto hi = s.step ? staircase(s.band_upper, f.x_max) : s.band_upper;
      std::vector<XY> poly(hi.begin(), hi.end());
      poly.insert(poly.end(), lo.rbegin(), lo.rend());
      os << "<path d=\"" << path_of(f, poly) << " Z\" fill=\"" << s.color << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
    }
    const auto pts = s.step ? staircase(s.points, f.x_max) : s.points;
    os << "<path d=\"" << path_of(f, pts) << "\" fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\""
       << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
    for (const auto& [x, y] : s.ticks) {
      os << "<line x1=\"" << num(f.px(x)) << "\" y1=\"" << num(f.py(y) - 4) << "\" x2=\"" << num(f.px(x)) << "\" y2=\""
         << num(f.py(y) + 4) << "\" stroke=\"" << s.color << "\"/>\n";
    }
  }

  double ly = kTop + 10;
  for (const auto& s : spec.series) {
    os << "<line x1=\"" << num(kWidth - kRight + 12) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(kWidth - kRight + 36)
       << "\" y2=\"" << num(ly) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\""
       << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
    os << "<text x=\"" << num(kWidth - kRight + 42) << "\" y=\"" << num(ly + 4) << "\">" << xml_escape(s.label) << "</text>\n";
    ly += 20;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace bmrisk
