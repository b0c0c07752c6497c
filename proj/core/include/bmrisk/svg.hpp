#pragma once

#include <string>
#include <utility>
#include <vector>

namespace bmrisk {

using XY = std::pair<double, double>;

struct PlotSeries {
  std::string label;
  std::string color = "#000000";
  std::vector<XY> points;
  /// Draw as a right-continuous step function.
  bool step = false;
  bool dashed = false;
  /// Optional shaded band; both edges share x with `points`.
  std::vector<XY> band_lower;
  std::vector<XY> band_upper;
  /// Short vertical marks (censoring).
  std::vector<XY> ticks;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  double x_max = 1.0;
  double y_max = 1.0;
  std::vector<PlotSeries> series;
  /// Embedded verbatim (escaped) in a <metadata> element.
  std::string metadata;
  bool diagonal = false;
};

/// Self-contained SVG line chart. Output is a pure function of the spec.
std::string render_plot(const PlotSpec& spec);

std::string xml_escape(const std::string& s, bool quotes = true);

}  // namespace bmrisk
