#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "complab/detector.hpp"

namespace complab::svg_plot {

struct Series {
  std::string name;
  std::string color = "#1f77b4";
  std::vector<detector::PlotPoint> points;
};

struct PlotSpec {
  double width = 800.0;
  double height = 600.0;
  double margin = 60.0;
  double threshold = 0.0;      // z-space horizontal threshold line
  bool draw_threshold = true;
  // optional second rendering of the threshold as the critical p-hat curve
  // mapped back into z-space is a straight line, so a p-hat axis variant is
  // offered instead via y_as_p_hat
  bool y_as_p_hat = false;     // plot critical p-hat curve and p-hat points
  double point_radius = 2.0;
  std::string title;
  // axis ranges; auto-computed from data when min >= max
  double x_min = 0.0, x_max = 0.0;  // in log10(n)
  double y_min = 0.0, y_max = 0.0;
};

Series series_from_report(const detector::ArtifactReport& report,
                          const std::string& name,
                          const std::string& color = "#d62728");

// Deterministic SVG 1.1 scatter: x = log10(n), y = z (or p-hat).  Fixed
// 4-decimal float formatting, no timestamps; identical inputs give identical
// bytes.
std::string render_scatter(const std::vector<Series>& series,
                           const PlotSpec& spec);

void write_file(const std::string& path, const std::string& content);

}  // namespace complab::svg_plot
