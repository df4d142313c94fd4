#include "complab/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "complab/stats.hpp"

namespace complab::svg_plot {

namespace {

std::string f4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

Series series_from_report(const detector::ArtifactReport& report,
                          const std::string& name, const std::string& color) {
  Series s;
  s.name = name;
  s.color = color;
  for (const auto& f : report.features)
    s.points.push_back({f.feature, f.n, f.max_z()});
  return s;
}

std::string render_scatter(const std::vector<Series>& series,
                           const PlotSpec& spec) {
  if (series.empty() || series.size() > 2)
    throw std::invalid_argument("render_scatter: need 1 or 2 series");

  auto y_of = [&](const detector::PlotPoint& p) {
    return spec.y_as_p_hat ? stats::critical_p_hat(p.z, p.n) : p.z;
  };

  double x_min = spec.x_min, x_max = spec.x_max;
  double y_min = spec.y_min, y_max = spec.y_max;
  if (!(x_min < x_max) || !(y_min < y_max)) {
    bool any = false;
    double xa = 0.0, xb = 1.0, ya = 0.0, yb = 1.0;
    for (const auto& s : series) {
      for (const auto& p : s.points) {
        if (p.n < 1)
          throw std::invalid_argument("render_scatter: log axis requires n >= 1");
        const double x = std::log10(static_cast<double>(p.n));
        const double y = y_of(p);
        if (!any) {
          xa = xb = x;
          ya = yb = y;
          any = true;
        } else {
          xa = std::min(xa, x);
          xb = std::max(xb, x);
          ya = std::min(ya, y);
          yb = std::max(yb, y);
        }
      }
    }
    if (spec.draw_threshold && !spec.y_as_p_hat) {
      ya = any ? std::min(ya, spec.threshold) : spec.threshold - 1.0;
      yb = any ? std::max(yb, spec.threshold) : spec.threshold + 1.0;
      if (!any) {
        xa = 0.0;
        xb = 5.0;
        any = true;
      }
    }
    if (!any) {
      xa = 0.0; xb = 5.0; ya = 0.0; yb = 1.0;
    }
    const double xpad = 0.05 * std::max(xb - xa, 1e-9);
    const double ypad = 0.05 * std::max(yb - ya, 1e-9);
    if (!(x_min < x_max)) { x_min = xa - xpad; x_max = xb + xpad; }
    if (!(y_min < y_max)) { y_min = ya - ypad; y_max = yb + ypad; }
  }

  const double px0 = spec.margin, px1 = spec.width - spec.margin;
  const double py0 = spec.height - spec.margin, py1 = spec.margin;
  auto px = [&](double x) {
    return px0 + (x - x_min) / (x_max - x_min) * (px1 - px0);
  };
  auto py = [&](double y) {
    return py0 + (y - y_min) / (y_max - y_min) * (py1 - py0);
  };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         f4(spec.width) + "\" height=\"" + f4(spec.height) + "\" viewBox=\"0 0 " +
         f4(spec.width) + " " + f4(spec.height) + "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + f4(spec.width) + "\" height=\"" +
         f4(spec.height) + "\" fill=\"white\"/>\n";
  if (!spec.title.empty())
    svg += "<text x=\"" + f4(spec.width / 2) + "\" y=\"" + f4(spec.margin / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
           esc(spec.title) + "</text>\n";

  // axes
  svg += "<line x1=\"" + f4(px0) + "\" y1=\"" + f4(py0) + "\" x2=\"" + f4(px1) +
         "\" y2=\"" + f4(py0) + "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg += "<line x1=\"" + f4(px0) + "\" y1=\"" + f4(py0) + "\" x2=\"" + f4(px0) +
         "\" y2=\"" + f4(py1) + "\" stroke=\"black\" stroke-width=\"1\"/>\n";

  // x ticks at integer powers of ten
  for (int e = static_cast<int>(std::ceil(x_min)); e <= std::floor(x_max); ++e) {
    const double x = px(e);
    svg += "<line x1=\"" + f4(x) + "\" y1=\"" + f4(py0) + "\" x2=\"" + f4(x) +
           "\" y2=\"" + f4(py0 + 5) + "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + f4(x) + "\" y=\"" + f4(py0 + 20) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\">1e" + std::to_string(e) + "</text>\n";
  }
  // y ticks: 5 evenly spaced
  for (int t = 0; t <= 5; ++t) {
    const double y = y_min + (y_max - y_min) * t / 5.0;
    const double yy = py(y);
    svg += "<line x1=\"" + f4(px0 - 5) + "\" y1=\"" + f4(yy) + "\" x2=\"" +
           f4(px0) + "\" y2=\"" + f4(yy) +
           "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + f4(px0 - 8) + "\" y=\"" + f4(yy + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" +
           f4(y) + "</text>\n";
  }
  // axis labels
  svg += "<text x=\"" + f4((px0 + px1) / 2) + "\" y=\"" +
         f4(spec.height - spec.margin / 4) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">n (occurrences, log scale)</text>\n";
  svg += "<text x=\"" + f4(spec.margin / 4) + "\" y=\"" + f4((py0 + py1) / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 " + f4(spec.margin / 4) + " " +
         f4((py0 + py1) / 2) + ")\">" +
         std::string(spec.y_as_p_hat ? "p-hat" : "z-statistic") + "</text>\n";

  // threshold: horizontal line in z-space, curve in p-hat space
  if (spec.draw_threshold) {
    if (!spec.y_as_p_hat) {
      const double yy = py(spec.threshold);
      svg += "<line x1=\"" + f4(px0) + "\" y1=\"" + f4(yy) + "\" x2=\"" +
             f4(px1) + "\" y2=\"" + f4(yy) +
             "\" stroke=\"#1f5fbf\" stroke-width=\"1.5\" "
             "stroke-dasharray=\"6,4\"/>\n";
    } else {
      std::string pts;
      const int steps = 100;
      for (int i = 0; i <= steps; ++i) {
        const double lx = x_min + (x_max - x_min) * i / steps;
        const double n = std::pow(10.0, lx);
        const double ph = spec.threshold / (2.0 * std::sqrt(n)) + 0.5;
        if (!pts.empty()) pts += " ";
        pts += f4(px(lx)) + "," + f4(py(ph));
      }
      svg += "<polyline points=\"" + pts +
             "\" fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"1.5\"/>\n";
    }
  }

  for (const auto& s : series) {
    for (const auto& p : s.points) {
      const double x = std::log10(static_cast<double>(p.n));
      svg += "<circle cx=\"" + f4(px(x)) + "\" cy=\"" + f4(py(y_of(p))) +
             "\" r=\"" + f4(spec.point_radius) + "\" fill=\"" + s.color +
             "\" fill-opacity=\"0.6\"/>\n";
    }
  }

  // legend
  for (size_t i = 0; i < series.size(); ++i) {
    const double ly = py1 + 16.0 * static_cast<double>(i);
    svg += "<circle cx=\"" + f4(px1 - 110) + "\" cy=\"" + f4(ly) + "\" r=\"4\" fill=\"" +
           series[i].color + "\"/>\n";
    svg += "<text x=\"" + f4(px1 - 100) + "\" y=\"" + f4(ly + 4) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" +
           esc(series[i].name) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace complab::svg_plot
