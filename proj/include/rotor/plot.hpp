#pragma once

// Self-contained SVG figures.  Output depends only on the input data: fixed
// number formatting, no timestamps, no randomness.

#include <optional>
#include <string>
#include <vector>

#include "rotor/scenario.hpp"

namespace rotor {

struct PlotLine {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::string caption;  // printed under the axes, normally the config hash
  std::vector<PlotLine> lines;
  std::optional<double> reference_y;  // dashed horizontal line
  bool markers = false;
};

std::string render_line_plot(const LinePlot& plot);

/// Probability density of the molecular axis seen along y (x-z plane) and
/// along z (x-y plane), side by side.  Front and back hemispheres are summed.
std::string render_density_views(const DensityGrid& grid, const std::string& title, const std::string& caption,
                                 int pixels = 64);

/// Axis ticks: multiples of a 1, 2, 2.5 or 5 step lying in [lo, hi], about `target` of them.
std::vector<double> nice_ticks(double lo, double hi, int target = 6);

}  // namespace rotor
