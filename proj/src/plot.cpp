#include "rotor/plot.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "rotor/errors.hpp"

namespace rotor {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 80, kRight = 30, kTop = 50, kBottom = 90;
constexpr std::array<const char*, 6> kColors{"#1f5fa8", "#c0392b", "#2e8b57", "#8e44ad", "#d68910", "#555555"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string num(double v) { return fmt::format("{:.2f}", v); }

std::string tick_label(double v, double step) {
  if (std::abs(v) < 1e-12 * std::max(1.0, step)) v = 0.0;
  const int decimals = std::max(0, static_cast<int>(std::ceil(-std::log10(step) - 1e-9)));
  if (std::abs(v) >= 1e5 || (v != 0.0 && std::abs(v) < 1e-4)) return fmt::format("{:.3g}", v);
  return fmt::format("{:.{}f}", v, std::min(decimals, 6));
}

std::string header(double w, double h) {
  return fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"Helvetica, Arial, sans-serif\" font-size=\"13\">\n"
      "<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
      num(w), num(h));
}

// Five-stop sequential colour map, linear in sRGB between stops.
std::string heat_color(double t) {
  static const double stops[5][3] = {
      {255, 255, 255}, {198, 219, 239}, {107, 174, 214}, {33, 113, 181}, {8, 48, 107}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(t));
  const double f = t - i;
  int rgb[3];
  for (int c = 0; c < 3; ++c) rgb[c] = static_cast<int>(std::lround(stops[i][c] + f * (stops[i + 1][c] - stops[i][c])));
  return fmt::format("#{:02x}{:02x}{:02x}", rgb[0], rgb[1], rgb[2]);
}

}  // namespace

std::vector<double> nice_ticks(double lo, double hi, int target) {
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / std::max(1, target);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> ticks;
  const double first = std::ceil(lo / step - 1e-9) * step;
  for (int i = 0;; ++i) {
    const double t = first + i * step;
    if (t > hi + 1e-9 * step) break;
    ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  }
  return ticks;
}

std::string render_line_plot(const LinePlot& plot) {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& l : plot.lines) {
    if (l.x.size() != l.y.size()) throw DomainError("plot: x and y differ in length");
    for (std::size_t i = 0; i < l.x.size(); ++i) {
      x0 = std::min(x0, l.x[i]);
      x1 = std::max(x1, l.x[i]);
      y0 = std::min(y0, l.y[i]);
      y1 = std::max(y1, l.y[i]);
    }
  }
  if (!std::isfinite(x0)) throw DomainError("plot: no data");
  if (plot.reference_y) {
    y0 = std::min(y0, *plot.reference_y);
    y1 = std::max(y1, *plot.reference_y);
  }
  if (x1 == x0) {
    x0 -= 0.5;
    x1 += 0.5;
  }
  // a flat series gets a symmetric band around its value
  if (y1 - y0 <= 1e-12 * std::max(1.0, std::abs(y0))) {
    const double pad = std::max(0.05 * std::abs(y0), 0.05);
    y0 -= pad;
    y1 += pad;
  } else {
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
  }
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * ph; };

  std::string out = header(kWidth, kHeight);
  if (!plot.caption.empty()) out += "<!-- " + escape(plot.caption) + " -->\n";
  out += fmt::format("<text x=\"{}\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n", num(kWidth / 2),
                     escape(plot.title));
  out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", num(kLeft),
                     num(kTop), num(pw), num(ph));

  const auto xt = nice_ticks(x0, x1);
  const double xstep = xt.size() > 1 ? xt[1] - xt[0] : 1.0;
  for (double t : xt) {
    out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", num(sx(t)),
                       num(kTop + ph), num(kTop + ph + 5));
    out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", num(sx(t)), num(kTop + ph + 20),
                       tick_label(t, xstep));
  }
  const auto yt = nice_ticks(y0, y1);
  const double ystep = yt.size() > 1 ? yt[1] - yt[0] : 1.0;
  for (double t : yt) {
    out += fmt::format("<line x1=\"{0}\" y1=\"{2}\" x2=\"{1}\" y2=\"{2}\" stroke=\"black\"/>\n", num(kLeft - 5),
                       num(kLeft), num(sy(t)));
    out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", num(kLeft - 8), num(sy(t) + 4),
                       tick_label(t, ystep));
  }
  out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", num(kLeft + pw / 2),
                     num(kTop + ph + 42), escape(plot.x_label));
  out += fmt::format("<text x=\"20\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {0})\">{1}</text>\n",
                     num(kTop + ph / 2), escape(plot.y_label));

  if (plot.reference_y) {
    out += fmt::format(
        "<line class=\"reference\" x1=\"{0}\" y1=\"{2}\" x2=\"{1}\" y2=\"{2}\" stroke=\"#777777\" "
        "stroke-dasharray=\"6 4\"/>\n",
        num(kLeft), num(kLeft + pw), num(sy(*plot.reference_y)));
  }
  for (std::size_t k = 0; k < plot.lines.size(); ++k) {
    const auto& l = plot.lines[k];
    const char* color = kColors[k % kColors.size()];
    std::string pts;
    for (std::size_t i = 0; i < l.x.size(); ++i) pts += (i ? " " : "") + num(sx(l.x[i])) + "," + num(sy(l.y[i]));
    out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color, pts);
    if (plot.markers)
      for (std::size_t i = 0; i < l.x.size(); ++i)
        out += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"{}\"/>\n", num(sx(l.x[i])), num(sy(l.y[i])), color);
    if (!l.label.empty()) {
      const double ly = kTop + 16 + 18 * static_cast<double>(k);
      out += fmt::format("<line x1=\"{0}\" y1=\"{2}\" x2=\"{1}\" y2=\"{2}\" stroke=\"{3}\" stroke-width=\"2\"/>\n",
                         num(kLeft + pw - 150), num(kLeft + pw - 125), num(ly), color);
      out += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", num(kLeft + pw - 118), num(ly + 4), escape(l.label));
    }
  }
  if (!plot.caption.empty()) {
    out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"10\" fill=\"#555555\">{}</text>\n", num(kLeft),
                       num(kHeight - 14), escape(plot.caption));
  }
  out += "</svg>\n";
  return out;
}

std::string render_density_views(const DensityGrid& grid, const std::string& title, const std::string& caption,
                                 int pixels) {
  if (grid.theta.empty() || grid.phi.empty()) throw DomainError("density plot: empty grid");
  if (pixels < 4) throw DomainError("density plot: too few pixels");
  const std::size_t np = static_cast<std::size_t>(pixels);
  const double dt = grid.theta.size() > 1 ? grid.theta[1] - grid.theta[0] : std::numbers::pi;
  const double dp = grid.phi.size() > 1 ? grid.phi[1] - grid.phi[0] : 2.0 * std::numbers::pi;

  // project each cell's probability onto the two view planes
  std::array<std::vector<double>, 2> img{std::vector<double>(np * np, 0.0), std::vector<double>(np * np, 0.0)};
  auto bin = [&](double u) {
    const auto b = static_cast<long>(std::floor((u + 1.0) / 2.0 * static_cast<double>(np)));
    return static_cast<std::size_t>(std::clamp<long>(b, 0, static_cast<long>(np) - 1));
  };
  for (std::size_t i = 0; i < grid.theta.size(); ++i) {
    const double st = std::sin(grid.theta[i]), ct = std::cos(grid.theta[i]);
    for (std::size_t j = 0; j < grid.phi.size(); ++j) {
      const double p = grid.at(i, j) * st * dt * dp;
      const double x = st * std::cos(grid.phi[j]), y = st * std::sin(grid.phi[j]);
      img[0][(np - 1 - bin(ct)) * np + bin(x)] += p;  // seen along y: x right, z up
      img[1][(np - 1 - bin(y)) * np + bin(x)] += p;   // seen along z: x right, y up
    }
  }
  double top = 0.0;
  for (const auto& im : img)
    for (double v : im) top = std::max(top, v);
  if (!(top > 0.0)) top = 1.0;

  const double cell = 4.0, side = cell * static_cast<double>(np), gap = 60.0;
  const double w = 2 * side + gap + 120.0, h = side + 120.0;
  std::string out = header(w, h);
  if (!caption.empty()) out += "<!-- " + escape(caption) + " -->\n";
  out += fmt::format("<text x=\"{}\" y=\"26\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n", num(w / 2),
                     escape(title));
  const std::array<const char*, 2> names{"view along y (x horizontal, z vertical)", "view along z (x horizontal, y vertical)"};
  for (int v = 0; v < 2; ++v) {
    const double ox = 60.0 + v * (side + gap), oy = 50.0;
    out += fmt::format("<g class=\"view\" transform=\"translate({},{})\">\n", num(ox), num(oy));
    for (std::size_t r = 0; r < np; ++r)
      for (std::size_t c = 0; c < np; ++c) {
        const double val = img[static_cast<std::size_t>(v)][r * np + c];
        if (val <= 0.0) continue;
        out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
                           num(cell * static_cast<double>(c)), num(cell * static_cast<double>(r)), num(cell), num(cell),
                           heat_color(val / top));
      }
    out += fmt::format("<circle cx=\"{0}\" cy=\"{0}\" r=\"{0}\" fill=\"none\" stroke=\"#999999\"/>\n", num(side / 2));
    out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", num(side / 2), num(side + 22),
                       names[static_cast<std::size_t>(v)]);
    out += "</g>\n";
  }
  if (!caption.empty()) {
    out += fmt::format("<text x=\"60\" y=\"{}\" font-size=\"10\" fill=\"#555555\">{}</text>\n", num(h - 14),
                       escape(caption));
  }
  out += "</svg>\n";
  return out;
}

}  // namespace rotor
