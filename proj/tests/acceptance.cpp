// Acceptance run: one PASS/FAIL line per criterion, using the shipped figure
// configurations.  `acceptance 3 7` runs only criteria 3 and 7.

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "rotor/checks.hpp"
#include "rotor/config.hpp"
#include "rotor/scenario.hpp"
#include "rotor/thermal.hpp"

using namespace rotor;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Figure {
  RunConfig config;
  std::vector<EnsembleMember> members;
  RunOptions options;
};

Figure figure(const std::string& name) {
  static const auto presets = load_molecule_presets(default_preset_path());
  Figure f{load_config(fs::path(ROTOR_SOURCE_DIR) / "configs" / (name + ".cfg"), presets), {}, {}};
  f.members = build_ensemble(f.config.ensemble);
  f.options = f.config.options;
  f.options.exec = Execution::parallel;
  return f;
}

double to_fs(double dimensionless, const RunConfig& c) { return dimensionless / kTwoPi * c.revival_time_ps() * 1e3; }

// Least-squares polynomial of the given degree; returns R^2 and fills residuals.
double poly_fit(const std::vector<double>& x, const std::vector<double>& y, int degree, std::vector<double>* residuals) {
  const int n = degree + 1;
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t k = 0; k < x.size(); ++k)
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) a[i][j] += std::pow(x[k], i + j);
      a[i][n] += std::pow(x[k], i) * y[k];
    }
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    for (int r = 0; r < n; ++r)
      if (r != c) {
        const double f = a[r][c] / a[c][c];
        for (int j = c; j <= n; ++j) a[r][j] -= f * a[c][j];
      }
  }
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss_res = 0.0, ss_tot = 0.0;
  if (residuals) residuals->clear();
  for (std::size_t k = 0; k < x.size(); ++k) {
    double fit = 0.0;
    for (int i = 0; i < n; ++i) fit += a[i][n] / a[i][i] * std::pow(x[k], i);
    if (residuals) residuals->push_back(y[k] - fit);
    ss_res += (y[k] - fit) * (y[k] - fit);
    ss_tot += (y[k] - mean) * (y[k] - mean);
  }
  return 1.0 - ss_res / ss_tot;
}

// Extremum location refined by a parabola through the best sample and its neighbours.
double refined_extremum(const Curve& c, std::size_t i) {
  if (i == 0 || i + 1 >= c.x.size()) return c.x[i];
  const double ym = c.y[i - 1], y0 = c.y[i], yp = c.y[i + 1];
  const double denom = ym - 2.0 * y0 + yp;
  const double h = c.x[i + 1] - c.x[i];
  return denom == 0.0 ? c.x[i] : c.x[i] + 0.5 * h * (ym - yp) / denom;
}

Verdict angle_scan_shape() {
  const auto f = figure("fig2");
  const auto& p = f.config.protocol;
  const auto c = scan_polarization_angle(p.p1, p.p2, f.members, f.config.scan.angles, f.options);
  const auto hi = std::max_element(c.y.begin(), c.y.end()) - c.y.begin();
  const auto lo = std::min_element(c.y.begin(), c.y.end()) - c.y.begin();
  const double extremum = std::max(std::abs(c.y[hi]), std::abs(c.y[lo]));
  const double deg = 180.0 / kPi;
  const double step = (c.x[1] - c.x[0]) * deg;
  const bool at_45 = std::abs(std::abs(c.x[hi] * deg) - 45.0) <= step && std::abs(std::abs(c.x[lo] * deg) - 45.0) <= step &&
                     c.x[hi] * c.x[lo] < 0.0;
  double zeros = 0.0, odd = 0.0;
  const std::size_t n = c.x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double a = c.x[i] * deg;
    if (std::abs(a) < 1e-9 || std::abs(std::abs(a) - 90.0) < 1e-9) zeros = std::max(zeros, std::abs(c.y[i]) / extremum);
    odd = std::max(odd, std::abs(c.y[i] + c.y[n - 1 - i]));
  }
  return {at_45 && zeros < 1e-4 && odd <= 1e-6,
          fmt::format("max {:.4f} at {:+.1f} deg, min {:.4f} at {:+.1f} deg, zeros/extremum {:.1e}, odd residual {:.1e}",
                      c.y[hi], c.x[hi] * deg, c.y[lo], c.x[lo] * deg, zeros, odd)};
}

Verdict alignment_saturation() {
  const auto f = figure("fig3");
  const auto& p1 = f.config.scan.p1_values;
  const auto s = scan_pulse_strengths(f.members, p1, f.config.scan.p2_values, f.options);
  bool monotone = true;
  for (std::size_t i = 1; i < p1.size(); ++i) monotone = monotone && s.max_alignment[i] > s.max_alignment[i - 1];
  std::vector<double> x, y, res;
  for (std::size_t i = 0; i < p1.size(); ++i)
    if (p1[i] <= 6.0) {
      x.push_back(p1[i]);
      y.push_back(s.max_alignment[i]);
    }
  poly_fit(x, y, 1, &res);
  double worst_rel = 0.0;
  for (std::size_t i = 0; i < res.size(); ++i) worst_rel = std::max(worst_rel, std::abs(res[i] / y[i]));
  bool band = true;
  std::string large;
  for (std::size_t i = 0; i < p1.size(); ++i)
    if (p1[i] >= 60.0) {
      band = band && s.max_alignment[i] >= 0.85 && s.max_alignment[i] <= 0.92;
      large += fmt::format(" P={}: {:.4f}", p1[i], s.max_alignment[i]);
    }
  return {monotone && worst_rel < 0.05 && band && !large.empty(),
          fmt::format("monotone {}, low-P linear residual {:.2f}%, large P{}", monotone, 100 * worst_rel, large)};
}

Verdict slope_trend() {
  const auto f = figure("fig4");
  const auto& p1 = f.config.scan.p1_values;
  const auto& p2 = f.config.scan.p2_values;
  const auto s = scan_pulse_strengths(f.members, p1, p2, f.options);
  // least-squares slope over the P2 <= 3 window
  std::vector<double> slopes;
  for (std::size_t i = 0; i < p1.size(); ++i) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
    for (std::size_t j = 0; j < p2.size(); ++j)
      if (p2[j] <= 3.0) {
        sx += p2[j];
        sy += s.jy[i][j];
        sxx += p2[j] * p2[j];
        sxy += p2[j] * s.jy[i][j];
        n += 1;
      }
    slopes.push_back((n * sxy - sx * sy) / (n * sxx - sx * sx));
  }
  bool increasing = p1.size() >= 4;
  std::string text;
  for (std::size_t i = 0; i < p1.size(); ++i) {
    if (i > 0) increasing = increasing && slopes[i] > slopes[i - 1];
    text += fmt::format("{}P1={}: {:.4f}", i ? ", " : "", p1[i], slopes[i]);
  }
  return {increasing, "dJy/dP2 " + text};
}

Verdict budget_optimum() {
  const auto f = figure("fig5");
  const auto c = scan_fixed_budget(f.members, f.config.scan.budget, f.config.scan.differences, f.options);
  const std::size_t n = c.x.size();
  double even = 0.0;
  for (std::size_t i = 0; i < n; ++i) even = std::max(even, std::abs(c.y[i] - c.y[n - 1 - i]));
  bool concave = true;
  for (std::size_t i = 1; i + 1 < n; ++i) concave = concave && c.y[i - 1] - 2.0 * c.y[i] + c.y[i + 1] < 0.0;
  const auto best = std::max_element(c.y.begin(), c.y.end()) - c.y.begin();
  const double step = c.x[1] - c.x[0];
  const bool centred = std::abs(c.x[best]) < step;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(c.x[i] - c.x[best]) <= 4.0 * step) {
      x.push_back(c.x[i]);
      y.push_back(c.y[i]);
    }
  const double r2 = poly_fit(x, y, 2, nullptr);
  return {even <= 1e-6 && concave && centred && r2 > 0.98,
          fmt::format("even residual {:.2e}, concave {}, max {:.4f} at P1-P2 = {}, quadratic R^2 {:.4f}", even, concave,
                      c.y[best], c.x[best], r2)};
}

Verdict delay_timing() {
  const auto f = figure("fig6");
  const auto& p = f.config.protocol;
  const auto& s = f.config.scan;
  const auto c = scan_delay(p.p1, p.p2, f.members, s.delay_center, s.delay_halfwidth, s.delay_points, f.options);
  const auto hi = std::max_element(c.y.begin(), c.y.end()) - c.y.begin();
  const auto lo = std::min_element(c.y.begin(), c.y.end()) - c.y.begin();
  const double t_hi = refined_extremum(c, hi), t_lo = refined_extremum(c, lo);
  const double sep = to_fs(t_lo - t_hi, f.config);
  const bool order = c.y[hi] > 0.0 && c.y[lo] < 0.0 && t_hi < kPi && t_lo > kPi;
  return {order && std::abs(sep - 200.0) <= 50.0,
          fmt::format("max {:+.4f} at {:+.1f} fs, min {:+.4f} at {:+.1f} fs from T_rev/2, separation {:.1f} fs", c.y[hi],
                      to_fs(t_hi - kPi, f.config), c.y[lo], to_fs(t_lo - kPi, f.config), sep)};
}

Verdict isomer_opposition() {
  double jy[2], noise[2];
  const char* names[2] = {"fig7_even", "fig7_odd"};
  for (int k = 0; k < 2; ++k) {
    auto f = figure(names[k]);
    auto p = f.config.protocol;
    p.delay_mode = DelayMode::auto_quarter;
    p.sampling.samples_per_revival = 512;
    const auto r = run_protocol(p, f.members, f.options);
    // numerical noise: basis-size sensitivity, spread of the conserved jy and rounding
    RunOptions wide = f.options;
    wide.l_headroom = default_l_headroom(p.p1 + p.p2) + 12;
    const auto r_wide = run_protocol(p, f.members, wide);
    jy[k] = r.final_jy;
    noise[k] = std::abs(r.final_jy - r_wide.final_jy) + r.jy_variation +
               std::numeric_limits<double>::epsilon() * std::abs(r.final_jy);
  }
  const bool opposite = jy[0] * jy[1] < 0.0;
  const bool clear = std::abs(jy[0]) > 10.0 * noise[0] && std::abs(jy[1]) > 10.0 * noise[1];
  return {opposite && clear, fmt::format("even {:+.4f} (noise {:.1e}), odd {:+.4f} (noise {:.1e})", jy[0], noise[0],
                                         jy[1], noise[1])};
}

ProtocolResult confinement_run() {
  static const ProtocolResult r = [] {
    const auto f = figure("fig9");
    return run_protocol(f.config.protocol, f.members, f.options);
  }();
  return r;
}

Verdict azimuthal_confinement() {
  const double mean = confinement_run().cos2phi_revival_mean;
  return {std::abs(mean - 0.57) <= 0.02 && mean > 0.5, fmt::format("revival mean <cos^2 phi> = {:.5f}", mean)};
}

Verdict engine_agreement() {
  const auto f = figure("fig8");
  const auto start = std::chrono::steady_clock::now();
  const auto grid_run = run_protocol(f.config.protocol, f.members, f.options);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  auto p = f.config.protocol;
  p.engine = Engine::spectral;
  p.delay_mode = DelayMode::explicit_delay;
  p.delay = grid_run.pulse2_time;
  const auto ref = run_protocol(p, f.members, f.options);
  const auto& a = grid_run.get("cos2phi").values;
  const auto& b = ref.get("cos2phi").values;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  const auto& g = p.grid;
  return {worst < 1e-2 && a.size() == b.size(),
          fmt::format("max |difference| {:.2e} over {} samples, grid {}x{}, m_max {}, dt {:g}, {:.0f} s", worst,
                      a.size(), g.n_theta, g.n_phi, g.m_max, g.delta_tau, seconds)};
}

Verdict fractional_revivals() {
  const std::vector<double> fractions{1.0 / 3.0, 1.0 / 6.0, 1.0 / 8.0};
  const auto rep = analyze_fractional_revivals(confinement_run().get("cos2phi"), fractions);
  bool all = true;
  std::string text;
  for (const auto& ft : rep.features) {
    all = all && ft.snr > 5.0;
    text += fmt::format("{}{:.4f}: {:.1f}x", text.empty() ? "" : ", ", ft.fraction, ft.snr);
  }
  return {all, "feature/noise " + text + fmt::format(" (noise {:.1e})", rep.noise_floor)};
}

Verdict property_suite() {
  int failed = 0;
  std::string text;
  for (const auto& r : run_property_checks(Execution::parallel))
    if (!r.pass) {
      ++failed;
      text += fmt::format("; {} {:.2e} > {:.1e}", r.name, r.measured, r.limit);
    }
  return {failed == 0, fmt::format("{} failing checks{}", failed, text)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"angle scan extrema, zeros and odd symmetry", angle_scan_shape},
      {"alignment saturation with pulse strength", alignment_saturation},
      {"slope of J_y in P2 grows with P1", slope_trend},
      {"fixed-budget optimum at equal pulses", budget_optimum},
      {"half-revival delay extrema separation", delay_timing},
      {"spin isomers rotate in opposite senses", isomer_opposition},
      {"azimuthal confinement over one revival", azimuthal_confinement},
      {"grid and spectral engines agree", engine_agreement},
      {"fractional revival features", fractional_revivals},
      {"property and oracle suite", property_suite},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failed;
    fmt::print("{} criterion {}: {}: {}\n", v.pass ? "PASS" : "FAIL", id, criteria[i].first, v.detail);
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
