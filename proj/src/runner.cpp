#include "rotor/runner.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json.hpp"
#include "rotor/errors.hpp"
#include "rotor/io.hpp"
#include "rotor/plot.hpp"
#include "rotor/thermal.hpp"

namespace rotor {

namespace {

using nlohmann::json;
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

const std::map<std::string, std::string> kSeriesLabels{
    {"cos2theta", "<cos^2 theta>"}, {"cos2phi", "<cos^2 phi>"}, {"jx", "<J_x>"}, {"jy", "<J_y>"}, {"jz", "<J_z>"}};

class ArtifactWriter {
 public:
  ArtifactWriter(const RunConfig& config, RunReport& report)
      : config_(config), report_(report), ctx_(make_context(config)) {}

  const ArtifactContext& context() const { return ctx_; }
  std::string caption() const { return "config_sha256=" + ctx_.config_hash; }

  void file(const std::string& suffix, const std::string& text) {
    const auto path = config_.output.directory / (config_.output.stem + suffix);
    write_text_file(path, text);
    report_.files.push_back(path);
  }

  void series(const ObservableSeries& s, const std::string& tag = "") {
    const std::string base = "_" + s.name + tag;
    if (config_.output.csv) file(base + ".csv", series_to_csv(s, ctx_));
    if (config_.output.json) file(base + ".json", series_to_json(s, ctx_));
    if (config_.output.svg) {
      LinePlot plot = series_plot(s.name, {{"", s.times, s.values}});
      if (s.name == "cos2phi" && !config_.output.reference_line) plot.reference_y = 0.5;
      file(base + ".svg", render_line_plot(plot));
    }
  }

  LinePlot series_plot(const std::string& name, std::vector<PlotLine> lines) const {
    for (auto& l : lines)
      for (auto& t : l.x) t /= kTwoPi;
    LinePlot plot;
    plot.title = title(kSeriesLabels.count(name) ? kSeriesLabels.at(name) : name);
    plot.x_label = "time [T_rev]";
    plot.y_label = kSeriesLabels.count(name) ? kSeriesLabels.at(name) : name;
    plot.caption = caption();
    plot.lines = std::move(lines);
    plot.reference_y = config_.output.reference_line;
    return plot;
  }

  void curve(const Curve& c, const std::string& y_name, const std::string& tag, const std::string& x_label,
             double x_scale) {
    if (config_.output.csv) file("_" + tag + ".csv", curve_to_csv(c, y_name, ctx_));
    if (config_.output.json) file("_" + tag + ".json", curve_to_json(c, y_name, ctx_));
    if (config_.output.svg) {
      PlotLine line{"", c.x, c.y};
      for (auto& x : line.x) x *= x_scale;
      LinePlot plot;
      plot.title = title(y_name);
      plot.x_label = x_label;
      plot.y_label = kSeriesLabels.count(y_name) ? kSeriesLabels.at(y_name) : y_name;
      plot.caption = caption();
      plot.lines = {line};
      plot.markers = true;
      plot.reference_y = config_.output.reference_line;
      file("_" + tag + ".svg", render_line_plot(plot));
    }
  }

  std::string title(const std::string& fallback) const {
    return config_.output.title.empty() ? fallback : config_.output.title;
  }

 private:
  const RunConfig& config_;
  RunReport& report_;
  ArtifactContext ctx_;
};

std::string fraction_key(double f) { return fmt::format("fraction_{:.6f}", f); }

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw NumericalError("engine comparison: series lengths differ");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void run_single(const RunConfig& c, std::span<const EnsembleMember> members, const RunOptions& options,
                ArtifactWriter& out, RunReport& report) {
  const auto result = run_protocol(c.protocol, members, options);
  const double t_rev = c.revival_time_ps();
  report.values["pulse2_time"] = result.pulse2_time;
  report.values["pulse2_time_ps"] = result.pulse2_time / kTwoPi * t_rev;
  report.values["peak_alignment"] = result.peak_alignment;
  report.values["final_jy"] = result.final_jy;
  report.values["jy_variation"] = result.jy_variation;
  report.values["cos2phi_revival_mean"] = result.cos2phi_revival_mean;
  report.values["l_max"] = result.l_max;
  for (const auto& s : result.series) out.series(s);

  if (c.analysis.compare_engines) {
    DoublePulseProtocol spectral = c.protocol;
    spectral.engine = Engine::spectral;
    spectral.delay_mode = DelayMode::explicit_delay;
    spectral.delay = result.pulse2_time;
    const auto ref = run_protocol(spectral, members, options);
    for (const char* name : {"cos2theta", "cos2phi"}) {
      const auto& a = result.get(name);
      const auto& b = ref.get(name);
      out.series(b, "_spectral");
      report.values[std::string("engine_max_abs_diff_") + name] = max_abs_diff(a.values, b.values);
      if (c.output.svg) {
        LinePlot plot = out.series_plot(name, {{"fdtd", a.times, a.values}, {"spectral", b.times, b.values}});
        if (std::string(name) == "cos2phi" && !plot.reference_y) plot.reference_y = 0.5;
        out.file(std::string("_") + name + "_engines.svg", render_line_plot(plot));
      }
    }
  }

  if (!c.analysis.fractions.empty()) {
    const auto rep = analyze_fractional_revivals(result.get("cos2phi"), c.analysis.fractions);
    report.values["fractional_noise_floor"] = rep.noise_floor;
    for (const auto& f : rep.features) {
      report.values[fraction_key(f.fraction) + "_amplitude"] = f.amplitude;
      report.values[fraction_key(f.fraction) + "_snr"] = f.snr;
    }
  }

  if (c.analysis.density) {
    DoublePulseProtocol p = c.protocol;
    p.engine = Engine::spectral;
    p.delay_mode = DelayMode::explicit_delay;
    p.delay = result.pulse2_time;
    const auto grid = revival_averaged_distribution(p, members, c.analysis.density_n_theta, c.analysis.density_n_phi, options);
    report.values["density_cos2phi"] = grid.cos2phi;
    report.values["density_raw_integral"] = grid.raw_integral;
    if (c.output.csv) out.file("_density.csv", density_to_csv(grid, out.context()));
    if (c.output.svg) {
      out.file("_density.svg",
               render_density_views(grid, out.title("revival-averaged axis distribution"), out.caption()));
    }
  }
}

void run_scan(const RunConfig& c, std::span<const EnsembleMember> members, const RunOptions& options,
              ArtifactWriter& out, RunReport& report) {
  const auto& s = c.scan;
  const auto& p = c.protocol;
  auto extremes = [&](const Curve& curve, double scale, const std::string& prefix) {
    const auto hi = std::max_element(curve.y.begin(), curve.y.end()) - curve.y.begin();
    const auto lo = std::min_element(curve.y.begin(), curve.y.end()) - curve.y.begin();
    report.values[prefix + "_at_max"] = curve.x[static_cast<std::size_t>(hi)] * scale;
    report.values[prefix + "_at_min"] = curve.x[static_cast<std::size_t>(lo)] * scale;
    report.values["jy_max"] = curve.y[static_cast<std::size_t>(hi)];
    report.values["jy_min"] = curve.y[static_cast<std::size_t>(lo)];
  };
  switch (s.kind) {
    case ScanKind::none:
      break;
    case ScanKind::angle: {
      Curve curve = scan_polarization_angle(p.p1, p.p2, members, s.angles, options);
      for (auto& x : curve.x) x *= 180.0 / kPi;
      curve.x_name = "pol_angle_deg";
      extremes(curve, 1.0, "angle_deg");
      out.curve(curve, "jy", "angle_scan", "pulse-2 polarization angle [deg]", 1.0);
      break;
    }
    case ScanKind::strengths: {
      const auto surf = scan_pulse_strengths(members, s.p1_values, s.p2_values, options);
      if (c.output.csv) out.file("_strengths.csv", surface_to_csv(surf, out.context()));
      Curve align{"p1", surf.p1, surf.max_alignment, {}};
      out.curve(align, "max_cos2theta", "max_alignment", "P1", 1.0);
      Curve peak{"p1", surf.p1, surf.peak_time, {}};
      for (auto& t : peak.y) t /= kTwoPi;
      out.curve(peak, "peak_time_T_rev", "peak_time", "P1", 1.0);
      for (std::size_t i = 0; i < surf.p1.size(); ++i) {
        report.values[fmt::format("max_alignment_p1_{:g}", surf.p1[i])] = surf.max_alignment[i];
      }
      if (c.output.svg) {
        LinePlot plot;
        plot.title = out.title("<J_y> against P2");
        plot.x_label = "P2";
        plot.y_label = "<J_y>";
        plot.caption = out.caption();
        plot.markers = true;
        for (std::size_t i = 0; i < surf.p1.size(); ++i)
          plot.lines.push_back({fmt::format("P1 = {:g}", surf.p1[i]), surf.p2, surf.jy[i]});
        out.file("_strengths.svg", render_line_plot(plot));
      }
      break;
    }
    case ScanKind::budget: {
      const Curve curve = scan_fixed_budget(members, s.budget, s.differences, options);
      extremes(curve, 1.0, "difference");
      out.curve(curve, "jy", "budget_scan", "P1 - P2", 1.0);
      break;
    }
    case ScanKind::delay: {
      const Curve curve = scan_delay(p.p1, p.p2, members, s.delay_center, s.delay_halfwidth, s.delay_points, options);
      const double to_ps = c.revival_time_ps() / kTwoPi;
      extremes(curve, to_ps, "delay_ps");
      report.values["extrema_separation_fs"] =
          1e3 * std::abs(report.values["delay_ps_at_max"] - report.values["delay_ps_at_min"]);
      out.curve(curve, "jy", "delay_scan", "pulse-2 delay [ps]", to_ps);
      break;
    }
  }
}

}  // namespace

RunReport execute_config(const RunConfig& config, Execution exec) {
  config.validate();
  RunReport report;
  ArtifactWriter out(config, report);
  report.config_hash = out.context().config_hash;
  const auto members = build_ensemble(config.ensemble);
  RunOptions options = config.options;
  options.exec = exec;
  report.values["ensemble_members"] = static_cast<double>(members.size());
  report.values["ensemble_max_l"] = max_member_l(members);

  if (config.is_scan()) {
    run_scan(config, members, options, out, report);
  } else {
    run_single(config, members, options, out, report);
  }

  std::map<std::string, std::string> labels{{"stem", config.output.stem}, {"kind", to_string(config.scan.kind)}};
  out.file("_summary.json", summary_to_json(report.values, labels, out.context()));

  json manifest;
  manifest["artifact_version"] = kArtifactVersion;
  manifest["config_hash"] = report.config_hash;
  manifest["config"] = canonical_text(config);
  manifest["files"] = json::object();
  for (const auto& f : report.files) manifest["files"][f.filename().string()] = sha256_hex(read_text_file(f));
  write_text_file(config.output.directory / (config.output.stem + ".manifest.json"), manifest.dump(1, ' ') + "\n");
  return report;
}

VerifyReport verify_outputs(const std::filesystem::path& directory, const RunConfig* config) {
  VerifyReport rep;
  std::error_code ec;
  if (!std::filesystem::is_directory(directory, ec)) throw IoError("not a directory: '" + directory.string() + "'");
  std::vector<std::filesystem::path> manifests;
  for (const auto& e : std::filesystem::directory_iterator(directory)) {
    const auto name = e.path().filename().string();
    if (name.size() > 14 && name.ends_with(".manifest.json")) manifests.push_back(e.path());
  }
  std::sort(manifests.begin(), manifests.end());
  bool matched_config = config == nullptr;
  for (const auto& m : manifests) {
    ++rep.manifests;
    json j;
    try {
      j = json::parse(read_text_file(m));
    } catch (const json::exception& e) {
      rep.problems.push_back(m.filename().string() + ": unreadable manifest");
      continue;
    }
    const std::string hash = j.value("config_hash", "");
    if (sha256_hex(j.value("config", "")) != hash) {
      rep.problems.push_back(m.filename().string() + ": config text does not match its hash");
    }
    const std::string stem = m.filename().string().substr(0, m.filename().string().size() - 14);
    if (config && stem == config->output.stem) {
      matched_config = true;
      if (config_hash(*config) != hash) rep.problems.push_back(m.filename().string() + ": config hash differs from the given config");
    }
    const json files = j.value("files", json::object());
    for (const auto& [name, digest] : files.items()) {
      ++rep.files;
      const auto path = directory / name;
      if (!std::filesystem::exists(path)) {
        rep.problems.push_back(name + ": missing");
        continue;
      }
      const std::string text = read_text_file(path);
      if (sha256_hex(text) != digest.get<std::string>()) rep.problems.push_back(name + ": content changed");
      if (embedded_hash(text) != hash) rep.problems.push_back(name + ": embedded config hash differs");
    }
  }
  if (!matched_config) rep.problems.push_back("no manifest for stem '" + config->output.stem + "'");
  return rep;
}

}  // namespace rotor
