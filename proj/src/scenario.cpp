#include "rotor/scenario.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>

#include "parallel_for.hpp"
#include "rotor/angular.hpp"
#include "rotor/errors.hpp"
#include "rotor/operators.hpp"

namespace rotor {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxLMax = 240;

std::string num(double v) { return fmt::format("{:.12g}", v); }

std::vector<EnsembleMember> prepared_members(std::span<const EnsembleMember> members, bool fold) {
  if (members.empty()) throw ConfigError("ensemble has no members");
  if (fold) return fold_mirror_members(members);
  return {members.begin(), members.end()};
}

int initial_l_max(std::span<const EnsembleMember> members, double p_total, const RunOptions& options) {
  const int headroom = options.l_headroom > 0 ? options.l_headroom : default_l_headroom(p_total);
  return max_member_l(members) + headroom;
}

int grown_l_max(int l_max, int thermal_l) {
  const int headroom = l_max - thermal_l;
  return thermal_l + headroom + headroom / 2 + 4;
}

// Retries `run(l_max)` with a larger basis while kicks report truncation.
template <class Run>
auto with_growing_basis(int l_max, int thermal_l, Run&& run) {
  while (true) {
    try {
      return run(l_max);
    } catch (const TruncationError&) {
      const int next = grown_l_max(l_max, thermal_l);
      if (next > kMaxLMax) throw;
      l_max = next;
    }
  }
}

double reduce_ordered(std::span<const double> values, std::span<const EnsembleMember> members) {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += members[i].weight * values[i];
  return s;
}

std::vector<double> sample_times(double start, const SamplingSpec& sampling) {
  const int n = sampling.sample_count();
  std::vector<double> t(static_cast<std::size_t>(n));
  const double dt = kTwoPi / sampling.samples_per_revival;
  for (int k = 0; k < n; ++k) t[static_cast<std::size_t>(k)] = start + k * dt;
  return t;
}

double pulse2_time_for(const DoublePulseProtocol& p, const FrequencySpectrum& alignment) {
  switch (p.delay_mode) {
    case DelayMode::explicit_delay:
      return p.delay;
    case DelayMode::auto_quarter:
      return 0.25 * kTwoPi;
    case DelayMode::auto_peak:
      return find_alignment_peak(alignment);
  }
  return p.delay;
}

std::map<std::string, std::string> protocol_meta(const DoublePulseProtocol& p, double t2, std::size_t members,
                                                 const RunOptions& options, int l_max) {
  std::map<std::string, std::string> meta{
      {"engine", to_string(p.engine)},         {"p1", num(p.p1)},
      {"p2", num(p.p2)},                       {"pol_angle_rad", num(p.pol_angle)},
      {"delay_mode", to_string(p.delay_mode)}, {"pulse2_time", num(t2)},
      {"members", std::to_string(members)},    {"mirror_folded", options.fold_mirror ? "true" : "false"},
      {"l_max", std::to_string(l_max)},
  };
  if (p.engine == Engine::fdtd) {
    meta["grid_n_theta"] = std::to_string(p.grid.n_theta);
    meta["grid_n_phi"] = std::to_string(p.grid.n_phi);
    meta["grid_m_max"] = std::to_string(p.grid.m_max);
    meta["grid_delta_tau"] = num(p.grid.delta_tau);
  }
  return meta;
}

ObservableSeries make_series(std::string name, std::vector<double> times, std::vector<double> values,
                             const std::map<std::string, std::string>& meta) {
  ObservableSeries s;
  s.name = std::move(name);
  s.times = std::move(times);
  s.values = std::move(values);
  s.meta = meta;
  s.validate();
  return s;
}

ProtocolResult run_spectral(const DoublePulseProtocol& p, const std::vector<EnsembleMember>& members,
                            const RunOptions& options, int l_max) {
  const PulseOneCache cache(p.p1, members, l_max, options.exec);
  const double t2 = pulse2_time_for(p, cache.alignment());
  const Basis& basis = cache.states().front().basis();
  const ObservableOperators ops(basis);
  const KickOperator kick2(basis, p.pol_angle);

  struct Named {
    std::string name;
    const SparseHermitianOperator* op;
  };
  std::vector<Named> observables{{"cos2theta", &ops.cos2theta}, {"cos2phi", &ops.cos2phi}, {"jy", &ops.jy}};
  if (!options.fold_mirror) {
    observables.push_back({"jx", &ops.jx});
    observables.push_back({"jz", &ops.jz});
  }

  const std::size_t n = members.size();
  const int k_max = max_frequency(l_max);
  std::vector<std::vector<FrequencySpectrum>> per_member(n);
  detail::for_each_index(n, options.exec, [&](std::size_t i) {
    Wavepacket w = cache.states()[i];
    free_propagate(w, t2);
    apply_kick(w, kick2, p.p2);
    auto& spectra = per_member[i];
    for (const auto& o : observables) {
      FrequencySpectrum s(k_max, t2);
      s.accumulate(*o.op, w.coeffs(), 1.0);
      spectra.push_back(std::move(s));
    }
  });

  ProtocolResult r;
  r.pulse2_time = t2;
  r.peak_alignment = cache.alignment().value(t2);
  r.l_max = l_max;
  const auto meta = protocol_meta(p, t2, n, options, l_max);
  const auto times = sample_times(t2, p.sampling);
  for (std::size_t k = 0; k < observables.size(); ++k) {
    FrequencySpectrum total(k_max, t2);
    for (std::size_t i = 0; i < n; ++i) total.add(per_member[i][k], members[i].weight);
    if (observables[k].name == "cos2phi") r.cos2phi_revival_mean = total.mean();
    r.series.push_back(make_series(observables[k].name, times, total.values(times), meta));
  }

  const auto& jy = r.get("jy");
  r.final_jy = jy.values.front();
  for (double v : jy.values) r.jy_variation = std::max(r.jy_variation, std::abs(v - r.final_jy));
  if (r.jy_variation > 1e-8 * std::max(std::abs(r.final_jy), 1e-12)) {
    throw NumericalError(fmt::format("<J_y> varies by {:.3e} after the last pulse (value {:.6e})", r.jy_variation,
                                     r.final_jy));
  }
  return r;
}

ProtocolResult run_fdtd(const DoublePulseProtocol& p, const std::vector<EnsembleMember>& members,
                        const RunOptions& options, int l_max) {
  const GridConfig& cfg = p.grid;
  cfg.validate();
  for (const auto& m : members) {
    if (std::abs(m.m) > cfg.m_max) throw ConfigError("grid m_max is below an ensemble member's |m|");
  }
  // pulse-2 timing comes from the exact alignment curve so both engines kick at the same instant
  double t2 = p.delay;
  if (p.delay_mode != DelayMode::explicit_delay) {
    t2 = pulse2_time_for(p, alignment_spectrum(p.p1, members, options));
  }
  const GridKicker kicker(cfg);
  const IntervalPropagator to_pulse2(cfg, t2);
  const IntervalPropagator between(cfg, kTwoPi / p.sampling.samples_per_revival);
  const int n_samples = p.sampling.sample_count();
  const int jy_stride = std::max(1, p.sampling.samples_per_revival / 32);

  const std::size_t n = members.size();
  std::vector<std::vector<double>> c2t(n), c2p(n), jy(n);
  std::vector<double> peak(n);
  detail::for_each_index(n, options.exec, [&](std::size_t i) {
    auto g = grid_from_eigenstate(members[i].l, members[i].m, cfg);
    kicker.apply(g, {p.p1, 0.0, 0.0});
    to_pulse2.advance(g);
    peak[i] = grid_cos2theta(g);
    kicker.apply(g, {p.p2, p.pol_angle, t2});
    for (int k = 0; k < n_samples; ++k) {
      if (k > 0) between.advance(g);
      c2t[i].push_back(grid_cos2theta(g));
      c2p[i].push_back(grid_cos2phi(g));
      if (k % jy_stride == 0) jy[i].push_back(expect_jy_grid(g, l_max));
    }
  });

  auto thermal = [&](const std::vector<std::vector<double>>& v) {
    std::vector<double> out(v.front().size(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < out.size(); ++k) out[k] += members[i].weight * v[i][k];
    return out;
  };

  ProtocolResult r;
  r.pulse2_time = t2;
  r.peak_alignment = reduce_ordered(peak, members);
  r.l_max = l_max;
  const auto meta = protocol_meta(p, t2, n, options, l_max);
  const auto times = sample_times(t2, p.sampling);
  std::vector<double> jy_times;
  for (std::size_t k = 0; k < times.size(); k += static_cast<std::size_t>(jy_stride)) jy_times.push_back(times[k]);
  r.series.push_back(make_series("cos2theta", times, thermal(c2t), meta));
  r.series.push_back(make_series("cos2phi", times, thermal(c2p), meta));
  r.series.push_back(make_series("jy", jy_times, thermal(jy), meta));
  const auto& c = r.get("cos2phi").values;
  double mean = 0.0;
  for (int k = 0; k < p.sampling.samples_per_revival && k < static_cast<int>(c.size()); ++k) mean += c[static_cast<std::size_t>(k)];
  r.cos2phi_revival_mean = mean / std::min<int>(p.sampling.samples_per_revival, static_cast<int>(c.size()));
  const auto& j = r.get("jy").values;
  r.final_jy = j.front();
  for (double v : j) r.jy_variation = std::max(r.jy_variation, std::abs(v - r.final_jy));
  return r;
}

}  // namespace

std::string to_string(Engine e) { return e == Engine::spectral ? "spectral" : "fdtd"; }

std::string to_string(DelayMode d) {
  switch (d) {
    case DelayMode::explicit_delay:
      return "explicit";
    case DelayMode::auto_peak:
      return "auto-peak";
    case DelayMode::auto_quarter:
      return "auto-quarter";
  }
  return "explicit";
}

int SamplingSpec::sample_count() const {
  if (samples_per_revival < 4) throw ConfigError("sampling: samples_per_revival must be at least 4");
  if (!(revivals > 0.0) || !std::isfinite(revivals)) throw ConfigError("sampling: revivals must be > 0");
  return static_cast<int>(std::lround(samples_per_revival * revivals));
}

void DoublePulseProtocol::validate() const {
  if (!(p1 >= 0.0) || !(p2 >= 0.0) || !std::isfinite(p1) || !std::isfinite(p2)) {
    throw ConfigError("protocol: pulse strengths must be finite and >= 0");
  }
  if (!std::isfinite(pol_angle) || std::abs(pol_angle) > kPi / 2.0 + 1e-12) {
    throw ConfigError("protocol: pulse-2 angle must lie in [-90, 90] degrees");
  }
  if (delay_mode == DelayMode::explicit_delay && (!(delay > 0.0) || !std::isfinite(delay))) {
    throw ConfigError("protocol: explicit delay must be > 0");
  }
  (void)sampling.sample_count();
  if (engine == Engine::fdtd) grid.validate();
}

int default_l_headroom(double p_total) { return 12 + static_cast<int>(std::ceil(1.5 * p_total)); }

const ObservableSeries& ProtocolResult::get(const std::string& name) const {
  for (const auto& s : series)
    if (s.name == name) return s;
  throw DomainError("protocol result has no series '" + name + "'");
}

PulseOneCache::PulseOneCache(double p1, std::span<const EnsembleMember> members, int l_max, Execution exec)
    : p1_(p1), l_max_(l_max), members_(members.begin(), members.end()) {
  if (members_.empty()) throw ConfigError("ensemble has no members");
  if (max_member_l(members_) > l_max) throw DomainError("pulse-1 cache: l_max below the thermal shells");
  const Basis basis(l_max);
  jy_ = std::make_shared<const SparseHermitianOperator>(build_jy_operator(basis));
  const KickOperator kick1(basis, 0.0);
  const auto cos2theta = build_cos2theta_operator(basis);
  const std::size_t n = members_.size();
  states_.assign(n, Wavepacket(l_max));
  std::vector<FrequencySpectrum> spectra(n);
  const int k_max = max_frequency(l_max);
  detail::for_each_index(n, exec, [&](std::size_t i) {
    Wavepacket w = init_eigenstate(members_[i].l, members_[i].m, l_max);
    apply_kick(w, kick1, p1);
    spectra[i] = FrequencySpectrum(k_max, 0.0);
    spectra[i].accumulate(cos2theta, w.coeffs(), 1.0);
    states_[i] = std::move(w);
  });
  alignment_ = FrequencySpectrum(k_max, 0.0);
  for (std::size_t i = 0; i < n; ++i) alignment_.add(spectra[i], members_[i].weight);
}

FrequencySpectrum alignment_spectrum(double p1, std::span<const EnsembleMember> members, const RunOptions& options) {
  const auto used = prepared_members(members, options.fold_mirror);
  const int thermal_l = max_member_l(used);
  return with_growing_basis(initial_l_max(used, p1, options), thermal_l, [&](int l_max) {
    return PulseOneCache(p1, used, l_max, options.exec).alignment();
  });
}

double find_alignment_peak(const FrequencySpectrum& alignment, const PeakSearch& search) {
  if (!(search.window_lo < search.window_hi) || !(search.resolution > 0.0)) {
    throw DomainError("peak search: empty window or bad resolution");
  }
  const int n = static_cast<int>(std::lround((search.window_hi - search.window_lo) / search.resolution));
  std::vector<double> times(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) times[static_cast<std::size_t>(i)] = (search.window_lo + i * search.resolution) * kTwoPi;
  const auto v = alignment.values(times);
  const auto best = static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
  if (best == 0 || best == n) {
    throw DomainError(fmt::format("alignment maximum lies on the search-window edge at t = {:.6f} T_rev",
                                  times[static_cast<std::size_t>(best)] / kTwoPi));
  }
  const double ym = v[static_cast<std::size_t>(best - 1)];
  const double y0 = v[static_cast<std::size_t>(best)];
  const double yp = v[static_cast<std::size_t>(best + 1)];
  const double curvature = ym - 2.0 * y0 + yp;
  const double shift = curvature < 0.0 ? 0.5 * (ym - yp) / curvature : 0.0;
  return times[static_cast<std::size_t>(best)] + shift * search.resolution * kTwoPi;
}

double find_alignment_peak(double p1, std::span<const EnsembleMember> members, const PeakSearch& search,
                           const RunOptions& options) {
  if (!(p1 > 0.0)) throw DomainError("alignment peak needs P1 > 0");
  return find_alignment_peak(alignment_spectrum(p1, members, options), search);
}

ProtocolResult run_protocol(const DoublePulseProtocol& protocol, std::span<const EnsembleMember> members,
                            const RunOptions& options) {
  protocol.validate();
  const auto used = prepared_members(members, options.fold_mirror);
  const int thermal_l = max_member_l(used);
  const int start = initial_l_max(used, protocol.p1 + protocol.p2, options);
  return with_growing_basis(start, thermal_l, [&](int l_max) {
    return protocol.engine == Engine::spectral ? run_spectral(protocol, used, options, l_max)
                                               : run_fdtd(protocol, used, options, l_max);
  });
}

double final_jy(const PulseOneCache& cache, double delay, double p2, const KickOperator& kick2, Execution exec) {
  const auto states = cache.states();
  const auto members = cache.members();
  std::vector<double> values(states.size());
  detail::for_each_index(states.size(), exec, [&](std::size_t i) {
    Wavepacket w = states[i];
    free_propagate(w, delay);
    apply_kick(w, kick2, p2);
    values[i] = cache.jy_operator().expectation(w.coeffs());
  });
  return reduce_ordered(values, members);
}

double final_jy(const PulseOneCache& cache, double delay, double p2, double pol_angle, Execution exec) {
  const KickOperator kick2(cache.states().front().basis(), pol_angle);
  return final_jy(cache, delay, p2, kick2, exec);
}

Curve scan_polarization_angle(double p1, double p2, std::span<const EnsembleMember> members,
                              std::span<const double> angles, const RunOptions& options) {
  const auto used = prepared_members(members, options.fold_mirror);
  const int thermal_l = max_member_l(used);
  return with_growing_basis(initial_l_max(used, p1 + p2, options), thermal_l, [&](int l_max) {
    const PulseOneCache cache(p1, used, l_max, options.exec);
    const double t2 = find_alignment_peak(cache.alignment());
    Curve c;
    c.x_name = "pol_angle_rad";
    c.meta = {{"p1", num(p1)}, {"p2", num(p2)}, {"pulse2_time", num(t2)}, {"l_max", std::to_string(l_max)}};
    for (double a : angles) {
      if (std::abs(a) > kPi / 2.0 + 1e-12) throw ConfigError("angle scan: angles must lie in [-90, 90] degrees");
      c.x.push_back(a);
      c.y.push_back(final_jy(cache, t2, p2, a, options.exec));
    }
    return c;
  });
}

StrengthSurface scan_pulse_strengths(std::span<const EnsembleMember> members, std::span<const double> p1_list,
                                     std::span<const double> p2_list, const RunOptions& options) {
  const auto used = prepared_members(members, options.fold_mirror);
  const int thermal_l = max_member_l(used);
  double p2_max = 0.0;
  for (double v : p2_list) {
    if (!(v >= 0.0)) throw ConfigError("strength scan: P2 must be >= 0");
    p2_max = std::max(p2_max, v);
  }
  StrengthSurface s;
  s.p1.assign(p1_list.begin(), p1_list.end());
  s.p2.assign(p2_list.begin(), p2_list.end());
  for (double p1 : p1_list) {
    if (!(p1 > 0.0)) throw ConfigError("strength scan: P1 must be > 0");
    auto row = with_growing_basis(initial_l_max(used, p1 + p2_max, options), thermal_l, [&](int l_max) {
      const PulseOneCache cache(p1, used, l_max, options.exec);
      const double t2 = find_alignment_peak(cache.alignment());
      const KickOperator kick2(Basis(l_max), kPi / 4.0);
      std::vector<double> jy;
      for (double p2 : p2_list) jy.push_back(final_jy(cache, t2, p2, kick2, options.exec));
      return std::tuple{std::move(jy), cache.alignment().value(t2), t2};
    });
    s.jy.push_back(std::move(std::get<0>(row)));
    s.max_alignment.push_back(std::get<1>(row));
    s.peak_time.push_back(std::get<2>(row));
  }
  return s;
}

Curve scan_fixed_budget(std::span<const EnsembleMember> members, double p_total, std::span<const double> differences,
                        const RunOptions& options) {
  const auto used = prepared_members(members, options.fold_mirror);
  const int thermal_l = max_member_l(used);
  Curve c;
  c.x_name = "p1_minus_p2";
  c.meta = {{"p_total", num(p_total)}};
  for (double d : differences) {
    const double p1 = 0.5 * (p_total + d);
    const double p2 = 0.5 * (p_total - d);
    if (!(p1 > 0.0) || !(p2 >= 0.0)) throw ConfigError("budget scan: |P1 - P2| must stay below the budget");
    const double jy = with_growing_basis(initial_l_max(used, p_total, options), thermal_l, [&](int l_max) {
      const PulseOneCache cache(p1, used, l_max, options.exec);
      return final_jy(cache, find_alignment_peak(cache.alignment()), p2, kPi / 4.0, options.exec);
    });
    c.x.push_back(d);
    c.y.push_back(jy);
  }
  return c;
}

Curve scan_delay(double p1, double p2, std::span<const EnsembleMember> members, double center, double halfwidth,
                 int n_points, const RunOptions& options) {
  if (n_points < 2) throw ConfigError("delay scan: need at least two points");
  if (!(center - halfwidth > 0.0) || !(center + halfwidth < kTwoPi)) {
    throw ConfigError("delay scan: window must lie inside one revival");
  }
  const auto used = prepared_members(members, options.fold_mirror);
  const int thermal_l = max_member_l(used);
  return with_growing_basis(initial_l_max(used, p1 + p2, options), thermal_l, [&](int l_max) {
    const PulseOneCache cache(p1, used, l_max, options.exec);
    const KickOperator kick2(Basis(l_max), kPi / 4.0);
    Curve c;
    c.x_name = "delay";
    c.meta = {{"p1", num(p1)}, {"p2", num(p2)}, {"center", num(center)}, {"l_max", std::to_string(l_max)}};
    for (int i = 0; i < n_points; ++i) {
      const double t = center - halfwidth + 2.0 * halfwidth * i / (n_points - 1);
      c.x.push_back(t);
      c.y.push_back(final_jy(cache, t, p2, kick2, options.exec));
    }
    return c;
  });
}

DensityGrid revival_averaged_distribution(const DoublePulseProtocol& protocol, std::span<const EnsembleMember> members,
                                          int n_theta, int n_phi, const RunOptions& options) {
  protocol.validate();
  if (n_theta < 2 || n_phi < 4) throw ConfigError("density grid too small");
  const auto used = prepared_members(members, options.fold_mirror);
  const int thermal_l = max_member_l(used);

  // states just after pulse 2; a mirror-folded member stands for (l, m) and (l, -m)
  struct Prepared {
    std::vector<Wavepacket> states;
    int l_max;
  };
  const auto prepared = with_growing_basis(initial_l_max(used, protocol.p1 + protocol.p2, options), thermal_l,
                                           [&](int l_max) {
    const PulseOneCache cache(protocol.p1, used, l_max, options.exec);
    const double t2 = pulse2_time_for(protocol, cache.alignment());
    const KickOperator kick2(Basis(l_max), protocol.pol_angle);
    Prepared out{std::vector<Wavepacket>(used.size(), Wavepacket(l_max)), l_max};
    detail::for_each_index(used.size(), options.exec, [&](std::size_t i) {
      Wavepacket w = cache.states()[i];
      free_propagate(w, t2);
      apply_kick(w, kick2, protocol.p2);
      out.states[i] = std::move(w);
    });
    return out;
  });
  const int l_max = prepared.l_max;
  const Basis basis(l_max);

  DensityGrid grid;
  const double dt = kPi / n_theta;
  const double dp = kTwoPi / n_phi;
  for (int i = 0; i < n_theta; ++i) grid.theta.push_back((i + 0.5) * dt);
  for (int j = 0; j < n_phi; ++j) grid.phi.push_back((j + 0.5) * dp);
  grid.values.assign(static_cast<std::size_t>(n_theta) * static_cast<std::size_t>(n_phi), 0.0);

  fftw_complex* probe = fftw_alloc_complex(static_cast<std::size_t>(n_phi));
  const fftw_plan plan = fftw_plan_dft_1d(n_phi, probe, probe, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(probe);

  // |sum_m a_m e^{i m phi_j}|^2 for every shell via one backward transform per shell;
  // m is wrapped modulo n_phi, which is exact on the sample points
  detail::for_each_index(static_cast<std::size_t>(n_theta), options.exec, [&](std::size_t i) {
    const NormalizedLegendreTable table(l_max, std::cos(grid.theta[i]));
    std::vector<cplx> row(static_cast<std::size_t>(n_phi));
    std::vector<double> acc(static_cast<std::size_t>(n_phi), 0.0);
    auto* buf = reinterpret_cast<fftw_complex*>(row.data());
    for (std::size_t k = 0; k < used.size(); ++k) {
      const auto& w = prepared.states[k];
      const bool mirrored = options.fold_mirror && used[k].m != 0;
      const double weight = used[k].weight * (mirrored ? 0.5 : 1.0);
      for (int l = 0; l <= l_max; ++l) {
        std::fill(row.begin(), row.end(), cplx(0.0));
        bool any = false;
        for (int m = -l; m <= l; ++m) {
          const cplx c = w.coeffs()[basis.index_unchecked(l, m)];
          if (c == cplx(0.0)) continue;
          any = true;
          const auto slot = static_cast<std::size_t>(((m % n_phi) + n_phi) % n_phi);
          row[slot] += c * table(l, m) * std::polar(1.0, 0.5 * m * dp);
        }
        if (!any) continue;
        fftw_execute_dft(plan, buf, buf);
        for (int j = 0; j < n_phi; ++j) {
          const double v = std::norm(row[static_cast<std::size_t>(j)]);
          acc[static_cast<std::size_t>(j)] += weight * v;
          // the folded partner (l, -m) has the mirror image density phi -> -phi
          if (mirrored) acc[static_cast<std::size_t>(n_phi - 1 - j)] += weight * v;
        }
      }
    }
    std::copy(acc.begin(), acc.end(), grid.values.begin() + static_cast<std::ptrdiff_t>(i * grid.phi.size()));
  });
  fftw_destroy_plan(plan);

  double integral = 0.0;
  for (int i = 0; i < n_theta; ++i)
    for (int j = 0; j < n_phi; ++j) integral += grid.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) *
                                                std::sin(grid.theta[static_cast<std::size_t>(i)]) * dt * dp;
  grid.raw_integral = integral;
  for (double& v : grid.values) v /= integral;
  for (int i = 0; i < n_theta; ++i)
    for (int j = 0; j < n_phi; ++j) {
      const double c = std::cos(grid.phi[static_cast<std::size_t>(j)]);
      grid.cos2phi += grid.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) * c * c *
                      std::sin(grid.theta[static_cast<std::size_t>(i)]) * dt * dp;
    }
  return grid;
}

FractionalRevivalReport analyze_fractional_revivals(const ObservableSeries& series, std::span<const double> fractions,
                                                    double window) {
  series.validate();
  const std::size_t n = series.times.size();
  if (n < 16) throw DomainError("fractional revival analysis needs a sampled revival");
  if (!(window > 0.0)) throw DomainError("fractional revival analysis: window must be > 0");
  const double t0 = series.times.front();
  const double step = (series.times[1] - t0) / kTwoPi;
  const auto half = static_cast<std::ptrdiff_t>(std::lround(window / step));
  if (half < 1 || static_cast<std::size_t>(2 * half + 1) >= n) throw DomainError("fractional revival window does not fit the series");

  FractionalRevivalReport report;
  for (double v : series.values) report.mean += v;
  report.mean /= static_cast<double>(n);

  // remove the slow background with a periodic moving average as wide as the feature window
  std::vector<double> detail(n);
  const auto sn = static_cast<std::ptrdiff_t>(n);
  for (std::ptrdiff_t k = 0; k < sn; ++k) {
    double s = 0.0;
    for (std::ptrdiff_t j = -half; j <= half; ++j) s += series.values[static_cast<std::size_t>(((k + j) % sn + sn) % sn)];
    detail[static_cast<std::size_t>(k)] = series.values[static_cast<std::size_t>(k)] - s / static_cast<double>(2 * half + 1);
  }

  auto fraction_of = [&](std::size_t k) { return (series.times[k] - t0) / kTwoPi; };
  auto near_feature = [&](double f) {
    for (int q = 1; q <= 8; ++q)
      for (int p = 0; p <= q; ++p)
        if (std::abs(f - static_cast<double>(p) / q) <= window) return true;
    return false;
  };
  std::vector<double> quiet;
  for (std::size_t k = 0; k < n; ++k)
    if (!near_feature(fraction_of(k))) quiet.push_back(std::abs(detail[k]));
  if (quiet.empty()) throw DomainError("fractional revival analysis: no samples away from features");
  std::nth_element(quiet.begin(), quiet.begin() + static_cast<std::ptrdiff_t>(quiet.size() / 2), quiet.end());
  report.noise_floor = quiet[quiet.size() / 2];

  for (double frac : fractions) {
    FractionalFeature feat;
    feat.fraction = frac;
    for (std::size_t k = 0; k < n; ++k)
      if (std::abs(fraction_of(k) - frac) <= window) feat.amplitude = std::max(feat.amplitude, std::abs(detail[k]));
    feat.snr = report.noise_floor > 0.0 ? feat.amplitude / report.noise_floor : INFINITY;
    report.features.push_back(feat);
  }
  return report;
}

}  // namespace rotor
