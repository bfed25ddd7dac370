#include "rotor/fdtd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rotor/angular.hpp"
#include "rotor/errors.hpp"
#include "rotor/operators.hpp"

namespace rotor {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

double GridConfig::delta_theta() const noexcept { return kPi / n_theta; }

double GridConfig::theta(int i) const noexcept { return (i + 0.5) * delta_theta(); }

void GridConfig::validate() const {
  if (n_theta < 4) throw ConfigError("grid: n_theta must be at least 4");
  if (n_phi < 4) throw ConfigError("grid: n_phi must be at least 4");
  if (m_max < 0 || 2 * m_max >= n_phi) throw ConfigError("grid: need 0 <= m_max < n_phi / 2");
  if (!(delta_tau > 0.0)) throw ConfigError("grid: delta_tau must be > 0");
}

std::vector<cplx> tridiag_solve(std::span<const cplx> lower, std::span<const cplx> diag,
                                std::span<const cplx> upper, std::span<const cplx> rhs) {
  const TridiagonalFactorization f(lower, diag, upper);
  if (rhs.size() != f.size()) throw DomainError("tridiag_solve: rhs length differs from the matrix");
  std::vector<cplx> x(rhs.begin(), rhs.end());
  f.solve_in_place(x);
  return x;
}

TridiagonalFactorization::TridiagonalFactorization(std::span<const cplx> lower, std::span<const cplx> diag,
                                                   std::span<const cplx> upper) {
  const std::size_t n = diag.size();
  if (n == 0) throw DomainError("tridiagonal system of size zero");
  if (lower.size() != n || upper.size() != n) throw DomainError("tridiagonal bands must have equal length");
  lower_.assign(lower.begin(), lower.end());
  upper_scaled_.resize(n);
  inv_pivot_.resize(n);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(diag[i]));
  cplx prev_upper = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const cplx pivot = i == 0 ? diag[0] : diag[i] - lower[i] * prev_upper;
    if (std::abs(pivot) <= 1e-300 || std::abs(pivot) < 1e-14 * scale) {
      throw NumericalError("tridiagonal pivot vanished at row " + std::to_string(i));
    }
    inv_pivot_[i] = 1.0 / pivot;
    upper_scaled_[i] = i + 1 < n ? upper[i] * inv_pivot_[i] : cplx(0.0);
    prev_upper = upper_scaled_[i];
  }
}

void TridiagonalFactorization::solve_in_place(std::span<cplx> x) const {
  const std::size_t n = inv_pivot_.size();
  x[0] *= inv_pivot_[0];
  for (std::size_t i = 1; i < n; ++i) x[i] = (x[i] - lower_[i] * x[i - 1]) * inv_pivot_[i];
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= upper_scaled_[i] * x[i + 1];
}

ChannelHamiltonian channel_hamiltonian(const GridConfig& cfg, int m) {
  const int n = cfg.n_theta;
  const double d = cfg.delta_theta();
  ChannelHamiltonian h;
  h.lower.resize(static_cast<std::size_t>(n));
  h.diag.resize(static_cast<std::size_t>(n));
  h.upper.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = cfg.theta(i);
    const double drift = 1.0 / (2.0 * d * std::tan(t));
    const auto k = static_cast<std::size_t>(i);
    h.lower[k] = -0.5 * (1.0 / (d * d) - drift);
    h.upper[k] = -0.5 * (1.0 / (d * d) + drift);
    h.diag[k] = 1.0 / (d * d) + 0.5 * m * m / (std::sin(t) * std::sin(t));
  }
  double parity = (m % 2 == 0) ? 1.0 : -1.0;
  if (cfg.ghost == GhostParity::flipped) parity = -parity;
  const auto last = static_cast<std::size_t>(n - 1);
  h.diag[0] += parity * h.lower[0];
  h.diag[last] += parity * h.upper[last];
  h.lower[0] = 0.0;
  h.upper[last] = 0.0;
  return h;
}

std::vector<double> symmetrizing_weights(const ChannelHamiltonian& h) {
  const std::size_t n = h.diag.size();
  std::vector<double> w(n);
  w[0] = 1.0;
  for (std::size_t i = 0; i + 1 < n; ++i) w[i + 1] = w[i] * h.upper[i] / h.lower[i + 1];
  double total = 0.0;
  for (double v : w) total += v;
  for (double& v : w) v *= 2.0 / total;
  return w;
}

std::vector<double> fejer_weights(int n_theta) {
  std::vector<double> w(static_cast<std::size_t>(n_theta));
  for (int i = 0; i < n_theta; ++i) {
    const double t = (i + 0.5) * kPi / n_theta;
    double s = 0.0;
    for (int j = 1; j <= n_theta / 2; ++j) s += std::cos(2.0 * j * t) / (4.0 * j * j - 1.0);
    w[static_cast<std::size_t>(i)] = 2.0 / n_theta * (1.0 - 2.0 * s);
  }
  return w;
}

GridWavefunction::GridWavefunction(const GridConfig& cfg)
    : cfg_(cfg), data_(static_cast<std::size_t>(2 * cfg.m_max + 1) * static_cast<std::size_t>(cfg.n_theta), 0.0) {
  cfg_.validate();
}

std::span<cplx> GridWavefunction::channel(int m) {
  if (std::abs(m) > cfg_.m_max) throw DomainError("grid channel outside m_max");
  const auto n = static_cast<std::size_t>(cfg_.n_theta);
  return {data_.data() + static_cast<std::size_t>(m + cfg_.m_max) * n, n};
}

std::span<const cplx> GridWavefunction::channel(int m) const {
  if (std::abs(m) > cfg_.m_max) throw DomainError("grid channel outside m_max");
  const auto n = static_cast<std::size_t>(cfg_.n_theta);
  return {data_.data() + static_cast<std::size_t>(m + cfg_.m_max) * n, n};
}

bool GridWavefunction::occupied(int m) const {
  const auto c = channel(m);
  return std::any_of(c.begin(), c.end(), [](const cplx& v) { return v != cplx(0.0); });
}

GridWavefunction grid_from_eigenstate(int l, int m, const GridConfig& cfg) {
  if (l < 0 || std::abs(m) > l) throw DomainError("grid_from_eigenstate: need |m| <= l");
  if (std::abs(m) > cfg.m_max) throw DomainError("grid_from_eigenstate: |m| exceeds m_max");
  GridWavefunction g(cfg);
  auto f = g.channel(m);
  for (int i = 0; i < cfg.n_theta; ++i) {
    f[static_cast<std::size_t>(i)] = kTwoPi * normalized_legendre(l, m, std::cos(cfg.theta(i)));
  }
  return g;
}

GridWavefunction grid_from_wavepacket(const Wavepacket& w, const GridConfig& cfg) {
  const Basis& b = w.basis();
  const int l_max = b.l_max();
  GridWavefunction g(cfg);
  for (int m = -l_max; m <= l_max; ++m) {
    bool any = false;
    for (int l = std::abs(m); l <= l_max; ++l) any = any || w.coeffs()[b.index_unchecked(l, m)] != cplx(0.0);
    if (!any) continue;
    if (std::abs(m) > cfg.m_max) throw DomainError("grid_from_wavepacket: occupied |m| exceeds m_max");
  }
  for (int i = 0; i < cfg.n_theta; ++i) {
    const NormalizedLegendreTable table(l_max, std::cos(cfg.theta(i)));
    for (int m = -std::min(l_max, cfg.m_max); m <= std::min(l_max, cfg.m_max); ++m) {
      cplx acc = 0.0;
      for (int l = std::abs(m); l <= l_max; ++l) acc += w.coeffs()[b.index_unchecked(l, m)] * table(l, m);
      g.channel(m)[static_cast<std::size_t>(i)] = kTwoPi * acc;
    }
  }
  g.set_clock(w.clock());
  return g;
}

CrankNicolson::CrankNicolson(const GridConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const cplx half_step(0.0, 0.5 * cfg.delta_tau);
  channels_.resize(static_cast<std::size_t>(cfg.m_max) + 1);
  for (int m = 0; m <= cfg.m_max; ++m) {
    const auto h = channel_hamiltonian(cfg, m);
    const std::size_t n = h.diag.size();
    std::vector<cplx> lo(n), di(n), up(n);
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = half_step * h.lower[i];
      di[i] = 1.0 + half_step * h.diag[i];
      up[i] = half_step * h.upper[i];
    }
    auto& ch = channels_[static_cast<std::size_t>(m)];
    ch.factor = TridiagonalFactorization(lo, di, up);
    ch.weights = symmetrizing_weights(h);
  }
}

const CrankNicolson::Channel& CrankNicolson::channel(int abs_m) const {
  if (abs_m > cfg_.m_max) throw DomainError("Crank-Nicolson: channel outside m_max");
  return channels_[static_cast<std::size_t>(abs_m)];
}

const std::vector<double>& CrankNicolson::scheme_weights(int m) const { return channel(std::abs(m)).weights; }

void CrankNicolson::advance_channel(std::span<cplx> f, const TridiagonalFactorization& factor, int steps) const {
  std::vector<cplx> chi(f.size());
  for (int s = 0; s < steps; ++s) {
    std::copy(f.begin(), f.end(), chi.begin());
    factor.solve_in_place(chi);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = 2.0 * chi[i] - f[i];
  }
}

void CrankNicolson::step(GridWavefunction& state, int steps, Execution exec) const {
  if (state.config().n_theta != cfg_.n_theta || state.m_max() > cfg_.m_max || state.config().ghost != cfg_.ghost) {
    throw DomainError("Crank-Nicolson: state built for a different grid");
  }
  if (steps <= 0) return;
  std::vector<int> active;
  for (int m = -state.m_max(); m <= state.m_max(); ++m)
    if (state.occupied(m)) active.push_back(m);
  const auto count = static_cast<std::ptrdiff_t>(active.size());
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
      const int m = active[static_cast<std::size_t>(k)];
      advance_channel(state.channel(m), channel(std::abs(m)).factor, steps);
    }
  } else {
    for (std::ptrdiff_t k = 0; k < count; ++k) {
      const int m = active[static_cast<std::size_t>(k)];
      advance_channel(state.channel(m), channel(std::abs(m)).factor, steps);
    }
  }
  state.set_clock(state.clock() + steps * cfg_.delta_tau);
}

void cn_step(GridWavefunction& state, const GridConfig& cfg) { CrankNicolson(cfg).step(state, 1); }

namespace {

GridConfig with_step(GridConfig cfg, double interval, int& steps) {
  if (!(interval > 0.0)) throw DomainError("interval propagator: interval must be > 0");
  steps = static_cast<int>(std::ceil(interval / cfg.delta_tau - 1e-9));
  cfg.delta_tau = interval / steps;
  return cfg;
}

}  // namespace

IntervalPropagator::IntervalPropagator(const GridConfig& cfg, double interval)
    : interval_(interval), steps_(0), cn_(with_step(cfg, interval, steps_)) {}

void IntervalPropagator::advance(GridWavefunction& state, Execution exec) const {
  const double clock = state.clock();
  cn_.step(state, steps_, exec);
  state.set_clock(clock + interval_);
}

GridKicker::GridKicker(const GridConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(cfg.n_phi));
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_ = fftw_plan_dft_1d(cfg.n_phi, buf, buf, FFTW_FORWARD, flags);
  backward_ = fftw_plan_dft_1d(cfg.n_phi, buf, buf, FFTW_BACKWARD, flags);
  fftw_free(buf);
  if (forward_ == nullptr || backward_ == nullptr) throw NumericalError("FFTW plan creation failed");
}

GridKicker::~GridKicker() {
  if (forward_ != nullptr) fftw_destroy_plan(forward_);
  if (backward_ != nullptr) fftw_destroy_plan(backward_);
}

void GridKicker::apply(GridWavefunction& state, const PulseSpec& pulse, Execution exec,
                       double truncation_tolerance) const {
  pulse.validate();
  if (state.config().n_theta != cfg_.n_theta || state.m_max() != cfg_.m_max || state.config().n_phi != cfg_.n_phi) {
    throw DomainError("grid kick: state built for a different grid");
  }
  if (pulse.strength == 0.0) return;
  const int n_theta = cfg_.n_theta;
  const int n_phi = cfg_.n_phi;
  const int m_max = cfg_.m_max;
  const double sp = std::sin(pulse.pol_angle);
  const double cp = std::cos(pulse.pol_angle);

  if (pulse.pol_angle == 0.0) {
    // phi independent: every channel takes the same pointwise phase
    for (int m = -m_max; m <= m_max; ++m) {
      if (!state.occupied(m)) continue;
      auto f = state.channel(m);
      for (int i = 0; i < n_theta; ++i) {
        const double c = std::cos(cfg_.theta(i));
        f[static_cast<std::size_t>(i)] *= std::polar(1.0, pulse.strength * c * c);
      }
    }
    return;
  }

  auto row = [&](int i, fftw_complex* buf) {
    auto* g = reinterpret_cast<cplx*>(buf);
    std::fill(g, g + n_phi, cplx(0.0));
    for (int m = -m_max; m <= m_max; ++m) g[(m + n_phi) % n_phi] = state.channel(m)[static_cast<std::size_t>(i)];
    fftw_execute_dft(backward_, buf, buf);
    const double t = cfg_.theta(i);
    const double st = std::sin(t);
    const double ct = std::cos(t);
    for (int j = 0; j < n_phi; ++j) {
      const double phi = kTwoPi * j / n_phi;
      const double cb = sp * st * std::cos(phi) + cp * ct;
      g[j] *= std::polar(1.0, pulse.strength * cb * cb);
    }
    fftw_execute_dft(forward_, buf, buf);
    const double inv = 1.0 / n_phi;
    for (int m = -m_max; m <= m_max; ++m) state.channel(m)[static_cast<std::size_t>(i)] = g[(m + n_phi) % n_phi] * inv;
  };

  if (exec == Execution::parallel) {
#pragma omp parallel
    {
      fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(n_phi));
#pragma omp for schedule(static)
      for (int i = 0; i < n_theta; ++i) row(i, buf);
      fftw_free(buf);
    }
  } else {
    fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(n_phi));
    for (int i = 0; i < n_theta; ++i) row(i, buf);
    fftw_free(buf);
  }

  for (int m = -m_max; m <= m_max; ++m) {
    if (channel_norm(state, m) < 1e-24) std::fill(state.channel(m).begin(), state.channel(m).end(), cplx(0.0));
  }

  if (m_max > 0) {
    const double edge = channel_norm(state, m_max) + channel_norm(state, -m_max);
    if (edge > truncation_tolerance) {
      throw TruncationError("grid kick populated the outermost channels |m| = " + std::to_string(m_max) +
                            " with " + std::to_string(edge) + "; raise m_max");
    }
  }
}

GridWavefunction apply_kick_grid(const GridWavefunction& state, const PulseSpec& pulse) {
  GridWavefunction out = state;
  GridKicker(state.config()).apply(out, pulse);
  return out;
}

namespace {

const std::vector<double>& cached_fejer(int n) {
  thread_local int cached_n = -1;
  thread_local std::vector<double> w;
  if (cached_n != n) {
    w = fejer_weights(n);
    cached_n = n;
  }
  return w;
}

}  // namespace

double channel_norm(const GridWavefunction& state, int m) {
  const auto& w = cached_fejer(state.n_theta());
  const auto f = state.channel(m);
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * std::norm(f[i]);
  return s / kTwoPi;
}

double grid_norm(const GridWavefunction& state) {
  double s = 0.0;
  for (int m = -state.m_max(); m <= state.m_max(); ++m) s += channel_norm(state, m);
  return s;
}

double scheme_norm(const GridWavefunction& state, const CrankNicolson& cn) {
  double s = 0.0;
  for (int m = -state.m_max(); m <= state.m_max(); ++m) {
    const auto& w = cn.scheme_weights(m);
    const auto f = state.channel(m);
    for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * std::norm(f[i]);
  }
  return s / kTwoPi;
}

double grid_cos2theta(const GridWavefunction& state) {
  const auto& w = cached_fejer(state.n_theta());
  const auto& cfg = state.config();
  double s = 0.0;
  for (int m = -state.m_max(); m <= state.m_max(); ++m) {
    const auto f = state.channel(m);
    for (int i = 0; i < cfg.n_theta; ++i) {
      const double c = std::cos(cfg.theta(i));
      s += w[static_cast<std::size_t>(i)] * c * c * std::norm(f[static_cast<std::size_t>(i)]);
    }
  }
  return s / kTwoPi;
}

double grid_cos2phi(const GridWavefunction& state) {
  // int cos^2 phi e^{i(m - m')phi} dphi keeps m' = m (weight 1/2) and m' = m +- 2 (1/4)
  const auto& w = cached_fejer(state.n_theta());
  double diag = 0.0;
  double cross = 0.0;
  for (int m = -state.m_max(); m <= state.m_max(); ++m) {
    const auto f = state.channel(m);
    for (std::size_t i = 0; i < f.size(); ++i) diag += w[i] * std::norm(f[i]);
    if (m - 2 < -state.m_max()) continue;
    const auto g = state.channel(m - 2);
    for (std::size_t i = 0; i < f.size(); ++i) cross += w[i] * (std::conj(g[i]) * f[i]).real();
  }
  return (0.5 * diag + 0.5 * cross) / kTwoPi;
}

double observable_on_grid(const GridWavefunction& state, const std::function<double(double, double)>& b) {
  const auto& cfg = state.config();
  const auto& w = cached_fejer(cfg.n_theta);
  std::vector<int> active;
  for (int m = -state.m_max(); m <= state.m_max(); ++m)
    if (state.occupied(m)) active.push_back(m);
  double total = 0.0;
  for (int i = 0; i < cfg.n_theta; ++i) {
    const double t = cfg.theta(i);
    double ring = 0.0;
    for (int j = 0; j < cfg.n_phi; ++j) {
      const double phi = kTwoPi * j / cfg.n_phi;
      cplx psi = 0.0;
      for (int m : active) psi += state.channel(m)[static_cast<std::size_t>(i)] * std::polar(1.0, m * phi);
      ring += std::norm(psi / kTwoPi) * b(t, phi);
    }
    total += w[static_cast<std::size_t>(i)] * ring * (kTwoPi / cfg.n_phi);
  }
  return total;
}

Wavepacket project_to_spectral(const GridWavefunction& state, int l_max, double tolerance) {
  const auto& cfg = state.config();
  const auto& w = cached_fejer(cfg.n_theta);
  Wavepacket out(l_max);
  const Basis& b = out.basis();
  const int top = std::min(l_max, state.m_max());
  for (int i = 0; i < cfg.n_theta; ++i) {
    const NormalizedLegendreTable table(l_max, std::cos(cfg.theta(i)));
    const double wi = w[static_cast<std::size_t>(i)];
    for (int m = -top; m <= top; ++m) {
      const cplx f = state.channel(m)[static_cast<std::size_t>(i)];
      if (f == cplx(0.0)) continue;
      for (int l = std::abs(m); l <= l_max; ++l) out.coeffs()[b.index_unchecked(l, m)] += wi * table(l, m) * f;
    }
  }
  out.set_clock(state.clock());
  const double recovered = out.norm_squared();
  const double total = grid_norm(state);
  if (recovered < total - tolerance) {
    throw TruncationError("spectral projection recovered " + std::to_string(recovered) + " of norm " +
                          std::to_string(total) + "; raise l_max");
  }
  return out;
}

double expect_jy_grid(const GridWavefunction& state, int l_max) {
  const Wavepacket w = project_to_spectral(state, l_max);
  return build_jy_operator(w.basis()).expectation(w.coeffs());
}

cplx grid_overlap(const GridWavefunction& a, const GridWavefunction& b) {
  if (a.n_theta() != b.n_theta() || a.m_max() != b.m_max()) throw DomainError("grid_overlap: grids differ");
  const auto& w = cached_fejer(a.n_theta());
  cplx s = 0.0;
  for (int m = -a.m_max(); m <= a.m_max(); ++m) {
    const auto f = a.channel(m);
    const auto g = b.channel(m);
    for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * std::conj(f[i]) * g[i];
  }
  return s / kTwoPi;
}

}  // namespace rotor
