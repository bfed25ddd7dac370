#include "rotor/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rotor/errors.hpp"
#include "rotor/operators.hpp"

namespace rotor {

namespace {

constexpr double kHbar = 1.054571817e-34;        // J s
constexpr double kEpsilon0 = 8.8541878128e-12;   // F / m

double reduce_angle(double x) {
  double r = std::fmod(x, kRevivalPeriod);
  if (r < 0.0) r += kRevivalPeriod;
  return r;
}

long rotational_integer(int l) { return static_cast<long>(l) * (l + 1) / 2; }

double squared_norm(std::span<const cplx> v) {
  double s = 0.0;
  for (const auto& c : v) s += std::norm(c);
  return s;
}

// Rows of blocks [lo, hi] are the only ones written; everything else in y must
// already be zero (the support only ever grows during one kick).
struct Support {
  int lo;
  int hi;
};

Support widen(Support s, int by, int l_max) {
  return {std::max(-l_max, s.lo - by), std::min(l_max, s.hi + by)};
}

// y = (K - 1/2) x on the rows of the widened support.
void shifted_apply(const SparseHermitianOperator& k, std::span<const cplx> x, std::span<cplx> y,
                   Support s) {
  const Basis& b = k.basis();
  k.apply(x, y, s.lo, s.hi, Execution::serial);
  const Support w = widen(s, k.m_bandwidth(), b.l_max());
  for (auto i = b.block_begin(w.lo); i < b.block_end(w.hi); ++i) y[i] -= 0.5 * x[i];
}

void taylor_kick(std::span<cplx> psi, const SparseHermitianOperator& k, double strength, Support s) {
  const int steps = taylor_step_count(strength);
  const double h = strength / steps;
  const int l_max = k.basis().l_max();
  const int bw = k.m_bandwidth();
  std::vector<cplx> term(psi.size());
  std::vector<cplx> next(psi.size(), 0.0);

  for (int step = 0; step < steps; ++step) {
    std::copy(psi.begin(), psi.end(), term.begin());
    for (int n = 1; n < 200; ++n) {
      shifted_apply(k, term, next, s);
      s = widen(s, bw, l_max);
      const cplx factor(0.0, h / n);
      double size = 0.0;
      const auto begin = k.basis().block_begin(s.lo);
      const auto end = k.basis().block_end(s.hi);
      for (auto i = begin; i < end; ++i) {
        term[i] = factor * next[i];
        psi[i] += term[i];
        size = std::max(size, std::abs(term[i]));
      }
      if (size < 1e-18) break;
    }
  }
}

void rk4_kick(std::span<cplx> psi, const SparseHermitianOperator& k, double strength, Support s) {
  const int steps = rk4_step_count(strength);
  const double h = 1.0 / steps;
  const int l_max = k.basis().l_max();
  const int bw = k.m_bandwidth();
  const std::size_t n = psi.size();
  std::vector<cplx> k1(n, 0.0), k2(n, 0.0), k3(n, 0.0), k4(n, 0.0), tmp(n, 0.0);
  const cplx ip(0.0, strength);

  for (int step = 0; step < steps; ++step) {
    const Support s1 = widen(s, bw, l_max);
    const Support s2 = widen(s1, bw, l_max);
    const Support s3 = widen(s2, bw, l_max);
    const Support s4 = widen(s3, bw, l_max);
    const auto& basis = k.basis();
    auto range = [&](Support r, auto&& f) {
      for (auto i = basis.block_begin(r.lo); i < basis.block_end(r.hi); ++i) f(i);
    };
    shifted_apply(k, psi, k1, s);
    range(s1, [&](std::size_t i) { k1[i] *= ip; tmp[i] = psi[i] + 0.5 * h * k1[i]; });
    shifted_apply(k, tmp, k2, s1);
    range(s2, [&](std::size_t i) { k2[i] *= ip; tmp[i] = psi[i] + 0.5 * h * k2[i]; });
    shifted_apply(k, tmp, k3, s2);
    range(s3, [&](std::size_t i) { k3[i] *= ip; tmp[i] = psi[i] + h * k3[i]; });
    shifted_apply(k, tmp, k4, s3);
    range(s4, [&](std::size_t i) {
      k4[i] *= ip;
      psi[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    });
    s = s4;
  }
}

}  // namespace

void PulseSpec::validate() const {
  if (!(strength >= 0.0) || !std::isfinite(strength)) throw DomainError("pulse strength must be >= 0");
  if (!(std::abs(pol_angle) <= std::numbers::pi / 2 + 1e-12)) {
    throw DomainError("pulse polarization angle must lie in [-pi/2, pi/2]");
  }
  if (!std::isfinite(time)) throw DomainError("pulse time must be finite");
}

Wavepacket::Wavepacket(int l_max) : basis_(l_max), coeffs_(basis_.size(), 0.0) {}

double Wavepacket::norm_squared() const noexcept { return squared_norm(coeffs_); }

double Wavepacket::shell_population(int l_min) const noexcept {
  double s = 0.0;
  const int l_max = basis_.l_max();
  for (int m = -l_max; m <= l_max; ++m)
    for (int l = std::max(l_min, std::abs(m)); l <= l_max; ++l)
      s += std::norm(coeffs_[basis_.index_unchecked(l, m)]);
  return s;
}

std::pair<int, int> Wavepacket::m_support() const noexcept {
  int lo = 1;
  int hi = 0;
  const int l_max = basis_.l_max();
  for (int m = -l_max; m <= l_max; ++m) {
    const bool occupied = std::any_of(coeffs_.begin() + static_cast<std::ptrdiff_t>(basis_.block_begin(m)),
                                      coeffs_.begin() + static_cast<std::ptrdiff_t>(basis_.block_end(m)),
                                      [](const cplx& c) { return c != cplx(0.0); });
    if (!occupied) continue;
    if (lo > hi) lo = m;
    hi = m;
  }
  return {lo, hi};
}

Wavepacket init_eigenstate(int l, int m, int l_max) {
  if (l < 0 || std::abs(m) > l) throw DomainError("init_eigenstate: need |m| <= l");
  if (l > l_max) throw DomainError("init_eigenstate: l exceeds l_max");
  Wavepacket w(l_max);
  w.coeffs()[w.basis().index(l, m)] = 1.0;
  return w;
}

double kick_strength_from_fluence(double delta_alpha, double fluence_integral) {
  if (!(delta_alpha >= 0.0) || !(fluence_integral >= 0.0)) {
    throw DomainError("kick strength: inputs must be non-negative");
  }
  return delta_alpha / (4.0 * kHbar) * fluence_integral;
}

double polarizability_from_volume(double angstrom3) {
  return 4.0 * std::numbers::pi * kEpsilon0 * angstrom3 * 1e-30;
}

int taylor_step_count(double strength) {
  // each step exponentiates a generator of norm <= 1
  return std::max(1, static_cast<int>(std::ceil(0.5 * strength)));
}

int rk4_step_count(double strength, double tolerance) {
  // global error of RK4 on a skew generator of norm a is about a^5 / (120 N^4)
  const double a = 0.5 * strength;
  const double n = a * std::pow(a / (120.0 * tolerance), 0.25);
  return std::max(64, static_cast<int>(std::ceil(n)));
}

KickOperator::KickOperator(const Basis& basis, double pol_angle)
    : op_(build_tilted_kick_operator(basis, pol_angle)) {}

KickOperator::KickOperator(SparseHermitianOperator op) : op_(std::move(op)) {}

void apply_kick(Wavepacket& state, const KickOperator& kick, double strength, const KickOptions& options) {
  if (!(strength >= 0.0)) throw DomainError("kick strength must be >= 0");
  if (!(kick.op().basis() == state.basis())) throw DomainError("kick operator built for another basis");
  if (strength == 0.0) return;

  const auto [lo, hi] = state.m_support();
  if (lo > hi) return;
  const double before = state.norm_squared();
  const Support s{lo, hi};
  if (options.integrator == KickIntegrator::taylor) {
    taylor_kick(state.coeffs(), kick.op(), strength, s);
  } else {
    rk4_kick(state.coeffs(), kick.op(), strength, s);
  }
  const cplx phase = std::polar(1.0, 0.5 * strength);
  for (auto& c : state.coeffs()) c *= phase;

  const double after = state.norm_squared();
  if (std::abs(std::sqrt(after) - std::sqrt(before)) > options.norm_tolerance) {
    throw NumericalError("kick changed the norm by " + std::to_string(std::sqrt(after) - std::sqrt(before)));
  }
  if (options.check_truncation && state.l_max() >= 1) {
    const double top = state.shell_population(state.l_max() - 1);
    if (top > options.truncation_tolerance * after) {
      throw TruncationError("kick populated the top shells of l_max = " + std::to_string(state.l_max()) +
                            " with " + std::to_string(top) + "; rebuild with a larger basis");
    }
  }
}

Wavepacket apply_kick(const Wavepacket& state, const PulseSpec& pulse, const KickOptions& options) {
  pulse.validate();
  Wavepacket out = state;
  apply_kick(out, KickOperator(state.basis(), pulse.pol_angle), pulse.strength, options);
  return out;
}

void free_propagate(Wavepacket& state, double dt) {
  const double r = reduce_angle(dt);
  const Basis& b = state.basis();
  const int l_max = b.l_max();
  std::vector<cplx> phase(static_cast<std::size_t>(l_max) + 1);
  for (int l = 0; l <= l_max; ++l) {
    const double angle = reduce_angle(static_cast<double>(rotational_integer(l)) * r);
    phase[static_cast<std::size_t>(l)] = r == 0.0 ? cplx(1.0) : std::polar(1.0, -angle);
  }
  auto c = state.coeffs();
  for (int m = -l_max; m <= l_max; ++m)
    for (int l = std::abs(m); l <= l_max; ++l) c[b.index_unchecked(l, m)] *= phase[static_cast<std::size_t>(l)];
  state.set_clock(state.clock() + dt);
}

namespace {

SparseHermitianOperator cos2phi_operator(const Basis& basis, const SparseMatrix& e) {
  std::vector<SparseMatrix::Entry> entries;
  for (std::size_t i = 0; i < basis.size(); ++i) entries.push_back({i, i, 0.5});
  for (const auto& en : e.entries()) {
    entries.push_back({en.row, en.col, 0.25 * en.value});
    entries.push_back({en.col, en.row, 0.25 * std::conj(en.value)});
  }
  return SparseHermitianOperator(basis, std::move(entries));
}

}  // namespace

ObservableOperators::ObservableOperators(const Basis& b)
    : basis(b),
      cos2theta(build_cos2theta_operator(b)),
      exp_i2phi(build_exp_i2phi_elements(b)),
      cos2phi(cos2phi_operator(b, exp_i2phi)),
      jx(build_jx_operator(b)),
      jy(build_jy_operator(b)),
      jz(build_jz_operator(b)) {}

double expect_cos2theta(const Wavepacket& state, const ObservableOperators& ops) {
  return ops.cos2theta.expectation(state.coeffs());
}

double expect_cos2phi(const Wavepacket& state, const ObservableOperators& ops) {
  return cos2phi_from_elements(ops.exp_i2phi, state.coeffs());
}

double expect_angular_momentum(const Wavepacket& state, const ObservableOperators& ops, Axis axis) {
  switch (axis) {
    case Axis::x: return ops.jx.expectation(state.coeffs());
    case Axis::y: return ops.jy.expectation(state.coeffs());
    case Axis::z: return ops.jz.expectation(state.coeffs());
  }
  return 0.0;
}

int max_frequency(int l_max) { return static_cast<int>(rotational_integer(l_max)); }

FrequencySpectrum::FrequencySpectrum(int k_max, double origin)
    : amplitudes_(static_cast<std::size_t>(k_max) + 1, 0.0), origin_(origin) {}

void FrequencySpectrum::accumulate(const SparseHermitianOperator& op, std::span<const cplx> psi, double weight) {
  const Basis& b = op.basis();
  if (psi.size() != b.size()) throw DomainError("spectrum: state and operator sizes differ");
  if (max_frequency(b.l_max()) > k_max()) throw DomainError("spectrum: too few frequency bins");
  const auto& mat = op.matrix();
  const auto rp = mat.row_ptr();
  const auto ci = mat.col_index();
  const auto val = mat.values();
  std::vector<long> energy(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) energy[i] = rotational_integer(b.label(i).l);
  for (std::size_t r = 0; r < b.size(); ++r) {
    if (psi[r] == cplx(0.0)) continue;
    const cplx bra = weight * std::conj(psi[r]);
    for (auto k = rp[r]; k < rp[r + 1]; ++k) {
      const long dk = energy[r] - energy[ci[k]];
      if (dk < 0) continue;
      amplitudes_[static_cast<std::size_t>(dk)] += bra * val[k] * psi[ci[k]];
    }
  }
}

void FrequencySpectrum::add(const FrequencySpectrum& other, double weight) {
  if (other.amplitudes_.size() > amplitudes_.size()) amplitudes_.resize(other.amplitudes_.size(), 0.0);
  for (std::size_t k = 0; k < other.amplitudes_.size(); ++k) amplitudes_[k] += weight * other.amplitudes_[k];
}

double FrequencySpectrum::value(double t) const {
  if (amplitudes_.empty()) return 0.0;
  const double s = reduce_angle(t - origin_);
  double total = 0.0;
  for (std::size_t k = amplitudes_.size() - 1; k >= 1; --k) {
    if (amplitudes_[k] == cplx(0.0)) continue;
    total += (amplitudes_[k] * std::polar(1.0, reduce_angle(static_cast<double>(k) * s))).real();
  }
  return amplitudes_[0].real() + 2.0 * total;
}

std::vector<double> FrequencySpectrum::values(std::span<const double> times) const {
  std::vector<double> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) out[i] = value(times[i]);
  return out;
}

double FrequencySpectrum::max_oscillating_amplitude() const noexcept {
  double worst = 0.0;
  for (std::size_t k = 1; k < amplitudes_.size(); ++k) worst = std::max(worst, std::abs(amplitudes_[k]));
  return worst;
}

}  // namespace rotor
