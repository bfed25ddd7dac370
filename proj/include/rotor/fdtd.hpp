#pragma once

// Grid solver: azimuthal Fourier channels f_m(theta) on the pole-shifted grid
// theta_i = (i + 1/2) pi / n, psi = sum_m f_m(theta) e^{i m phi} / (2 pi).
//
// Free evolution is Crank-Nicolson on the central-difference Hamiltonian
//   (H f)_i = -1/2 [ (f_{i-1} - 2 f_i + f_{i+1}) / d^2
//                    + (f_{i+1} - f_{i-1}) / (2 d tan theta_i) - m^2 f_i / sin^2 theta_i ]
// with ghost values f_{-1} = (-1)^m f_0 and f_n = (-1)^m f_{n-1} folded into
// the end rows.  H is not symmetric, but D H is for the positive weights
// d_{i+1} = d_i H_{i,i+1} / H_{i+1,i}; Crank-Nicolson is exactly unitary in
// that inner product ("scheme norm").
//
// Observables use Fejer's first rule in cos(theta) on the same nodes, which
// integrates sin(theta) * polynomial(cos theta) exactly up to degree n - 1.

#include <fftw3.h>

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "rotor/basis.hpp"
#include "rotor/execution.hpp"
#include "rotor/spectral.hpp"

namespace rotor {

/// Test hook: `flipped` uses -(-1)^m in the ghost closure.
enum class GhostParity { standard, flipped };

struct GridConfig {
  int n_theta = 512;
  int n_phi = 256;
  int m_max = 64;
  double delta_tau = 1e-4;
  GhostParity ghost = GhostParity::standard;

  double delta_theta() const noexcept;
  double theta(int i) const noexcept;
  void validate() const;
};

/// Solves a tridiagonal system by forward elimination and back substitution.
/// lower[0] and upper[n-1] are ignored.  Throws NumericalError on a zero pivot.
std::vector<cplx> tridiag_solve(std::span<const cplx> lower, std::span<const cplx> diag,
                                std::span<const cplx> upper, std::span<const cplx> rhs);

/// Forward elimination done once for a fixed matrix; solve() is then a sweep.
class TridiagonalFactorization {
 public:
  TridiagonalFactorization() = default;
  TridiagonalFactorization(std::span<const cplx> lower, std::span<const cplx> diag,
                           std::span<const cplx> upper);

  std::size_t size() const noexcept { return inv_pivot_.size(); }

  /// x <- A^{-1} x
  void solve_in_place(std::span<cplx> x) const;

 private:
  std::vector<cplx> lower_;
  std::vector<cplx> upper_scaled_;  // c_i / pivot_i
  std::vector<cplx> inv_pivot_;
};

/// Real tridiagonal H for channel m (lower, diag, upper; unused corners zero).
struct ChannelHamiltonian {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;
};

ChannelHamiltonian channel_hamiltonian(const GridConfig& cfg, int m);

/// Weights d_i making D H symmetric, normalized so sum d_i = 2 (like a
/// quadrature rule for the integral over cos theta).
std::vector<double> symmetrizing_weights(const ChannelHamiltonian& h);

/// Fejer first-rule weights for the midpoint nodes (sum = 2).
std::vector<double> fejer_weights(int n_theta);

class GridWavefunction {
 public:
  explicit GridWavefunction(const GridConfig& cfg);

  const GridConfig& config() const noexcept { return cfg_; }
  int m_max() const noexcept { return cfg_.m_max; }
  int n_theta() const noexcept { return cfg_.n_theta; }

  std::span<cplx> channel(int m);
  std::span<const cplx> channel(int m) const;

  /// True when channel m holds any nonzero value.
  bool occupied(int m) const;

  double clock() const noexcept { return clock_; }
  void set_clock(double t) noexcept { clock_ = t; }

 private:
  GridConfig cfg_;
  std::vector<cplx> data_;  // channel-major, (m + m_max) * n_theta + i
  double clock_ = 0.0;
};

/// f_m(theta_i) = 2 pi N_lm P_l^m(cos theta_i) in channel m.
GridWavefunction grid_from_eigenstate(int l, int m, const GridConfig& cfg);

/// Samples an arbitrary spectral wavepacket onto the grid.
GridWavefunction grid_from_wavepacket(const Wavepacket& w, const GridConfig& cfg);

/// Crank-Nicolson propagator: one factorization per |m| <= m_max.
class CrankNicolson {
 public:
  explicit CrankNicolson(const GridConfig& cfg);

  const GridConfig& config() const noexcept { return cfg_; }

  /// Advances every occupied channel by delta_tau, `steps` times.
  void step(GridWavefunction& state, int steps = 1, Execution exec = Execution::serial) const;

  /// Scheme weights of channel m (see symmetrizing_weights).
  const std::vector<double>& scheme_weights(int m) const;

 private:
  struct Channel {
    TridiagonalFactorization factor;
    std::vector<double> weights;
  };
  const Channel& channel(int abs_m) const;
  void advance_channel(std::span<cplx> f, const TridiagonalFactorization& factor, int steps) const;

  GridConfig cfg_;
  std::vector<Channel> channels_;  // index |m|
};

/// One Crank-Nicolson step with a propagator built for cfg.
void cn_step(GridWavefunction& state, const GridConfig& cfg);

/// Advances by a fixed interval in ceil(interval / delta_tau) equal steps, so
/// sample times land exactly on a prescribed grid.
class IntervalPropagator {
 public:
  IntervalPropagator(const GridConfig& cfg, double interval);

  double interval() const noexcept { return interval_; }
  int steps() const noexcept { return steps_; }
  void advance(GridWavefunction& state, Execution exec = Execution::serial) const;

 private:
  double interval_;
  int steps_;
  CrankNicolson cn_;
};

/// Pointwise exp(i P cos^2 beta) on the (theta, phi) grid via FFTW.
/// Channels left holding only transform round-off (norm below 1e-24) are
/// cleared so free propagation skips them.
/// Throws TruncationError if the outermost channels end up above 1e-8.
class GridKicker {
 public:
  explicit GridKicker(const GridConfig& cfg);
  ~GridKicker();
  GridKicker(const GridKicker&) = delete;
  GridKicker& operator=(const GridKicker&) = delete;

  void apply(GridWavefunction& state, const PulseSpec& pulse, Execution exec = Execution::serial,
             double truncation_tolerance = 1e-8) const;

 private:
  GridConfig cfg_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

GridWavefunction apply_kick_grid(const GridWavefunction& state, const PulseSpec& pulse);

/// Norm with the Fejer rule: sum_m int |f_m|^2 sin(theta) d theta / (2 pi).
double grid_norm(const GridWavefunction& state);
double channel_norm(const GridWavefunction& state, int m);

/// Norm in the Crank-Nicolson scheme weights; conserved to rounding by cn_step.
double scheme_norm(const GridWavefunction& state, const CrankNicolson& cn);

/// <cos^2 theta> and <cos^2 phi> from the analytic phi integrals.
double grid_cos2theta(const GridWavefunction& state);
double grid_cos2phi(const GridWavefunction& state);

/// Quadrature of |psi|^2 B(theta, phi) over the (theta, phi) grid.
double observable_on_grid(const GridWavefunction& state, const std::function<double(double, double)>& b);

/// Projection onto Y_l^m for l <= l_max with the Fejer rule.
/// Throws TruncationError if the recovered norm falls short of the grid norm
/// by more than `tolerance`.
Wavepacket project_to_spectral(const GridWavefunction& state, int l_max, double tolerance = 1e-6);

double expect_jy_grid(const GridWavefunction& state, int l_max);

/// <a|b> = sum_m int conj(f_m^a) f_m^b sin(theta) d theta / (2 pi) with the Fejer rule.
cplx grid_overlap(const GridWavefunction& a, const GridWavefunction& b);

}  // namespace rotor
