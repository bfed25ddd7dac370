#pragma once

// Wavepacket propagation in the truncated Y_l^m basis.
//
// Units: hbar = I = 1, so E_l = l(l+1)/2 and the revival period is 2 pi.
// A kick multiplies the state by exp(i P cos^2 beta) where beta is the angle
// between the molecular axis and a polarization vector in the xz-plane.

#include <span>
#include <vector>

#include "rotor/basis.hpp"
#include "rotor/execution.hpp"
#include "rotor/sparse.hpp"

namespace rotor {

inline constexpr double kRevivalPeriod = 6.283185307179586476925286766559;

struct PulseSpec {
  double strength = 0.0;   // dimensionless P
  double pol_angle = 0.0;  // radians from z inside the xz-plane
  double time = 0.0;       // dimensionless

  void validate() const;
};

class Wavepacket {
 public:
  explicit Wavepacket(int l_max);

  const Basis& basis() const noexcept { return basis_; }
  int l_max() const noexcept { return basis_.l_max(); }
  std::size_t size() const noexcept { return coeffs_.size(); }

  std::span<cplx> coeffs() noexcept { return coeffs_; }
  std::span<const cplx> coeffs() const noexcept { return coeffs_; }
  cplx coeff(int l, int m) const { return coeffs_[basis_.index(l, m)]; }

  double clock() const noexcept { return clock_; }
  void set_clock(double t) noexcept { clock_ = t; }

  double norm_squared() const noexcept;

  /// Population summed over the shells l >= l_min.
  double shell_population(int l_min) const noexcept;

  /// Smallest and largest m carrying a nonzero coefficient; {1, 0} if empty.
  std::pair<int, int> m_support() const noexcept;

 private:
  Basis basis_;
  std::vector<cplx> coeffs_;
  double clock_ = 0.0;
};

Wavepacket init_eigenstate(int l, int m, int l_max);

/// P = delta_alpha / (4 hbar) * integral eps(t)^2 dt, all SI:
/// delta_alpha in C m^2 / V, fluence integral in V^2 s / m^2.
double kick_strength_from_fluence(double delta_alpha, double fluence_integral);

/// Polarizability volume in cubic angstrom to C m^2 / V (times 4 pi eps0).
double polarizability_from_volume(double angstrom3);

enum class KickIntegrator {
  taylor,  // Taylor series of the kick flow, short fixed steps
  rk4,     // classical Runge-Kutta with an a-priori step count
};

struct KickOptions {
  KickIntegrator integrator = KickIntegrator::taylor;
  double norm_tolerance = 1e-10;
  double truncation_tolerance = 1e-8;  // population allowed in the two top shells
  bool check_truncation = true;
};

/// The kick generator cos^2 beta for one polarization angle on one basis.
/// Built once and shared read-only by every wavepacket kicked at that angle.
class KickOperator {
 public:
  KickOperator(const Basis& basis, double pol_angle);
  explicit KickOperator(SparseHermitianOperator op);

  const SparseHermitianOperator& op() const noexcept { return op_; }

 private:
  SparseHermitianOperator op_;
};

/// state <- exp(i P K) state, integrating dC/dtau = i P K C over tau in [0, 1].
/// The flow is run on K - 1/2 (spectrum inside [-1/2, 1/2]) and the dropped
/// global phase exp(i P / 2) is restored at the end.  Only m blocks reachable
/// from the current support are touched.
/// Throws TruncationError if the two top shells end up populated beyond the
/// tolerance and NumericalError if the norm drifts.
void apply_kick(Wavepacket& state, const KickOperator& kick, double strength,
                const KickOptions& options = {});

/// Convenience overload building the operator for pulse.pol_angle.
Wavepacket apply_kick(const Wavepacket& state, const PulseSpec& pulse,
                      const KickOptions& options = {});

/// Steps used by the integrators for a given strength.
int taylor_step_count(double strength);
int rk4_step_count(double strength, double tolerance = 1e-12);

/// C_lm <- exp(-i l(l+1) dt / 2) C_lm; the clock advances by dt.
/// dt is reduced modulo 2 pi first, so whole revivals are exact.
void free_propagate(Wavepacket& state, double dt);

/// Operators for every observable on one basis, built once per basis.
struct ObservableOperators {
  explicit ObservableOperators(const Basis& basis);

  Basis basis;
  SparseHermitianOperator cos2theta;
  SparseMatrix exp_i2phi;
  SparseHermitianOperator cos2phi;  // 1/2 + (e^{2ip} + e^{-2ip}) / 4
  SparseHermitianOperator jx;
  SparseHermitianOperator jy;
  SparseHermitianOperator jz;
};

enum class Axis { x, y, z };

double expect_cos2theta(const Wavepacket& state, const ObservableOperators& ops);
double expect_cos2phi(const Wavepacket& state, const ObservableOperators& ops);
double expect_angular_momentum(const Wavepacket& state, const ObservableOperators& ops, Axis axis);

/// Free-evolution spectrum of an expectation value.
///
/// Under free rotation <O>(t0 + s) = sum_k A_k e^{i k s} over integer
/// k = E_a - E_b, with A_{-k} = conj(A_k).  Only k >= 0 is stored.  Spectra of
/// several states add linearly, which is how thermal averages are formed.
class FrequencySpectrum {
 public:
  FrequencySpectrum() = default;
  FrequencySpectrum(int k_max, double origin);

  int k_max() const noexcept { return static_cast<int>(amplitudes_.size()) - 1; }
  double origin() const noexcept { return origin_; }
  std::span<const cplx> amplitudes() const noexcept { return amplitudes_; }

  /// Adds weight * <psi|O|psi>(t) for the free evolution of psi.
  void accumulate(const SparseHermitianOperator& op, std::span<const cplx> psi, double weight);
  void add(const FrequencySpectrum& other, double weight = 1.0);

  /// Value at absolute time t.
  double value(double t) const;
  std::vector<double> values(std::span<const double> times) const;

  /// A_0, the average over one revival.
  double mean() const noexcept { return amplitudes_.empty() ? 0.0 : amplitudes_[0].real(); }

  /// Largest |A_k| for k > 0.
  double max_oscillating_amplitude() const noexcept;

 private:
  std::vector<cplx> amplitudes_;
  double origin_ = 0.0;
};

/// Largest k that can occur on a basis: l_max(l_max+1)/2.
int max_frequency(int l_max);

}  // namespace rotor
