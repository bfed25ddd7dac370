#pragma once

// Double-pulse protocol and the scans built on it.  Pulse 1 (strength P1) is
// polarized along z at t = 0; pulse 2 (P2, angle theta_p in the xz-plane)
// follows after a delay.  All times are dimensionless (revival period 2 pi).

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rotor/execution.hpp"
#include "rotor/fdtd.hpp"
#include "rotor/series.hpp"
#include "rotor/spectral.hpp"
#include "rotor/thermal.hpp"

namespace rotor {

enum class Engine { spectral, fdtd };
enum class DelayMode { explicit_delay, auto_peak, auto_quarter };

std::string to_string(Engine e);
std::string to_string(DelayMode d);

struct SamplingSpec {
  int samples_per_revival = 2048;
  double revivals = 1.0;
  int sample_count() const;
};

struct DoublePulseProtocol {
  double p1 = 0.0;
  double p2 = 0.0;
  double pol_angle = 0.0;  // of pulse 2, radians
  DelayMode delay_mode = DelayMode::auto_peak;
  double delay = 0.0;  // used with DelayMode::explicit_delay
  Engine engine = Engine::spectral;
  SamplingSpec sampling;
  GridConfig grid;  // fdtd only

  void validate() const;
};

struct RunOptions {
  Execution exec = Execution::serial;
  /// Merge (l, -m) into (l, m).  Leaves cos2theta, cos2phi and jy unchanged;
  /// jx and jz are only emitted for unfolded runs.
  bool fold_mirror = true;
  /// Extra shells above the largest thermal l; 0 picks a rule based on P1 + P2.
  int l_headroom = 0;
};

/// Shells added above the thermal l for kicks of total strength p_total.
int default_l_headroom(double p_total);

/// Thermal <cos^2 theta>(t) after pulse 1 alone, as a frequency spectrum.
FrequencySpectrum alignment_spectrum(double p1, std::span<const EnsembleMember> members, const RunOptions& options = {});

struct PeakSearch {
  double window_lo = 0.40;  // fractions of the revival period
  double window_hi = 0.50;
  double resolution = 1e-4;
};

/// Time of maximal thermal alignment inside the window, refined by a parabola
/// through the best sample and its neighbours.  Throws DomainError if the best
/// sample sits on a window edge.
double find_alignment_peak(const FrequencySpectrum& alignment, const PeakSearch& search = {});
double find_alignment_peak(double p1, std::span<const EnsembleMember> members, const PeakSearch& search = {},
                           const RunOptions& options = {});

struct ProtocolResult {
  double pulse2_time = 0.0;
  double peak_alignment = 0.0;  // thermal <cos^2 theta> at the pulse-2 time
  std::vector<ObservableSeries> series;  // cos2theta, cos2phi, jy (+ jx, jz unfolded)
  double final_jy = 0.0;
  double jy_variation = 0.0;  // max |jy(t) - final_jy| over the samples
  double cos2phi_revival_mean = 0.0;
  int l_max = 0;  // spectral basis used

  const ObservableSeries& get(const std::string& name) const;
};

/// Runs every member through kick, delay, kick, and samples thermal
/// observables from pulse 2 on.  Spectral runs throw NumericalError if jy
/// varies by more than 1e-8 relative after pulse 2.
ProtocolResult run_protocol(const DoublePulseProtocol& protocol, std::span<const EnsembleMember> members,
                            const RunOptions& options = {});

/// Pulse-1 states shared by scans that vary only pulse 2.
class PulseOneCache {
 public:
  PulseOneCache(double p1, std::span<const EnsembleMember> members, int l_max, Execution exec = Execution::serial);

  double p1() const noexcept { return p1_; }
  int l_max() const noexcept { return l_max_; }
  std::span<const EnsembleMember> members() const noexcept { return members_; }
  std::span<const Wavepacket> states() const noexcept { return states_; }
  const FrequencySpectrum& alignment() const noexcept { return alignment_; }
  const SparseHermitianOperator& jy_operator() const noexcept { return *jy_; }

 private:
  double p1_;
  int l_max_;
  std::shared_ptr<const SparseHermitianOperator> jy_;
  std::vector<EnsembleMember> members_;
  std::vector<Wavepacket> states_;  // after pulse 1, clock 0
  FrequencySpectrum alignment_;
};

/// Thermal <J_y> after pulse 2 at `delay` with strength p2 and angle theta_p.
double final_jy(const PulseOneCache& cache, double delay, double p2, double pol_angle,
                Execution exec = Execution::serial);
double final_jy(const PulseOneCache& cache, double delay, double p2, const KickOperator& kick2,
                Execution exec = Execution::serial);

struct Curve {
  std::string x_name;
  std::vector<double> x;
  std::vector<double> y;
  std::map<std::string, std::string> meta;
};

/// <J_y> against the pulse-2 angle (radians), pulse 2 at the alignment peak.
Curve scan_polarization_angle(double p1, double p2, std::span<const EnsembleMember> members,
                              std::span<const double> angles, const RunOptions& options = {});

struct StrengthSurface {
  std::vector<double> p1;
  std::vector<double> p2;
  std::vector<std::vector<double>> jy;  // [i_p1][i_p2]
  std::vector<double> max_alignment;    // per p1
  std::vector<double> peak_time;        // per p1
};

/// <J_y> over a (P1, P2) grid at 45 degrees with auto-peak timing.
StrengthSurface scan_pulse_strengths(std::span<const EnsembleMember> members, std::span<const double> p1_list,
                                     std::span<const double> p2_list, const RunOptions& options = {});

/// Fixed budget P1 + P2 = p_total; x is P1 - P2.
Curve scan_fixed_budget(std::span<const EnsembleMember> members, double p_total, std::span<const double> differences,
                        const RunOptions& options = {});

/// <J_y> against the pulse-2 delay on center +- halfwidth (n_points uniform).
Curve scan_delay(double p1, double p2, std::span<const EnsembleMember> members, double center, double halfwidth,
                 int n_points, const RunOptions& options = {});

struct DensityGrid {
  std::vector<double> theta;  // cell centres
  std::vector<double> phi;
  std::vector<double> values;  // row-major [i_theta * phi.size() + j_phi]
  double raw_integral = 0.0;   // midpoint integral before normalization (exact value 1)
  double cos2phi = 0.0;        // <cos^2 phi> implied by the grid
  double at(std::size_t i, std::size_t j) const { return values[i * phi.size() + j]; }
};

/// Probability density averaged over one revival after the protocol's second
/// pulse.  Free evolution only dephases different l, so the average is the sum
/// of per-shell densities.  p2 = p1 = 0 gives the isotropic distribution.
DensityGrid revival_averaged_distribution(const DoublePulseProtocol& protocol, std::span<const EnsembleMember> members,
                                          int n_theta, int n_phi, const RunOptions& options = {});

struct FractionalFeature {
  double fraction = 0.0;   // of the revival period, measured from the series start
  double amplitude = 0.0;  // largest |detail| within +- window
  double snr = 0.0;        // amplitude / noise floor
};

struct FractionalRevivalReport {
  double mean = 0.0;
  double noise_floor = 0.0;  // median |detail| away from every p/q with q <= 8
  std::vector<FractionalFeature> features;
};

/// Measures transient features of a one-revival series near the given
/// fractions.  "detail" is the series minus its periodic moving average over
/// +- window, so slow drifts of the background do not count as features.
FractionalRevivalReport analyze_fractional_revivals(const ObservableSeries& series, std::span<const double> fractions,
                                                    double window = 0.01);

}  // namespace rotor
