#include "rotor/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "rotor/errors.hpp"

namespace rotor {

namespace {
constexpr double kSecondRadiationConstant = 1.438776877;  // hc/k, cm K
constexpr double kLightSpeedCm = 2.99792458e10;          // cm / s
}  // namespace

void MoleculeSpec::validate() const {
  if (!(b_wavenumber > 0.0)) throw ConfigError("molecule '" + name + "': rotational constant must be > 0");
  if (spin_weight_even < 0.0 || spin_weight_odd < 0.0) {
    throw ConfigError("molecule '" + name + "': spin weights must be >= 0");
  }
  if (spin_weight_even == 0.0 && spin_weight_odd == 0.0) {
    throw ConfigError("molecule '" + name + "': spin weights are both zero");
  }
}

double MoleculeSpec::revival_time_ps() const { return 1e12 / (2.0 * b_wavenumber * kLightSpeedCm); }

std::vector<EnsembleMember> build_ensemble(const EnsembleSpec& spec) {
  spec.molecule.validate();
  if (!(spec.temperature_k > 0.0)) throw ConfigError("temperature must be > 0 K");
  if (!(spec.weight_cutoff > 0.0 && spec.weight_cutoff < 1.0)) throw ConfigError("weight cutoff must lie in (0, 1)");

  const double beta = kSecondRadiationConstant * spec.molecule.b_wavenumber / spec.temperature_k;
  auto log_weight = [&](int l) {
    const double g = (l % 2 == 0) ? spec.molecule.spin_weight_even : spec.molecule.spin_weight_odd;
    if (g == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(g) - beta * l * (l + 1.0);
  };

  // energy grows with l, so the largest per-state weight sits at l = 0 or 1
  const double best = std::max(log_weight(0), log_weight(1));
  const double log_cut = best + std::log(spec.weight_cutoff);
  const double log_g_max = std::log(std::max(spec.molecule.spin_weight_even, spec.molecule.spin_weight_odd));

  std::vector<EnsembleMember> out;
  for (int l = 0; log_g_max - beta * l * (l + 1.0) >= log_cut; ++l) {
    const double lw = log_weight(l);
    if (!(lw >= log_cut)) continue;
    for (int m = -l; m <= l; ++m) out.push_back({l, m, std::exp(lw - best)});
  }
  if (out.empty()) throw ConfigError("ensemble is empty after the weight cutoff");
  double z = 0.0;
  for (const auto& e : out) z += e.weight;
  for (auto& e : out) e.weight /= z;
  return out;
}

std::vector<EnsembleMember> fold_mirror_members(std::span<const EnsembleMember> members) {
  std::map<std::pair<int, int>, double> merged;
  for (const auto& e : members) merged[{e.l, std::abs(e.m)}] += e.weight;
  std::vector<EnsembleMember> out;
  out.reserve(merged.size());
  for (const auto& [key, w] : merged) out.push_back({key.first, key.second, w});
  return out;
}

int max_member_l(std::span<const EnsembleMember> members) {
  int l = 0;
  for (const auto& e : members) l = std::max(l, e.l);
  return l;
}

ObservableSeries thermal_average(std::span<const ObservableSeries> series, std::span<const double> weights) {
  if (series.empty()) throw DomainError("thermal_average: no series");
  if (series.size() != weights.size()) throw DomainError("thermal_average: one weight per series required");
  ObservableSeries out;
  out.name = series.front().name;
  out.times = series.front().times;
  out.meta = series.front().meta;
  out.values.assign(out.times.size(), 0.0);
  for (std::size_t s = 0; s < series.size(); ++s) {
    if (series[s].times != out.times) throw DomainError("thermal_average: time grids differ");
    if (series[s].values.size() != out.times.size()) throw DomainError("thermal_average: malformed series");
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += weights[s] * series[s].values[i];
  }
  return out;
}

}  // namespace rotor
