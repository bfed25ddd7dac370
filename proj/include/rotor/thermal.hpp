#pragma once

// Boltzmann-weighted initial populations for a gas of linear rotors.

#include <span>
#include <string>
#include <vector>

#include "rotor/series.hpp"

namespace rotor {

struct MoleculeSpec {
  std::string name;
  double b_wavenumber = 0.0;   // rotational constant, cm^-1
  double delta_alpha = 0.0;    // polarizability anisotropy, cubic angstrom (optional)
  double spin_weight_even = 1.0;
  double spin_weight_odd = 1.0;

  void validate() const;

  /// T_rev = 1 / (2 B c) in picoseconds.
  double revival_time_ps() const;
};

struct EnsembleMember {
  int l = 0;
  int m = 0;
  double weight = 0.0;
};

struct EnsembleSpec {
  MoleculeSpec molecule;
  double temperature_k = 0.0;
  double weight_cutoff = 1e-6;  // relative to the largest per-state weight
};

/// Every (l, m) with weight g(l) exp(-hcB l(l+1) / kT) above the cutoff,
/// ordered by l then m, renormalized to unit sum.
std::vector<EnsembleMember> build_ensemble(const EnsembleSpec& spec);

/// Merges each (l, -m) member into (l, m), m > 0, doubling the weight.  Valid
/// for observables invariant under y -> -y (cos^2 theta, cos^2 phi, J_y) when
/// every pulse is polarized in the xz-plane.
std::vector<EnsembleMember> fold_mirror_members(std::span<const EnsembleMember> members);

int max_member_l(std::span<const EnsembleMember> members);

/// Pointwise weighted sum in ascending member order.
ObservableSeries thermal_average(std::span<const ObservableSeries> series, std::span<const double> weights);

}  // namespace rotor
