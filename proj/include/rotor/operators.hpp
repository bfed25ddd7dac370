#pragma once

// Matrix elements of angular observables in the truncated Y_l^m basis.
//
// The kick potentials are expanded in spherical harmonics,
//   cos^2 t              = (4/3) sqrt(pi/5) Y_2^0 + 1/3
//   sin^2 t cos^2 p      = sqrt(2 pi/15) (Y_2^2 + Y_2^-2) - (2/3) sqrt(pi/5) Y_2^0 + 1/3
//   cos p sin t cos t    = sqrt(2 pi/15) (Y_2^-1 - Y_2^1)
// and each Y_2^q piece is evaluated with ylm_braket.  Constant terms are kept,
// so the operators are exact Galerkin projections of the functions.

#include "rotor/basis.hpp"
#include "rotor/sparse.hpp"

namespace rotor {

SparseHermitianOperator build_cos2theta_operator(const Basis& basis);

/// sin^2 t cos^2 p.
SparseHermitianOperator build_sin2theta_cos2phi_operator(const Basis& basis);

/// sin^2 t sin^2 p.
SparseHermitianOperator build_sin2theta_sin2phi_operator(const Basis& basis);

/// cos p sin t cos t.
SparseHermitianOperator build_cross_term_operator(const Basis& basis);

/// Pieces of cos^2(beta) for a polarization vector in the xz-plane at angle
/// theta_p from z:
///   cos^2 beta = sin^2 theta_p * in_plane + cos^2 theta_p * axial
///                + sin(2 theta_p) * cross.
struct TiltedKickComponents {
  SparseHermitianOperator in_plane;  // sin^2 t cos^2 p
  SparseHermitianOperator axial;     // cos^2 t
  SparseHermitianOperator cross;     // cos p sin t cos t

  explicit TiltedKickComponents(const Basis& basis);
  SparseHermitianOperator combine(double pol_angle) const;
};

SparseHermitianOperator build_tilted_kick_operator(const Basis& basis, double pol_angle);

/// Angular momentum components in units of hbar, from the ladder operators
/// <l, m+-1|J_+-|l, m> = sqrt(l(l+1) - m(m+-1)).
SparseHermitianOperator build_jx_operator(const Basis& basis);
SparseHermitianOperator build_jy_operator(const Basis& basis);
SparseHermitianOperator build_jz_operator(const Basis& basis);

/// <Y_l^m| e^{2 i p} |Y_l'^{m-2}> for every (l, m) and every l' of matching
/// parity; all other entries are absent.  Row index is (l, m), column (l', m-2).
/// Elements use normalized_overlap: the closed-form sum for l + l' up to
/// kWongQuadratureThreshold, batched Gauss-Legendre quadrature above it.
SparseMatrix build_exp_i2phi_elements(const Basis& basis);

/// <psi|cos^2 p|psi> = 1/2 + Re <psi|e^{2ip}|psi> / 2 with the matrix above.
double cos2phi_from_elements(const SparseMatrix& exp_i2phi, std::span<const cplx> psi);

}  // namespace rotor
