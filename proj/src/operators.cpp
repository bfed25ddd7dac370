#include "rotor/operators.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "rotor/angular.hpp"

namespace rotor {

namespace {

constexpr double kPi = std::numbers::pi;

/// Coefficients of f = constant + sum_q c_q Y_2^q, q = -2..2.
struct QuadrupoleExpansion {
  double constant = 0.0;
  std::array<double, 5> c{};  // index q + 2
};

SparseHermitianOperator build_from_expansion(const Basis& basis, const QuadrupoleExpansion& f) {
  const int l_max = basis.l_max();
  std::vector<SparseMatrix::Entry> entries;
  entries.reserve(basis.size() * 15);
  for (int m = -l_max; m <= l_max; ++m) {
    for (int l = std::abs(m); l <= l_max; ++l) {
      const auto col = basis.index_unchecked(l, m);
      if (f.constant != 0.0) entries.push_back({col, col, f.constant});
      for (int q = -2; q <= 2; ++q) {
        const double cq = f.c[static_cast<std::size_t>(q + 2)];
        if (cq == 0.0) continue;
        const int mp = m + q;
        for (int lp = l - 2; lp <= l + 2; lp += 2) {
          if (!basis.contains(lp, mp)) continue;
          const double v = cq * ylm_braket(lp, mp, 2, q, l, m);
          if (v != 0.0) entries.push_back({basis.index_unchecked(lp, mp), col, v});
        }
      }
    }
  }
  return SparseHermitianOperator(basis, std::move(entries));
}

QuadrupoleExpansion cos2theta_expansion() {
  QuadrupoleExpansion f;
  f.constant = 1.0 / 3.0;
  f.c[2] = 4.0 / 3.0 * std::sqrt(kPi / 5.0);
  return f;
}

QuadrupoleExpansion in_plane_expansion() {
  QuadrupoleExpansion f;
  f.constant = 1.0 / 3.0;
  f.c[0] = std::sqrt(2.0 * kPi / 15.0);
  f.c[4] = std::sqrt(2.0 * kPi / 15.0);
  f.c[2] = -2.0 / 3.0 * std::sqrt(kPi / 5.0);
  return f;
}

QuadrupoleExpansion out_of_plane_expansion() {
  QuadrupoleExpansion f;
  f.constant = 1.0 / 3.0;
  f.c[0] = -std::sqrt(2.0 * kPi / 15.0);
  f.c[4] = -std::sqrt(2.0 * kPi / 15.0);
  f.c[2] = -2.0 / 3.0 * std::sqrt(kPi / 5.0);
  return f;
}

QuadrupoleExpansion cross_expansion() {
  QuadrupoleExpansion f;
  f.c[1] = std::sqrt(2.0 * kPi / 15.0);
  f.c[3] = -std::sqrt(2.0 * kPi / 15.0);
  return f;
}

double ladder(int l, int m, int step) {
  return std::sqrt(static_cast<double>(l) * (l + 1) - static_cast<double>(m) * (m + step));
}

}  // namespace

SparseHermitianOperator build_cos2theta_operator(const Basis& basis) {
  return build_from_expansion(basis, cos2theta_expansion());
}

SparseHermitianOperator build_sin2theta_cos2phi_operator(const Basis& basis) {
  return build_from_expansion(basis, in_plane_expansion());
}

SparseHermitianOperator build_sin2theta_sin2phi_operator(const Basis& basis) {
  return build_from_expansion(basis, out_of_plane_expansion());
}

SparseHermitianOperator build_cross_term_operator(const Basis& basis) {
  return build_from_expansion(basis, cross_expansion());
}

TiltedKickComponents::TiltedKickComponents(const Basis& basis)
    : in_plane(build_sin2theta_cos2phi_operator(basis)),
      axial(build_cos2theta_operator(basis)),
      cross(build_cross_term_operator(basis)) {}

SparseHermitianOperator TiltedKickComponents::combine(double pol_angle) const {
  const double s = std::sin(pol_angle);
  const double c = std::cos(pol_angle);
  const std::array<std::pair<double, const SparseHermitianOperator*>, 3> terms{{
      {s * s, &in_plane},
      {c * c, &axial},
      {std::sin(2.0 * pol_angle), &cross},
  }};
  return SparseHermitianOperator::combine(terms);
}

SparseHermitianOperator build_tilted_kick_operator(const Basis& basis, double pol_angle) {
  if (pol_angle == 0.0) return build_cos2theta_operator(basis);
  return TiltedKickComponents(basis).combine(pol_angle);
}

SparseHermitianOperator build_jx_operator(const Basis& basis) {
  std::vector<SparseMatrix::Entry> entries;
  for (int m = -basis.l_max(); m <= basis.l_max(); ++m) {
    for (int l = std::abs(m); l <= basis.l_max(); ++l) {
      const auto col = basis.index_unchecked(l, m);
      if (m + 1 <= l) entries.push_back({basis.index_unchecked(l, m + 1), col, 0.5 * ladder(l, m, +1)});
      if (m - 1 >= -l) entries.push_back({basis.index_unchecked(l, m - 1), col, 0.5 * ladder(l, m, -1)});
    }
  }
  return SparseHermitianOperator(basis, std::move(entries));
}

SparseHermitianOperator build_jy_operator(const Basis& basis) {
  std::vector<SparseMatrix::Entry> entries;
  for (int m = -basis.l_max(); m <= basis.l_max(); ++m) {
    for (int l = std::abs(m); l <= basis.l_max(); ++l) {
      const auto col = basis.index_unchecked(l, m);
      // J_y = (J_+ - J_-) / (2i)
      if (m + 1 <= l) entries.push_back({basis.index_unchecked(l, m + 1), col, cplx(0.0, -0.5 * ladder(l, m, +1))});
      if (m - 1 >= -l) entries.push_back({basis.index_unchecked(l, m - 1), col, cplx(0.0, 0.5 * ladder(l, m, -1))});
    }
  }
  return SparseHermitianOperator(basis, std::move(entries));
}

SparseHermitianOperator build_jz_operator(const Basis& basis) {
  std::vector<SparseMatrix::Entry> entries;
  for (int m = -basis.l_max(); m <= basis.l_max(); ++m) {
    if (m == 0) continue;
    for (int l = std::abs(m); l <= basis.l_max(); ++l) {
      const auto idx = basis.index_unchecked(l, m);
      entries.push_back({idx, idx, static_cast<double>(m)});
    }
  }
  return SparseHermitianOperator(basis, std::move(entries));
}

SparseMatrix build_exp_i2phi_elements(const Basis& basis) {
  const int l_max = basis.l_max();
  std::vector<SparseMatrix::Entry> entries;

  // Above the closed-form threshold every needed integrand is a polynomial
  // in x of degree <= 2 l_max, so one shared rule with l_max + 2 nodes is exact.
  const bool need_quadrature = 2 * l_max > kWongQuadratureThreshold;
  GaussLegendreRule rule;
  std::vector<NormalizedLegendreTable> tables;
  if (need_quadrature) {
    rule = gauss_legendre(l_max + 2);
    tables.reserve(rule.nodes.size());
    for (double x : rule.nodes) tables.emplace_back(l_max, x);
  }
  const std::size_t nq = rule.nodes.size();
  std::vector<double> bra(nq);
  std::vector<double> ket(nq);

  for (int m = -l_max + 2; m <= l_max; ++m) {
    const int mk = m - 2;
    for (int l = std::abs(m); l <= l_max; ++l) {
      const auto row = basis.index_unchecked(l, m);
      if (need_quadrature) {
        for (std::size_t k = 0; k < nq; ++k) bra[k] = rule.weights[k] * tables[k](l, m);
      }
      const int lk_min = std::abs(mk) + ((l + std::abs(mk)) & 1);
      for (int lk = lk_min; lk <= l_max; lk += 2) {
        double overlap = 0.0;
        if (l + lk <= kWongQuadratureThreshold) {
          overlap = normalized_overlap(l, m, lk, mk);
        } else {
          for (std::size_t k = 0; k < nq; ++k) ket[k] = tables[k](lk, mk);
          for (std::size_t k = 0; k < nq; ++k) overlap += bra[k] * ket[k];
        }
        if (overlap != 0.0) entries.push_back({row, basis.index_unchecked(lk, mk), 2.0 * kPi * overlap});
      }
    }
  }
  return SparseMatrix(basis.size(), basis.size(), std::move(entries));
}

double cos2phi_from_elements(const SparseMatrix& exp_i2phi, std::span<const cplx> psi) {
  return 0.5 + 0.5 * exp_i2phi.bilinear(psi, psi).real();
}

}  // namespace rotor
