#include <array>

#include "doctest.h"
#include "oracles.hpp"
#include "rotor/errors.hpp"
#include "rotor/operators.hpp"

using namespace rotor;
using oracle::kPi;

namespace {

double cos2t(double t, double) { return std::cos(t) * std::cos(t); }

Eigen::MatrixXcd to_dense(const SparseHermitianOperator& op) {
  return oracle::dense(op.dimension(), [&](std::size_t i, std::size_t j) { return op.matrix().element(i, j); });
}

}  // namespace

TEST_SUITE("basis") {
  TEST_CASE("enumeration round trip") {
    const Basis b(7);
    CHECK(b.size() == 64);
    for (std::size_t i = 0; i < b.size(); ++i) {
      const auto lab = b.label(i);
      CHECK(b.index(lab.l, lab.m) == i);
    }
    CHECK_THROWS_AS(b.index(8, 0), DomainError);
    CHECK_THROWS_AS(b.index(2, 3), DomainError);
    CHECK_FALSE(b.contains(3, -4));
  }
}

TEST_SUITE("cos2theta") {
  TEST_CASE("diagonal values") {
    const Basis b(6);
    const auto op = build_cos2theta_operator(b);
    CHECK(op.element({0, 0}, {0, 0}).real() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(op.element({1, 0}, {1, 0}).real() == doctest::Approx(3.0 / 5.0).epsilon(1e-14));
    for (int l = 0; l <= 6; ++l)
      for (int m = -l; m <= l; ++m) {
        // classic closed form (2l^2 + 2l - 1 - 2m^2) / ((2l-1)(2l+3))
        const double ref = (2.0 * l * l + 2.0 * l - 1.0 - 2.0 * m * m) / ((2.0 * l - 1.0) * (2.0 * l + 3.0));
        CHECK(op.element({l, m}, {l, m}).real() == doctest::Approx(ref).epsilon(1e-13));
      }
  }

  TEST_CASE("selection rules and Hermiticity") {
    const Basis b(8);
    const auto op = build_cos2theta_operator(b);
    CHECK(op.hermiticity_defect() < 1e-14);
    CHECK(op.m_bandwidth() == 0);
    for (const auto& e : op.matrix().entries()) {
      const auto r = b.label(e.row);
      const auto c = b.label(e.col);
      CHECK(r.m == c.m);
      CHECK(std::abs(r.l - c.l) <= 2);
      CHECK((r.l - c.l) % 2 == 0);
    }
  }

  TEST_CASE("off-diagonal elements against quadrature") {
    const Basis b(6);
    const auto op = build_cos2theta_operator(b);
    for (int m = -4; m <= 4; ++m)
      for (int l = std::abs(m); l + 2 <= 6; ++l) {
        const auto q = oracle::braket(l + 2, m, cos2t, l, m);
        CHECK(std::abs(op.element({l + 2, m}, {l, m}) - q) < 1e-13);
      }
  }
}

TEST_SUITE("tilted kick") {
  TEST_CASE("reduces to cos2theta at zero angle") {
    const Basis b(5);
    CHECK(build_tilted_kick_operator(b, 0.0).matrix().max_abs_difference(build_cos2theta_operator(b).matrix()) == 0.0);
  }

  TEST_CASE("matches quadrature of cos^2 beta at several angles") {
    const Basis b(4);
    for (double tp : {kPi / 4.0, 0.3, 1.2, kPi / 2.0}) {
      const auto op = build_tilted_kick_operator(b, tp);
      CHECK(op.hermiticity_defect() < 1e-14);
      auto f = [tp](double t, double p) {
        const double c = std::sin(tp) * std::sin(t) * std::cos(p) + std::cos(tp) * std::cos(t);
        return c * c;
      };
      double worst = 0.0;
      for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) {
          const auto r = b.label(i), c = b.label(j);
          worst = std::max(worst, std::abs(op.matrix().element(i, j) - oracle::braket(r.l, r.m, f, c.l, c.m, 24, 16)));
        }
      CHECK(worst < 1e-13);
    }
  }

  TEST_CASE("x, y and z squared direction cosines sum to identity") {
    const Basis b(9);
    const auto xx = build_sin2theta_cos2phi_operator(b);
    const auto yy = build_sin2theta_sin2phi_operator(b);
    const auto zz = build_cos2theta_operator(b);
    const std::array<std::pair<double, const SparseHermitianOperator*>, 3> terms{{{1.0, &xx}, {1.0, &yy}, {1.0, &zz}}};
    const auto sum = SparseHermitianOperator::combine(terms);
    double worst = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j)
        worst = std::max(worst, std::abs(sum.matrix().element(i, j) - (i == j ? 1.0 : 0.0)));
    CHECK(worst < 1e-14);
  }
}

TEST_SUITE("angular momentum") {
  TEST_CASE("l=1 block of J_y has eigenvalues -1, 0, 1") {
    const Basis b(1);
    const auto jy = build_jy_operator(b);
    CHECK(jy.hermiticity_defect() < 1e-15);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(to_dense(jy));
    const auto ev = eig.eigenvalues();
    CHECK(ev(0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(ev(1) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    CHECK(ev(2) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    CHECK(ev(3) == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("commutation relations and Casimir") {
    const Basis b(6);
    const auto jx = to_dense(build_jx_operator(b));
    const auto jy = to_dense(build_jy_operator(b));
    const auto jz = to_dense(build_jz_operator(b));
    const oracle::cplx i(0.0, 1.0);
    CHECK((jx * jy - jy * jx - i * jz).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((jy * jz - jz * jy - i * jx).cwiseAbs().maxCoeff() < 1e-13);
    const Eigen::MatrixXcd j2 = jx * jx + jy * jy + jz * jz;
    for (std::size_t k = 0; k < b.size(); ++k) {
      const auto lab = b.label(k);
      const auto kk = static_cast<Eigen::Index>(k);
      CHECK(j2(kk, kk).real() == doctest::Approx(lab.l * (lab.l + 1.0)).epsilon(1e-13));
    }
  }

  TEST_CASE("J_y matches the differential operator on Y_l^m") {
    // J_y = -i (cos p d/dt - cot t sin p d/dp), tested by quadrature with
    // central differences of the Boost harmonics.
    const Basis b(3);
    const auto jy = build_jy_operator(b);
    const double h = 1e-5;
    for (std::size_t i = 0; i < b.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) {
        const auto r = b.label(i), c = b.label(j);
        const auto q = oracle::sphere_integral([&](double t, double p) {
          const auto dt = (oracle::ylm(c.l, c.m, t + h, p) - oracle::ylm(c.l, c.m, t - h, p)) / (2 * h);
          const auto dp = oracle::cplx(0.0, c.m) * oracle::ylm(c.l, c.m, t, p);
          const auto jyk = oracle::cplx(0.0, -1.0) * (std::cos(p) * dt - std::sin(p) / std::tan(t) * dp);
          return std::conj(oracle::ylm(r.l, r.m, t, p)) * jyk;
        }, 24, 16);
        CHECK(std::abs(jy.matrix().element(i, j) - q) < 1e-8);
      }
  }
}

TEST_SUITE("exp(2i phi)") {
  TEST_CASE("<Y_2^2|e^{2ip}|Y_2^0> against quadrature") {
    const Basis b(4);
    const auto e = build_exp_i2phi_elements(b);
    const auto q = oracle::sphere_integral([](double t, double p) {
      return std::conj(oracle::ylm(2, 2, t, p)) * std::exp(oracle::cplx(0.0, 2.0 * p)) * oracle::ylm(2, 0, t, p);
    });
    CHECK(std::abs(e.element(b.index(2, 2), b.index(2, 0)) - q) < 1e-14);
    CHECK(std::abs(q) > 0.1);
  }

  TEST_CASE("full matrix against quadrature, both sides of the threshold") {
    for (int l_max : {5, 33}) {
      const Basis b(l_max);
      const auto e = build_exp_i2phi_elements(b);
      double worst = 0.0;
      for (const auto& en : e.entries()) {
        const auto r = b.label(en.row), c = b.label(en.col);
        CHECK(r.m == c.m + 2);
      }
      // spot-check a sample including both routes
      for (int m : {-3, 0, 2, 5}) {
        for (int l = std::abs(m); l <= l_max; l += 4) {
          for (int lk = std::abs(m - 2); lk <= l_max; lk += 3) {
            const double ref = 2.0 * kPi *
                               oracle::legendre_overlap(l, m, lk, m - 2, 128) *
                               std::sqrt((2 * l + 1) / (4 * kPi) * std::exp(std::lgamma(l - m + 1.0) - std::lgamma(l + m + 1.0))) *
                               std::sqrt((2 * lk + 1) / (4 * kPi) *
                                         std::exp(std::lgamma(lk - m + 3.0) - std::lgamma(lk + m - 1.0)));
            worst = std::max(worst, std::abs(e.element(b.index(l, m), b.index(lk, m - 2)) - ref));
          }
        }
      }
      CHECK(worst < 1e-9);
    }
  }

  TEST_CASE("cos^2 phi of (Y_1^-1 -+ Y_1^1)/sqrt(2)") {
    const Basis b(1);
    const auto e = build_exp_i2phi_elements(b);
    std::vector<oracle::cplx> px(b.size()), py(b.size());
    const double s = 1.0 / std::sqrt(2.0);
    px[b.index(1, -1)] = s;
    px[b.index(1, 1)] = -s;
    py[b.index(1, -1)] = s;
    py[b.index(1, 1)] = s;
    CHECK(cos2phi_from_elements(e, px) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(cos2phi_from_elements(e, py) == doctest::Approx(0.25).epsilon(1e-14));
  }
}

TEST_SUITE("sparse") {
  TEST_CASE("rejects non-Hermitian input") {
    const Basis b(1);
    std::vector<SparseMatrix::Entry> entries{{0, 1, 1.0}};
    CHECK_THROWS_AS(SparseHermitianOperator(b, entries), NumericalError);
  }

  TEST_CASE("restricted apply equals full apply on supported vectors") {
    const Basis b(8);
    const auto op = build_tilted_kick_operator(b, 0.7);
    std::vector<oracle::cplx> x(b.size()), y1(b.size()), y2(b.size());
    for (int l = 2; l <= 8; ++l) x[b.index(l, 2)] = oracle::cplx(0.1 * l, -0.05 * l);
    op.apply(x, y1, Execution::serial);
    op.apply(x, y2, 2, 2, Execution::parallel);
    for (std::size_t k = 0; k < b.size(); ++k) CHECK(std::abs(y1[k] - y2[k]) < 1e-15);
  }
}
