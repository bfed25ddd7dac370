#include "rotor/checks.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "rotor/angular.hpp"
#include "rotor/fdtd.hpp"
#include "rotor/operators.hpp"
#include "rotor/scenario.hpp"
#include "rotor/spectral.hpp"
#include "rotor/thermal.hpp"

namespace rotor {

namespace {

using oracle::kPi;

CheckResult make(std::string name, double measured, double limit, std::string detail = {}) {
  return {std::move(name), measured <= limit, measured, limit, std::move(detail)};
}

std::vector<EnsembleMember> n2_gas(double t_k) { return build_ensemble({{"N2", 1.9896, 0.7, 2.0, 1.0}, t_k, 1e-6}); }

CheckResult kick_vs_dense() {
  const int l_max = 40;
  double worst = 0.0;
  for (double angle : {0.0, kPi / 4, kPi / 2}) {
    const KickOperator kick(Basis(l_max), angle);
    const auto& op = kick.op();
    const auto u = oracle::exp_i_hermitian(
        oracle::dense(op.dimension(), [&](std::size_t i, std::size_t j) { return op.matrix().element(i, j); }), 10.0);
    for (auto [l, m] : {std::pair{0, 0}, {2, 1}, {5, -3}}) {
      auto w = init_eigenstate(l, m, l_max);
      const Eigen::VectorXcd ref = u.col(static_cast<Eigen::Index>(w.basis().index(l, m)));
      apply_kick(w, kick, 10.0);
      for (std::size_t i = 0; i < w.size(); ++i) worst = std::max(worst, std::abs(w.coeffs()[i] - ref(static_cast<Eigen::Index>(i))));
    }
  }
  return make("kick vs dense exponential (P = 10)", worst, 1e-9);
}

CheckResult wong_vs_quadrature() {
  double worst = 0.0;
  for (int l1 = 0; l1 <= 20; ++l1)
    for (int l2 = 0; l2 <= 20; l2 += 3)
      for (int m1 = -std::min(l1, 4); m1 <= std::min(l1, 4); m1 += 2)
        for (int m2 : {0, 1, -2, 3})
          if (std::abs(m2) <= l2) {
            const double scale = std::sqrt(wong_overlap(l1, std::abs(m1), l1, std::abs(m1)) *
                                           wong_overlap(l2, std::abs(m2), l2, std::abs(m2)));
            worst = std::max(worst, std::abs(wong_overlap(l1, m1, l2, m2) - oracle::legendre_overlap(l1, m1, l2, m2)) / scale);
          }
  return make("Legendre overlap vs quadrature (l <= 20)", worst, 1e-9);
}

CheckResult wigner_table() {
  double worst = 0.0;
  int cases = 0;
  for (int a = 0; a <= 6; ++a)
    for (int b = 0; b <= 6; ++b)
      for (int c = std::abs(a - b); c <= a + b; ++c)
        for (int ma = -a; ma <= a; ++ma)
          for (int mb = -b; mb <= b; ++mb) {
            const int mc = -ma - mb;
            if (std::abs(mc) > c) continue;
            const double v = wigner_3j(a, b, c, ma, mb, mc);
            const double sign = ((a + b + c) % 2) ? -1.0 : 1.0;
            worst = std::max({worst, std::abs(v - oracle::gsl_3j(a, b, c, ma, mb, mc)),
                              std::abs(v - wigner_3j(b, c, a, mb, mc, ma)),
                              std::abs(v - sign * wigner_3j(b, a, c, mb, ma, mc)),
                              std::abs(v - sign * wigner_3j(a, b, c, -ma, -mb, -mc))});
            ++cases;
          }
  // tabulated closed forms
  worst = std::max({worst, std::abs(wigner_3j(1, 1, 0, 0, 0, 0) + 1.0 / std::sqrt(3.0)),
                    std::abs(wigner_3j(2, 2, 0, 0, 0, 0) - 1.0 / std::sqrt(5.0)),
                    std::abs(wigner_3j(1, 1, 2, 0, 0, 0) - std::sqrt(2.0 / 15.0))});
  return make("Wigner 3j values and symmetries", worst, 1e-12, fmt::format("{} symbols", cases));
}

CheckResult spectral_norm() {
  auto w = init_eigenstate(3, 1, 60);
  const KickOperator z(w.basis(), 0.0), tilt(w.basis(), kPi / 4);
  apply_kick(w, z, 8.0);
  free_propagate(w, 2.9);
  apply_kick(w, tilt, 8.0);
  free_propagate(w, kRevivalPeriod);
  return make("norm after kicks and one revival (spectral)", std::abs(w.norm_squared() - 1.0), 1e-10);
}

GridConfig grid(int n_theta, int m_max, double dt) {
  GridConfig c;
  c.n_theta = n_theta;
  c.m_max = m_max;
  c.n_phi = 4 * m_max + 4;
  c.delta_tau = dt;
  return c;
}

CheckResult grid_norm_check(Execution exec) {
  const GridConfig cfg = grid(128, 10, 1e-3);
  auto g = grid_from_eigenstate(1, 0, cfg);
  const GridKicker kicker(cfg);
  kicker.apply(g, {3.0, kPi / 4, 0.0}, exec);
  const IntervalPropagator rev(cfg, kRevivalPeriod);
  const CrankNicolson cn(cfg);
  const double before = scheme_norm(g, cn);
  rev.advance(g, exec);
  return make("norm drift per revival (grid)", std::abs(scheme_norm(g, cn) - before), 1e-6);
}

double phase_error(int l, int m, double t, const GridConfig& cfg) {
  const auto g0 = grid_from_eigenstate(l, m, cfg);
  auto g = g0;
  CrankNicolson(cfg).step(g, static_cast<int>(std::lround(t / cfg.delta_tau)));
  return std::arg(grid_overlap(g0, g) * std::polar(1.0, 0.5 * l * (l + 1) * t));
}

CheckResult cn_order() {
  double worst = 0.0;
  std::string detail;
  for (int l : {3, 5}) {
    const double a = phase_error(l, 0, 1.0, grid(256, 8, 4e-3));
    const double b = phase_error(l, 0, 1.0, grid(256, 8, 2e-3));
    const double c = phase_error(l, 0, 1.0, grid(256, 8, 1e-3));
    const double ratio = (a - b) / (b - c);
    detail += fmt::format("{}dt ratio l={}: {:.4f}", detail.empty() ? "" : "; ", l, ratio);
    worst = std::max(worst, std::abs(ratio - 4.0));
    const double x = phase_error(l, 0, 0.2, grid(32, 8, 1e-5));
    const double y = phase_error(l, 0, 0.2, grid(64, 8, 1e-5));
    const double z = phase_error(l, 0, 0.2, grid(128, 8, 1e-5));
    const double r2 = (x - y) / (y - z);
    detail += fmt::format("; dtheta ratio l={}: {:.4f}", l, r2);
    worst = std::max(worst, std::abs(r2 - 4.0));
  }
  return make("Crank-Nicolson convergence ratios in [3, 5]", worst, 1.0, detail);
}

CheckResult azimuthal_isotropy(Execution exec) {
  RunOptions opts;
  opts.exec = exec;
  const auto gas = n2_gas(30.0);
  DoublePulseProtocol none;
  none.delay_mode = DelayMode::explicit_delay;
  none.delay = 1.0;
  none.sampling.samples_per_revival = 256;
  DoublePulseProtocol single = none;
  single.p1 = 6.0;
  double worst = 0.0;
  for (const auto& p : {none, single}) {
    const auto r = run_protocol(p, gas, opts);
    for (double v : r.get("cos2phi").values) worst = std::max(worst, std::abs(v - 0.5));
  }
  return make("<cos^2 phi> = 1/2 before and after a single pulse", worst, 1e-12);
}

CheckResult transverse_momentum(Execution exec) {
  RunOptions opts;
  opts.exec = exec;
  opts.fold_mirror = false;
  DoublePulseProtocol p;
  p.p1 = 4.0;
  p.p2 = 4.0;
  p.pol_angle = kPi / 4;
  p.sampling.samples_per_revival = 256;
  const auto r = run_protocol(p, n2_gas(30.0), opts);
  double worst = 0.0;
  for (const char* name : {"jx", "jz"})
    for (double v : r.get(name).values) worst = std::max(worst, std::abs(v));
  return make("thermal <J_x> = <J_z> = 0 after two pulses", worst, 1e-12,
              fmt::format("<J_y> = {:.6f}", r.final_jy));
}

CheckResult revival_recurrence() {
  auto w = init_eigenstate(2, 1, 50);
  apply_kick(w, KickOperator(w.basis(), kPi / 3), 7.0);
  const auto start = w;
  for (int k = 0; k < 7; ++k) free_propagate(w, kRevivalPeriod / 7.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) worst = std::max(worst, std::abs(w.coeffs()[i] - start.coeffs()[i]));
  return make("full-revival state recurrence (spectral)", worst, 1e-12);
}

}  // namespace

std::vector<CheckResult> run_property_checks(Execution exec) {
  return {kick_vs_dense(),         wong_vs_quadrature(),          wigner_table(),
          spectral_norm(),         grid_norm_check(exec),         cn_order(),
          azimuthal_isotropy(exec), transverse_momentum(exec),     revival_recurrence()};
}

}  // namespace rotor
