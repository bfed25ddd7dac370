#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "rotor/errors.hpp"
#include "rotor/scenario.hpp"
#include "rotor/thermal.hpp"

using namespace rotor;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

std::vector<EnsembleMember> cold_gas(double t_k = 10.0) {
  return build_ensemble({{"N2", 1.9896, 0.7, 2.0, 1.0}, t_k, 1e-6});
}

DoublePulseProtocol protocol(double p1, double p2, double angle, int spr = 256) {
  DoublePulseProtocol p;
  p.p1 = p1;
  p.p2 = p2;
  p.pol_angle = angle;
  p.sampling.samples_per_revival = spr;
  return p;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_SUITE("alignment peak") {
  TEST_CASE("peak lies inside the window and is a local maximum above isotropy") {
    const auto members = cold_gas(50.0);
    const auto spectrum = alignment_spectrum(4.0, members);
    const double t = find_alignment_peak(spectrum);
    CHECK(t > 0.40 * kTwoPi);
    CHECK(t < 0.50 * kTwoPi);
    const double v = spectrum.value(t);
    CHECK(v > 1.0 / 3.0);
    for (double h : {1e-3, 1e-2}) {
      CHECK(spectrum.value(t - h) < v);
      CHECK(spectrum.value(t + h) < v);
    }
  }

  TEST_CASE("peak converges as the search resolution is refined") {
    const auto spectrum = alignment_spectrum(4.0, cold_gas(50.0));
    const double coarse = find_alignment_peak(spectrum, {0.40, 0.50, 1e-3});
    const double mid = find_alignment_peak(spectrum, {0.40, 0.50, 1e-4});
    const double fine = find_alignment_peak(spectrum, {0.40, 0.50, 1e-5});
    CHECK(std::abs(mid - fine) < 1e-6);
    CHECK(std::abs(coarse - fine) < 1e-4);
    CHECK(spectrum.value(fine) >= spectrum.value(coarse) - 1e-12);
  }

  TEST_CASE("a maximum on the window edge is rejected") {
    const auto spectrum = alignment_spectrum(4.0, cold_gas(50.0));
    const double peak = find_alignment_peak(spectrum) / kTwoPi;
    CHECK_THROWS_AS(find_alignment_peak(spectrum, {peak - 0.05, peak - 0.01, 1e-4}), DomainError);
  }

  TEST_CASE("spectrum is periodic in the revival time") {
    const auto spectrum = alignment_spectrum(3.0, cold_gas(30.0));
    for (double t : {0.1, 1.7, 4.2}) CHECK(spectrum.value(t) == doctest::Approx(spectrum.value(t + kTwoPi)).epsilon(1e-12));
  }
}

TEST_SUITE("double pulse protocol") {
  TEST_CASE("no kicks leave the thermal gas isotropic") {
    auto p = protocol(0.0, 0.0, kPi / 4);
    p.delay_mode = DelayMode::explicit_delay;
    p.delay = 1.0;
    const auto r = run_protocol(p, cold_gas(30.0));
    for (double v : r.get("cos2theta").values) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    for (double v : r.get("cos2phi").values) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(max_abs(r.get("jy").values) < 1e-14);
  }

  TEST_CASE("a z-polarized first pulse alone keeps cos2phi at one half and jy at zero") {
    const auto r = run_protocol(protocol(5.0, 0.0, kPi / 4), cold_gas(30.0));
    CHECK(max_abs(r.get("jy").values) < 1e-13);
    for (double v : r.get("cos2phi").values) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.peak_alignment > 1.0 / 3.0);
  }

  TEST_CASE("collinear second pulse gives no rotation") {
    const auto r = run_protocol(protocol(3.0, 3.0, 0.0), cold_gas(30.0));
    CHECK(std::abs(r.final_jy) < 1e-13);
    for (double v : r.get("cos2phi").values) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
  }

  TEST_CASE("mirrored pulse angle reverses the rotation") {
    const auto members = cold_gas(30.0);
    const auto plus = run_protocol(protocol(3.0, 3.0, kPi / 4), members);
    const auto minus = run_protocol(protocol(3.0, 3.0, -kPi / 4), members);
    CHECK(std::abs(plus.final_jy) > 0.1);
    CHECK(minus.final_jy == doctest::Approx(-plus.final_jy).epsilon(1e-10));
    CHECK(max_abs_diff(plus.get("cos2phi").values, minus.get("cos2phi").values) < 1e-12);
  }

  TEST_CASE("jy is conserved after the second pulse") {
    const auto r = run_protocol(protocol(3.0, 3.0, kPi / 4), cold_gas(30.0));
    CHECK(r.jy_variation <= 1e-8 * std::abs(r.final_jy));
    CHECK(r.cos2phi_revival_mean > 0.5);
  }

  TEST_CASE("unfolded run has vanishing thermal jx and jz and matches the folded run") {
    const auto members = cold_gas(20.0);
    RunOptions unfolded;
    unfolded.fold_mirror = false;
    const auto full = run_protocol(protocol(3.0, 3.0, kPi / 4), members, unfolded);
    const auto folded = run_protocol(protocol(3.0, 3.0, kPi / 4), members);
    CHECK(max_abs(full.get("jx").values) < 1e-12);
    CHECK(max_abs(full.get("jz").values) < 1e-12);
    CHECK_THROWS_AS(folded.get("jx"), DomainError);
    for (const char* name : {"cos2theta", "cos2phi", "jy"})
      CHECK(max_abs_diff(full.get(name).values, folded.get(name).values) < 1e-12);
  }

  TEST_CASE("series over two revivals repeat") {
    auto p = protocol(3.0, 2.0, kPi / 3, 64);
    p.sampling.revivals = 2.0;
    const auto r = run_protocol(p, cold_gas(20.0));
    const auto& v = r.get("cos2theta").values;
    REQUIRE(v.size() == 128);
    for (std::size_t k = 0; k < 64; ++k) CHECK(v[k] == doctest::Approx(v[k + 64]).epsilon(1e-10));
  }

  TEST_CASE("serial and parallel runs agree bitwise") {
    const auto members = cold_gas(30.0);
    const auto p = protocol(3.0, 4.0, kPi / 4);
    const auto a = run_protocol(p, members, {Execution::serial});
    const auto b = run_protocol(p, members, {Execution::parallel});
    CHECK(a.pulse2_time == b.pulse2_time);
    CHECK(a.final_jy == b.final_jy);
    for (std::size_t i = 0; i < a.series.size(); ++i) CHECK(a.series[i] == b.series[i]);
  }

  TEST_CASE("auto-quarter and explicit delays place the second pulse") {
    auto p = protocol(2.0, 2.0, kPi / 4, 16);
    p.delay_mode = DelayMode::auto_quarter;
    CHECK(run_protocol(p, cold_gas(10.0)).pulse2_time == doctest::Approx(kPi / 2));
    p.delay_mode = DelayMode::explicit_delay;
    p.delay = 1.25;
    const auto r = run_protocol(p, cold_gas(10.0));
    CHECK(r.pulse2_time == 1.25);
    CHECK(r.get("jy").times.front() == 1.25);
  }

  TEST_CASE("invalid protocols are configuration errors") {
    auto p = protocol(-1.0, 1.0, 0.0);
    CHECK_THROWS_AS(run_protocol(p, cold_gas(10.0)), ConfigError);
    p = protocol(1.0, 1.0, 2.0);
    CHECK_THROWS_AS(run_protocol(p, cold_gas(10.0)), ConfigError);
    p = protocol(1.0, 1.0, 0.0);
    p.delay_mode = DelayMode::explicit_delay;
    CHECK_THROWS_AS(run_protocol(p, cold_gas(10.0)), ConfigError);
    CHECK_THROWS_AS(run_protocol(protocol(1.0, 1.0, 0.0), std::vector<EnsembleMember>{}), ConfigError);
  }
}

TEST_SUITE("engines agree") {
  TEST_CASE("grid engine follows the spectral engine for a cold gas") {
    const std::vector<EnsembleMember> members{{0, 0, 0.6}, {1, 0, 0.1}, {1, 1, 0.1}, {1, -1, 0.1}, {2, 1, 0.1}};
    auto p = protocol(2.0, 2.0, kPi / 4, 64);
    p.delay_mode = DelayMode::explicit_delay;
    p.delay = 0.8;
    p.sampling.revivals = 4.0 / 64.0;
    const auto spectral = run_protocol(p, members);
    p.engine = Engine::fdtd;
    p.grid = {256, 56, 13, 2e-4};
    const auto grid = run_protocol(p, members);
    CHECK(max_abs_diff(spectral.get("cos2theta").values, grid.get("cos2theta").values) < 1e-4);
    CHECK(max_abs_diff(spectral.get("cos2phi").values, grid.get("cos2phi").values) < 1e-4);
    CHECK(grid.final_jy == doctest::Approx(spectral.final_jy).epsilon(1e-3));
  }
}

TEST_SUITE("scans") {
  TEST_CASE("angle scan is odd in the angle and vanishes at 0 and 90 degrees") {
    const std::vector<double> angles{-kPi / 4, 0.0, kPi / 8, kPi / 4, kPi / 2};
    const auto c = scan_polarization_angle(3.0, 3.0, cold_gas(20.0), angles);
    REQUIRE(c.y.size() == angles.size());
    CHECK(c.y[0] == doctest::Approx(-c.y[3]).epsilon(1e-10));
    CHECK(std::abs(c.y[1]) < 1e-13);
    CHECK(std::abs(c.y[4]) < 1e-12);
    CHECK(c.y[2] * c.y[3] > 0.0);
  }

  TEST_CASE("angle scan matches individual protocol runs") {
    const auto members = cold_gas(20.0);
    const std::vector<double> angles{kPi / 6};
    const auto c = scan_polarization_angle(3.0, 2.0, members, angles);
    CHECK(c.y[0] == doctest::Approx(run_protocol(protocol(3.0, 2.0, kPi / 6), members).final_jy).epsilon(1e-10));
  }

  TEST_CASE("strength surface vanishes without a second pulse") {
    const std::vector<double> p1{2.0, 4.0}, p2{0.0, 3.0};
    const auto s = scan_pulse_strengths(cold_gas(20.0), p1, p2);
    REQUIRE(s.jy.size() == 2);
    for (const auto& row : s.jy) {
      CHECK(std::abs(row[0]) < 1e-13);
      CHECK(std::abs(row[1]) > 0.01);
    }
    CHECK(s.max_alignment[1] > s.max_alignment[0]);
  }

  TEST_CASE("delay scan matches explicit-delay protocol runs") {
    const auto members = cold_gas(20.0);
    const auto c = scan_delay(3.0, 3.0, members, kPi, 0.5, 3);
    REQUIRE(c.y.size() == 3);
    CHECK(c.x.front() == doctest::Approx(kPi - 0.5));
    auto p = protocol(3.0, 3.0, kPi / 4, 16);
    p.delay_mode = DelayMode::explicit_delay;
    p.delay = c.x[2];
    CHECK(c.y[2] == doctest::Approx(run_protocol(p, members).final_jy).epsilon(1e-10));
    CHECK_THROWS_AS(scan_delay(3.0, 3.0, members, kPi, kPi, 5), ConfigError);
  }

  TEST_CASE("fixed budget scan reports the strength difference") {
    const std::vector<double> d{-2.0, 0.0, 2.0};
    const auto c = scan_fixed_budget(cold_gas(20.0), 6.0, d);
    CHECK(c.x == d);
    for (double y : c.y) CHECK(std::isfinite(y));
  }
}

TEST_SUITE("revival averaged density") {
  TEST_CASE("isotropic gas gives a flat normalized density") {
    auto p = protocol(0.0, 0.0, 0.0);
    p.delay_mode = DelayMode::explicit_delay;
    p.delay = 1.0;
    const auto d = revival_averaged_distribution(p, cold_gas(20.0), 48, 32);
    for (double v : d.values) CHECK(v == doctest::Approx(1.0 / (4.0 * kPi)).epsilon(2e-3));
    CHECK(d.raw_integral == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(d.cos2phi == doctest::Approx(0.5).epsilon(1e-12));
  }

  TEST_CASE("single eigenstates reproduce |Y_lm|^2") {
    auto p = protocol(0.0, 0.0, 0.0);
    p.delay_mode = DelayMode::explicit_delay;
    p.delay = 1.0;
    const std::vector<EnsembleMember> y10{{1, 0, 1.0}}, y11{{1, 1, 1.0}};
    const auto a = revival_averaged_distribution(p, y10, 40, 16);
    const auto b = revival_averaged_distribution(p, y11, 40, 16);
    double err = 0.0;
    for (std::size_t i = 0; i < a.theta.size(); ++i)
      for (std::size_t j = 0; j < a.phi.size(); ++j) {
        const double c = std::cos(a.theta[i]), s = std::sin(a.theta[i]);
        err = std::max(err, std::abs(a.at(i, j) - 3.0 / (4.0 * kPi) * c * c));
        err = std::max(err, std::abs(b.at(i, j) - 3.0 / (8.0 * kPi) * s * s));
      }
    CHECK(err < 5e-3);
  }

  TEST_CASE("rotated gas peaks at phi = 0 and pi and matches the series mean") {
    const auto members = cold_gas(20.0);
    const auto p = protocol(4.0, 4.0, kPi / 4);
    const auto d = revival_averaged_distribution(p, members, 64, 64);
    std::vector<double> marginal(d.phi.size(), 0.0);
    for (std::size_t i = 0; i < d.theta.size(); ++i)
      for (std::size_t j = 0; j < d.phi.size(); ++j) marginal[j] += d.at(i, j) * std::sin(d.theta[i]);
    const auto best = static_cast<std::size_t>(std::max_element(marginal.begin(), marginal.end()) - marginal.begin());
    const double phi = d.phi[best];
    const double dist = std::min({std::abs(phi), std::abs(phi - kPi), std::abs(phi - kTwoPi)});
    CHECK(dist < 2.0 * kTwoPi / 64);
    const auto r = run_protocol(p, members);
    CHECK(d.cos2phi == doctest::Approx(r.cos2phi_revival_mean).epsilon(5e-3));
  }
}

TEST_SUITE("fractional revivals") {
  // One revival of a flat series with narrow bumps, a slow drift and weak noise.
  ObservableSeries synthetic(const std::vector<double>& bumps, double drift) {
    ObservableSeries s;
    s.name = "cos2phi";
    std::mt19937 rng(7);
    std::normal_distribution<double> noise(0.0, 1e-4);
    const int n = 2048;
    for (int k = 0; k < n; ++k) {
      const double f = static_cast<double>(k) / n;
      double v = 0.5 + drift * std::sin(kTwoPi * f) + noise(rng);
      for (double b : bumps) v += 2e-3 * std::exp(-0.5 * std::pow((f - b) / 0.002, 2));
      s.times.push_back(kTwoPi * f);
      s.values.push_back(v);
    }
    return s;
  }

  TEST_CASE("narrow features stand out and quiet times do not") {
    const auto s = synthetic({1.0 / 3.0, 1.0 / 6.0}, 0.01);
    const std::vector<double> fr{1.0 / 3.0, 1.0 / 6.0, 0.2, 0.41};
    const auto rep = analyze_fractional_revivals(s, fr);
    REQUIRE(rep.features.size() == 4);
    CHECK(rep.features[0].snr > 5.0);
    CHECK(rep.features[1].snr > 5.0);
    CHECK(rep.features[2].snr < 5.0);
    CHECK(rep.features[3].snr < 5.0);
    CHECK(rep.mean == doctest::Approx(0.5).epsilon(1e-3));
  }

  TEST_CASE("a slow drift alone is not a feature") {
    const std::vector<double> fr{0.25, 1.0 / 3.0};
    const auto rep = analyze_fractional_revivals(synthetic({}, 0.02), fr);
    for (const auto& f : rep.features) CHECK(f.snr < 5.0);
  }

  TEST_CASE("bad inputs are rejected") {
    const auto s = synthetic({}, 0.0);
    const std::vector<double> fr{0.5};
    CHECK_THROWS_AS(analyze_fractional_revivals(s, fr, 0.0), DomainError);
    CHECK_THROWS_AS(analyze_fractional_revivals(s, fr, 0.6), DomainError);
  }
}
