#include <cmath>

#include "doctest.h"
#include "rotor/errors.hpp"
#include "rotor/thermal.hpp"

using namespace rotor;

namespace {

MoleculeSpec n2(double even = 1.0, double odd = 1.0) { return {"N2", 1.9896, 0.7, even, odd}; }

// Partition sum carried far past the cutoff, with hc/k evaluated from the
// CODATA values of h, c and k.
std::vector<EnsembleMember> oracle_ensemble(double b, double t, double even, double odd, double cutoff) {
  const double h = 6.62607015e-34, c = 2.99792458e10, k = 1.380649e-23;
  std::vector<EnsembleMember> raw;
  double wmax = 0.0;
  for (int l = 0; l < 400; ++l) {
    const double g = (l % 2 == 0) ? even : odd;
    const double w = g * std::exp(-h * c * b * l * (l + 1.0) / (k * t));
    wmax = std::max(wmax, w);
    for (int m = -l; m <= l; ++m) raw.push_back({l, m, w});
  }
  std::vector<EnsembleMember> kept;
  double z = 0.0;
  for (const auto& e : raw)
    if (e.weight >= cutoff * wmax && e.weight > 0.0) {
      kept.push_back(e);
      z += e.weight;
    }
  for (auto& e : kept) e.weight /= z;
  return kept;
}

}  // namespace

TEST_SUITE("build_ensemble") {
  TEST_CASE("cold limit is the ground state") {
    const auto e = build_ensemble({n2(), 0.01, 1e-6});
    REQUIRE(e.size() == 1);
    CHECK(e[0].l == 0);
    CHECK(e[0].m == 0);
    CHECK(e[0].weight == 1.0);
  }

  TEST_CASE("N2 at 150 K against the partition-sum oracle") {
    const auto e = build_ensemble({n2(), 150.0, 1e-6});
    const auto ref = oracle_ensemble(1.9896, 150.0, 1.0, 1.0, 1e-6);
    REQUIRE(e.size() == ref.size());
    CHECK(max_member_l(e) == 26);
    double sum = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      CHECK(e[i].l == ref[i].l);
      CHECK(e[i].m == ref[i].m);
      CHECK(e[i].weight == doctest::Approx(ref[i].weight).epsilon(1e-9));
      sum += e[i].weight;
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }

  TEST_CASE("weights are m independent and non-increasing in l") {
    const auto e = build_ensemble({n2(), 100.0, 1e-6});
    CHECK(max_member_l(e) == 21);
    for (std::size_t i = 1; i < e.size(); ++i) {
      if (e[i].l == e[i - 1].l) CHECK(e[i].weight == e[i - 1].weight);
      else CHECK(e[i].weight <= e[i - 1].weight);
    }
  }

  TEST_CASE("spin isomer limits and 2:1 weighting") {
    for (const auto& m : build_ensemble({n2(1.0, 0.0), 100.0, 1e-6})) CHECK(m.l % 2 == 0);
    for (const auto& m : build_ensemble({n2(0.0, 1.0), 100.0, 1e-6})) CHECK(m.l % 2 == 1);
    const auto e = build_ensemble({n2(2.0, 1.0), 100.0, 1e-6});
    const auto ref = oracle_ensemble(1.9896, 100.0, 2.0, 1.0, 1e-6);
    REQUIRE(e.size() == ref.size());
    for (std::size_t i = 0; i < e.size(); ++i) CHECK(e[i].weight == doctest::Approx(ref[i].weight).epsilon(1e-9));
  }

  TEST_CASE("invalid specs") {
    CHECK_THROWS_AS(build_ensemble({n2(), -5.0, 1e-6}), ConfigError);
    CHECK_THROWS_AS(build_ensemble({n2(0.0, 0.0), 100.0, 1e-6}), ConfigError);
    CHECK_THROWS_AS(build_ensemble({MoleculeSpec{"bad", 0.0}, 100.0, 1e-6}), ConfigError);
  }

  TEST_CASE("mirror folding keeps total weight") {
    const auto e = build_ensemble({n2(), 100.0, 1e-6});
    const auto f = fold_mirror_members(e);
    double a = 0.0, b = 0.0;
    for (const auto& x : e) a += x.weight;
    for (const auto& x : f) {
      b += x.weight;
      CHECK(x.m >= 0);
    }
    CHECK(std::abs(a - b) < 1e-14);
    CHECK(f.size() == 22u * 23u / 2u);
  }

  TEST_CASE("revival time of the N2 preset") {
    CHECK(n2().revival_time_ps() == doctest::Approx(1e12 / (2.0 * 1.9896 * 2.99792458e10)));
    CHECK(n2().revival_time_ps() == doctest::Approx(8.383).epsilon(1e-3));
  }
}

TEST_SUITE("thermal_average") {
  ObservableSeries make(std::vector<double> v) {
    ObservableSeries s;
    s.name = "cos2theta";
    for (std::size_t i = 0; i < v.size(); ++i) s.times.push_back(0.1 * static_cast<double>(i));
    s.values = std::move(v);
    return s;
  }

  TEST_CASE("identities and grid mismatch") {
    const auto a = make({1.0, 2.0, 3.0});
    const std::vector<ObservableSeries> one{a};
    const std::vector<double> w1{1.0};
    CHECK(thermal_average(one, w1).values == a.values);
    const std::vector<ObservableSeries> two{a, a};
    const std::vector<double> w2{0.5, 0.5};
    CHECK(thermal_average(two, w2).values == a.values);
    auto b = make({1.0, 2.0, 3.0});
    b.times[2] = 0.3;
    const std::vector<ObservableSeries> bad{a, b};
    CHECK_THROWS_AS(thermal_average(bad, w2), DomainError);
  }
}
