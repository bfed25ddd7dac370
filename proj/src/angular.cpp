#include "rotor/angular.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rotor/errors.hpp"

namespace rotor {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kLogTableSize = 4096;

const std::vector<long double>& log_factorial_table() {
  static const std::vector<long double> table = [] {
    std::vector<long double> t(kLogTableSize);
    for (int k = 0; k < kLogTableSize; ++k) t[static_cast<std::size_t>(k)] = lgammal(k + 1.0L);
    return t;
  }();
  return table;
}

/// ln Gamma(n / 2) for integer n >= 1.
long double log_gamma_half(int n) {
  static const std::vector<long double> table = [] {
    std::vector<long double> t(2 * kLogTableSize);
    for (std::size_t k = 1; k < t.size(); ++k) t[k] = lgammal(static_cast<long double>(k) / 2.0L);
    return t;
  }();
  if (n >= 1 && n < static_cast<int>(table.size())) return table[static_cast<std::size_t>(n)];
  return lgammal(static_cast<long double>(n) / 2.0L);
}

void require_lm(int l, int m, const char* where) {
  if (l < 0 || std::abs(m) > l) {
    throw DomainError(std::string(where) + ": invalid quantum numbers (l=" + std::to_string(l) +
                      ", m=" + std::to_string(m) + ")");
  }
}

/// ln N_lm, the spherical-harmonic normalization, for any |m| <= l.
long double log_norm(int l, int m) {
  return 0.5L * (std::log(static_cast<long double>(2 * l + 1) / (4.0L * std::numbers::pi_v<long double>)) +
                 log_factorial(l - m) - log_factorial(l + m));
}

/// Coefficients of the expansion
///   P_l^m(cos t) = sum_p a_p cos^{l-m-2p}(t) sin^{m+2p}(t)   (no Condon-Shortley phase)
/// stored as (ln|a_p|, sign).
struct WongCoefficients {
  std::vector<long double> log_abs;
  std::vector<int> sign;
};

WongCoefficients wong_coefficients(int l, int m) {
  WongCoefficients c;
  const int p_max = (l - m) / 2;
  const long double ln2 = std::log(2.0L);
  for (int p = 0; p <= p_max; ++p) {
    c.log_abs.push_back(log_factorial(l + m) - (m + 2 * p) * ln2 - log_factorial(m + p) -
                        log_factorial(p) - log_factorial(l - m - 2 * p));
    c.sign.push_back((p & 1) ? -1 : 1);
  }
  return c;
}

/// Closed-form overlap of non-negative orders without the Condon-Shortley factor.
long double wong_sum(int l1, int m1, int l2, int m2) {
  if (((l1 + l2 - m1 - m2) & 1) != 0) return 0.0L;  // odd integrand in cos t
  const auto a1 = wong_coefficients(l1, m1);
  const auto a2 = wong_coefficients(l2, m2);
  const long double log_den = log_gamma_half(l1 + l2 + 3);

  std::vector<long double> logs;
  std::vector<int> signs;
  logs.reserve(a1.log_abs.size() * a2.log_abs.size());
  for (std::size_t p1 = 0; p1 < a1.log_abs.size(); ++p1) {
    for (std::size_t p2 = 0; p2 < a2.log_abs.size(); ++p2) {
      const int p = static_cast<int>(p1 + p2);
      const int cos_power = l1 + l2 - m1 - m2 - 2 * p;
      const int sin_power = m1 + m2 + 2 * p;
      logs.push_back(a1.log_abs[p1] + a2.log_abs[p2] + log_gamma_half(cos_power + 1) +
                     log_gamma_half(sin_power + 2) - log_den);
      signs.push_back(a1.sign[p1] * a2.sign[p2]);
    }
  }
  const long double top = *std::max_element(logs.begin(), logs.end());
  long double sum = 0.0L;
  for (std::size_t k = 0; k < logs.size(); ++k) sum += signs[k] * std::exp(logs[k] - top);
  return sum * std::exp(top);
}

/// Quadrature overlap of normalized functions.  Same-parity orders give a
/// polynomial integrand in x = cos t and an exact rule; otherwise the
/// integrand is a trigonometric polynomial in t and is integrated over t.
double normalized_overlap_quadrature(int l1, int m1, int l2, int m2) {
  double sum = 0.0;
  if (((m1 + m2) & 1) == 0) {
    const auto rule = gauss_legendre((l1 + l2) / 2 + 2);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double x = rule.nodes[k];
      sum += rule.weights[k] * normalized_legendre(l1, m1, x) * normalized_legendre(l2, m2, x);
    }
  } else {
    const auto rule = gauss_legendre(l1 + l2 + 48);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double t = 0.5 * kPi * (rule.nodes[k] + 1.0);
      const double x = std::cos(t);
      sum += 0.5 * kPi * rule.weights[k] * std::sin(t) * normalized_legendre(l1, m1, x) *
             normalized_legendre(l2, m2, x);
    }
  }
  return sum;
}

}  // namespace

long double log_factorial(int k) {
  if (k < 0) throw DomainError("log_factorial: negative argument");
  if (k < kLogTableSize) return log_factorial_table()[static_cast<std::size_t>(k)];
  return lgammal(k + 1.0L);
}

double assoc_legendre(int l, int m, double x) {
  if (m < 0 || l < 0 || m > l) {
    throw DomainError("assoc_legendre: require 0 <= m <= l (l=" + std::to_string(l) +
                      ", m=" + std::to_string(m) + ")");
  }
  if (!(std::abs(x) <= 1.0)) throw DomainError("assoc_legendre: |x| must not exceed 1");

  double pmm = 1.0;
  if (m > 0) {
    const double s = std::sqrt((1.0 - x) * (1.0 + x));
    double odd = 1.0;
    for (int k = 1; k <= m; ++k) {
      pmm *= -odd * s;
      odd += 2.0;
    }
  }
  if (l == m) return pmm;
  double pm1 = x * (2 * m + 1) * pmm;
  if (l == m + 1) return pm1;
  double pl = 0.0;
  for (int ll = m + 2; ll <= l; ++ll) {
    pl = (x * (2 * ll - 1) * pm1 - (ll + m - 1) * pmm) / (ll - m);
    pmm = pm1;
    pm1 = pl;
  }
  return pl;
}

double negate_m_legendre(int l, int m, double value) {
  if (m < 0 || l < 0 || m > l) throw DomainError("negate_m_legendre: require 0 <= m <= l");
  const long double ratio = std::exp(log_factorial(l - m) - log_factorial(l + m));
  return static_cast<double>(((m & 1) ? -1.0L : 1.0L) * ratio * value);
}

double normalized_legendre(int l, int m, double x) {
  require_lm(l, m, "normalized_legendre");
  if (!(std::abs(x) <= 1.0)) throw DomainError("normalized_legendre: |x| must not exceed 1");
  const int am = std::abs(m);
  const double s = std::sqrt((1.0 - x) * (1.0 + x));
  double pmm = 1.0 / std::sqrt(4.0 * kPi);
  for (int k = 1; k <= am; ++k) pmm *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * s;
  double result = pmm;
  if (l > am) {
    double pm1 = x * std::sqrt(2.0 * am + 3.0) * pmm;
    result = pm1;
    for (int ll = am + 2; ll <= l; ++ll) {
      const double a = std::sqrt((4.0 * ll * ll - 1.0) / (static_cast<double>(ll) * ll - am * am));
      const double b = std::sqrt((static_cast<double>(ll - 1) * (ll - 1) - am * am) /
                                 (4.0 * (ll - 1) * (ll - 1) - 1.0));
      result = a * (x * pm1 - b * pmm);
      pmm = pm1;
      pm1 = result;
    }
  }
  return (m < 0 && (am & 1)) ? -result : result;
}

NormalizedLegendreTable::NormalizedLegendreTable(int l_max, double x) : l_max_(l_max) {
  if (l_max < 0) throw DomainError("legendre table: l_max must be non-negative");
  if (!(std::abs(x) <= 1.0)) throw DomainError("legendre table: |x| must not exceed 1");
  values_.assign(offset(l_max + 1), 0.0);
  const double s = std::sqrt((1.0 - x) * (1.0 + x));
  double pmm = 1.0 / std::sqrt(4.0 * kPi);
  for (int m = 0; m <= l_max; ++m) {
    if (m > 0) pmm *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
    values_[offset(m) + static_cast<std::size_t>(m)] = pmm;
    if (m == l_max) break;
    double prev = pmm;
    double cur = x * std::sqrt(2.0 * m + 3.0) * pmm;
    values_[offset(m + 1) + static_cast<std::size_t>(m)] = cur;
    for (int l = m + 2; l <= l_max; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - m * m));
      const double b = std::sqrt((static_cast<double>(l - 1) * (l - 1) - m * m) /
                                 (4.0 * (l - 1) * (l - 1) - 1.0));
      const double next = a * (x * cur - b * prev);
      values_[offset(l) + static_cast<std::size_t>(m)] = next;
      prev = cur;
      cur = next;
    }
  }
}

double wigner_3j(int l1, int l2, int l3, int m1, int m2, int m3) {
  require_lm(l1, m1, "wigner_3j");
  require_lm(l2, m2, "wigner_3j");
  require_lm(l3, m3, "wigner_3j");
  if (m1 + m2 + m3 != 0) return 0.0;
  if (l3 < std::abs(l1 - l2) || l3 > l1 + l2) return 0.0;
  if (m1 == 0 && m2 == 0 && ((l1 + l2 + l3) & 1)) return 0.0;

  const long double log_triangle = log_factorial(l1 + l2 - l3) + log_factorial(l1 - l2 + l3) +
                                   log_factorial(-l1 + l2 + l3) - log_factorial(l1 + l2 + l3 + 1);
  const long double log_pref =
      0.5L * (log_triangle + log_factorial(l1 + m1) + log_factorial(l1 - m1) +
              log_factorial(l2 + m2) + log_factorial(l2 - m2) + log_factorial(l3 + m3) +
              log_factorial(l3 - m3));

  const int k_min = std::max({0, l2 - l3 - m1, l1 - l3 + m2});
  const int k_max = std::min({l1 + l2 - l3, l1 - m1, l2 + m2});
  if (k_min > k_max) return 0.0;

  std::vector<long double> logs;
  logs.reserve(static_cast<std::size_t>(k_max - k_min + 1));
  for (int k = k_min; k <= k_max; ++k) {
    logs.push_back(log_pref -
                   (log_factorial(k) + log_factorial(l3 - l2 + k + m1) +
                    log_factorial(l3 - l1 + k - m2) + log_factorial(l1 + l2 - l3 - k) +
                    log_factorial(l1 - k - m1) + log_factorial(l2 - k + m2)));
  }
  const long double top = *std::max_element(logs.begin(), logs.end());
  long double sum = 0.0L;
  for (int k = k_min; k <= k_max; ++k) {
    const long double term = std::exp(logs[static_cast<std::size_t>(k - k_min)] - top);
    sum += (k & 1) ? -term : term;
  }
  const int phase = l1 - l2 - m3;
  const long double value = sum * std::exp(top);
  return static_cast<double>((phase & 1) ? -value : value);
}

double triple_y_integral(int l1, int m1, int l2, int m2, int l3, int m3) {
  require_lm(l1, m1, "triple_y_integral");
  require_lm(l2, m2, "triple_y_integral");
  require_lm(l3, m3, "triple_y_integral");
  if (m1 + m2 + m3 != 0) return 0.0;
  const double zero_row = wigner_3j(l1, l2, l3, 0, 0, 0);
  if (zero_row == 0.0) return 0.0;
  const double pref = std::sqrt((2.0 * l1 + 1.0) * (2.0 * l2 + 1.0) * (2.0 * l3 + 1.0) / (4.0 * kPi));
  return pref * zero_row * wigner_3j(l1, l2, l3, m1, m2, m3);
}

double ylm_braket(int lb, int mb, int lq, int q, int lk, int mk) {
  const double value = triple_y_integral(lb, -mb, lq, q, lk, mk);
  return (mb & 1) ? -value : value;
}

double wong_overlap(int l1, int m1, int l2, int m2) {
  require_lm(l1, m1, "wong_overlap");
  require_lm(l2, m2, "wong_overlap");
  const int a1 = std::abs(m1);
  const int a2 = std::abs(m2);
  if (((l1 + l2 + a1 + a2) & 1) != 0) return 0.0;

  if (l1 + l2 > kWongQuadratureThreshold) {
    const long double scale = std::exp(-log_norm(l1, m1) - log_norm(l2, m2));
    return static_cast<double>(scale * normalized_overlap_quadrature(l1, m1, l2, m2));
  }
  // Condon-Shortley phases of both factors, then Eq. P^{-m} relation for
  // negative orders.
  long double value = wong_sum(l1, a1, l2, a2);
  if ((a1 + a2) & 1) value = -value;
  if (m1 < 0) value *= ((a1 & 1) ? -1.0L : 1.0L) * std::exp(log_factorial(l1 - a1) - log_factorial(l1 + a1));
  if (m2 < 0) value *= ((a2 & 1) ? -1.0L : 1.0L) * std::exp(log_factorial(l2 - a2) - log_factorial(l2 + a2));
  return static_cast<double>(value);
}

double normalized_overlap(int l1, int m1, int l2, int m2) {
  require_lm(l1, m1, "normalized_overlap");
  require_lm(l2, m2, "normalized_overlap");
  if (((l1 + l2 + m1 + m2) & 1) != 0) return 0.0;
  if (l1 + l2 > kWongQuadratureThreshold) return normalized_overlap_quadrature(l1, m1, l2, m2);

  const int a1 = std::abs(m1);
  const int a2 = std::abs(m2);
  long double value = wong_sum(l1, a1, l2, a2) * std::exp(log_norm(l1, a1) + log_norm(l2, a2));
  // Condon-Shortley phase of each factor; the normalized functions obey
  // Pbar_l^{-m} = (-1)^m Pbar_l^m, which cancels it for negative orders.
  if (m1 > 0 && (a1 & 1)) value = -value;
  if (m2 > 0 && (a2 & 1)) value = -value;
  return static_cast<double>(value);
}

GaussLegendreRule gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: need at least one node");
  GaussLegendreRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const long double pi = std::numbers::pi_v<long double>;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    long double z = std::cos(pi * (i + 0.75L) / (n + 0.5L));
    long double dp = 0.0L;
    for (int iter = 0; iter < 100; ++iter) {
      long double p0 = 1.0L;
      long double p1 = z;
      for (int k = 2; k <= n; ++k) {
        const long double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0L;
      dp = n * (z * p1 - p0) / (z * z - 1.0L);
      const long double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-19L) break;
    }
    {
      long double p0 = 1.0L;
      long double p1 = z;
      for (int k = 2; k <= n; ++k) {
        const long double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0L;
      dp = n * (z * p1 - p0) / (z * z - 1.0L);
    }
    const long double w = 2.0L / ((1.0L - z * z) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = static_cast<double>(-z);
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = static_cast<double>(z);
    rule.weights[static_cast<std::size_t>(i)] = static_cast<double>(w);
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = static_cast<double>(w);
  }
  return rule;
}

}  // namespace rotor
