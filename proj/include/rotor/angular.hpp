#pragma once

// Special functions on the sphere.
//
// Phase convention: associated Legendre functions carry the Condon-Shortley
// factor (-1)^m, so P_1^1(x) = -sqrt(1 - x^2), and
//   Y_l^m(theta, phi) = N_lm P_l^m(cos theta) e^{i m phi},
//   N_lm = sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!),
// which gives the standard relation Y_l^{m*} = (-1)^m Y_l^{-m}.

#include <vector>

namespace rotor {

/// Unnormalized P_l^m(x), 0 <= m <= l, |x| <= 1, by upward recurrence in l.
double assoc_legendre(int l, int m, double x);

/// P_l^{-m} from P_l^m: (-1)^m (l-m)!/(l+m)! * value, ratio taken in log space.
double negate_m_legendre(int l, int m, double value);

/// theta part of Y_l^m, i.e. N_lm P_l^m(x), for any |m| <= l.  Computed with
/// the normalized recurrence, so it stays finite for large l and m.
double normalized_legendre(int l, int m, double x);

/// All normalized values N_lm P_l^m(x) for 0 <= m <= l <= l_max at one x.
class NormalizedLegendreTable {
 public:
  NormalizedLegendreTable(int l_max, double x);

  int l_max() const noexcept { return l_max_; }
  /// m may be negative.
  double operator()(int l, int m) const noexcept {
    if (m >= 0) return values_[offset(l) + static_cast<std::size_t>(m)];
    const double v = values_[offset(l) + static_cast<std::size_t>(-m)];
    return (m & 1) ? -v : v;
  }

 private:
  static std::size_t offset(int l) noexcept {
    return static_cast<std::size_t>(l) * static_cast<std::size_t>(l + 1) / 2;
  }
  int l_max_;
  std::vector<double> values_;
};

/// Wigner 3j symbol (l1 l2 l3; m1 m2 m3) from the Racah sum with log
/// factorials.  Exactly zero when m1+m2+m3 != 0 or the triangle rule fails.
double wigner_3j(int l1, int l2, int l3, int m1, int m2, int m3);

/// Integral over the sphere of Y_{l1}^{m1} Y_{l2}^{m2} Y_{l3}^{m3}, none of
/// them conjugated.
double triple_y_integral(int l1, int m1, int l2, int m2, int l3, int m3);

/// <Y_{lb}^{mb} | Y_{lq}^{q} | Y_{lk}^{mk}>, bra conjugated through
/// Y^{m*} = (-1)^m Y^{-m}.
double ylm_braket(int lb, int mb, int lq, int q, int lk, int mk);

/// Above this value of l1 + l2 the Legendre overlap switches from the
/// closed-form double sum to Gauss-Legendre quadrature.
inline constexpr int kWongQuadratureThreshold = 60;

/// int_0^pi P_{l1}^{m1}(cos t) P_{l2}^{m2}(cos t) sin t dt for unnormalized
/// Condon-Shortley functions; negative orders go through negate_m_legendre.
double wong_overlap(int l1, int m1, int l2, int m2);

/// Same integral for the normalized functions N_lm P_l^m.
double normalized_overlap(int l1, int m1, int l2, int m2);

struct GaussLegendreRule {
  std::vector<double> nodes;    // ascending, in (-1, 1)
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (exact to degree 2n - 1).
GaussLegendreRule gauss_legendre(int n);

/// Natural log of k! for k >= 0 in extended precision.
long double log_factorial(int k);

}  // namespace rotor
