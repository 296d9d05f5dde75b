#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include "idim/errors.hpp"

namespace idim {

/// Euler-Mascheroni constant to full double precision.
inline constexpr double kEulerGamma = 0.57721566490153286061;

namespace detail {

/// Power series sum_m (x^2/4)^m / (m! (m+v)!), the I_v(x) series without the
/// (x/2)^v prefactor. All terms positive, converges for any finite x; used
/// below the asymptotic switch point where it stays within double range.
inline double bessel_series(int order, double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int m = 1; m < 200; ++m) {
    term *= q / (static_cast<double>(m) * (m + order));
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

/// Truncated uniform asymptotic correction series for I_v:
///   I_v(x) ~ e^x / sqrt(2 pi x) * sum_m t_m,
///   t_0 = 1, t_m = t_{m-1} * ((2m-1)^2 - 4 v^2) / (8 m x).
/// Divergent; summation stops at the smallest term.
inline double bessel_asymptotic_series(int order, double x) {
  const double v4 = 4.0 * order * order;
  double term = 1.0;
  double sum = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int m = 1; m < 60; ++m) {
    const double f = (2.0 * m - 1.0) * (2.0 * m - 1.0) - v4;
    term *= f / (8.0 * m * x);
    if (std::abs(term) >= prev) break;  // optimal truncation reached
    sum += term;
    prev = std::abs(term);
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum;
}

/// Series/asymptotic switch point. Validated against the extended-precision
/// series oracle in the test suite.
inline constexpr double kBesselSwitch = 20.0;

}  // namespace detail

/// ln I_order(x) for order in {0, 1}, x >= 0. Never overflows: the asymptotic
/// branch carries the e^x factor in log space. I_1(0) = 0 is reported as
/// -infinity (log of zero).
inline double log_bessel_i(int order, double x) {
  if (order != 0 && order != 1) throw ParameterError("log_bessel_i: order must be 0 or 1");
  if (!(x >= 0.0) || !std::isfinite(x)) throw ParameterError("log_bessel_i: x must be finite and >= 0");
  if (x == 0.0) return order == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  if (x < detail::kBesselSwitch) {
    double lg = std::log(detail::bessel_series(order, x));
    if (order == 1) lg += std::log(0.5 * x);
    return lg;
  }
  return x - 0.5 * std::log(2.0 * std::numbers::pi * x) +
         std::log(detail::bessel_asymptotic_series(order, x));
}

/// A(x) = I_1(x) / I_0(x). Strictly increasing, A(0) = 0, A(x) -> 1 as
/// x -> infinity. Continued fraction (modified Lentz) below the asymptotic
/// regime, ratio of asymptotic correction series beyond, so the exponential
/// factors cancel exactly and no overflow can occur.
inline double bessel_ratio_A(double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw ParameterError("bessel_ratio_A: x must be finite and >= 0");
  if (x == 0.0) return 0.0;
  if (x >= 40.0) {
    return detail::bessel_asymptotic_series(1, x) / detail::bessel_asymptotic_series(0, x);
  }
  // I_1/I_0 = 1 / (2/x + 1 / (4/x + 1 / (6/x + ...))), from the three-term
  // recurrence I_{v-1} = (2v/x) I_v + I_{v+1}.
  const double tiny = 1e-300;
  double f = tiny;
  double c = f;
  double d = 0.0;
  for (int j = 1; j < 400; ++j) {
    const double b = 2.0 * j / x;
    d = b + d;
    if (d == 0.0) d = tiny;
    c = b + 1.0 / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return f;
}

/// Digamma via the recurrence Psi(x) = Psi(x+1) - 1/x up to the asymptotic
/// regime, then the Bernoulli expansion. Absolute accuracy ~1e-13 or better
/// for x in [1e-3, 1e6].
inline double digamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw ParameterError("digamma: x must be finite and > 0");
  double result = 0.0;
  while (x < 10.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Psi(x) = ln x - 1/(2x) - sum B_{2n} / (2n x^{2n}),  B_2..B_12.
  double series = inv2 * (1.0 / 12.0 -
                  inv2 * (1.0 / 120.0 -
                  inv2 * (1.0 / 252.0 -
                  inv2 * (1.0 / 240.0 -
                  inv2 * (1.0 / 132.0 -
                  inv2 * (691.0 / 32760.0))))));
  return result + std::log(x) - 0.5 * inv - series;
}

/// H_k = sum_{i=1..k} 1/i, summed in ascending i.
inline double harmonic(int k) {
  if (k < 1) throw ParameterError("harmonic: k must be >= 1");
  double h = 0.0;
  for (int i = 1; i <= k; ++i) h += 1.0 / i;
  return h;
}

}  // namespace idim
