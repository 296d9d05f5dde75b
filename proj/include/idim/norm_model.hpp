#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "idim/errors.hpp"
#include "idim/special_functions.hpp"

namespace idim {

/// Normalized-distance statistics of one dataset: the per-point ratios and
/// the continuous ML dimension fitted to them.
struct NormStats {
  std::vector<double> rho;
  std::size_t k = 0;
  double d_ml = 1.0;
  bool degenerate = false;  // all ratios at the upper boundary
};

/// Ratios exactly at the boundary are pulled inside before taking logs.
inline constexpr double kRhoClip = 1e-9;

/// Density of the normalized nearest-neighbor distance for neighborhood size
/// k and dimension d: g(r) = k d r^(d-1) (1 - r^d)^(k-1) on [0, 1].
inline double norm_pdf(double r, std::size_t k, double d) {
  if (!(r >= 0.0 && r <= 1.0)) throw ParameterError("norm_pdf: r must lie in [0, 1]");
  if (k < 1) throw ParameterError("norm_pdf: k must be >= 1");
  if (!(d >= 1.0)) throw ParameterError("norm_pdf: d must be >= 1");
  const double rd = std::pow(r, d);
  return static_cast<double>(k) * d * std::pow(r, d - 1.0) * std::pow(1.0 - rd, static_cast<double>(k - 1));
}

/// Sum of ln g(rho_i; k, d). Boundary ratios are clipped; interior values are
/// untouched and the result is finite for every d >= 1.
inline double log_likelihood(const std::vector<double>& rho, std::size_t k, double d) {
  if (rho.empty()) throw ParameterError("log_likelihood: empty rho vector");
  if (k < 1 || !(d >= 1.0)) throw ParameterError("log_likelihood: need k >= 1 and d >= 1");
  double sum_log = 0.0;
  double sum_log1m = 0.0;
  for (double r : rho) {
    const double rc = std::clamp(r, kRhoClip, 1.0 - kRhoClip);
    const double lr = std::log(rc);
    sum_log += lr;
    sum_log1m += std::log1p(-std::exp(d * lr));
  }
  const double n = static_cast<double>(rho.size());
  return n * std::log(static_cast<double>(k) * d) + (d - 1.0) * sum_log +
         static_cast<double>(k - 1) * sum_log1m;
}

namespace detail {

/// ll(d) with the data-dependent log sums precomputed once per fit.
class LikelihoodProfile {
public:
  LikelihoodProfile(const std::vector<double>& rho, std::size_t k) : k_(k) {
    log_rho_.reserve(rho.size());
    for (double r : rho) {
      const double rc = std::clamp(r, kRhoClip, 1.0 - kRhoClip);
      log_rho_.push_back(std::log(rc));
      sum_log_ += log_rho_.back();
    }
  }

  double operator()(double d) const {
    double sum_log1m = 0.0;
    for (double lr : log_rho_) sum_log1m += std::log1p(-std::exp(d * lr));
    const double n = static_cast<double>(log_rho_.size());
    return n * std::log(static_cast<double>(k_) * d) + (d - 1.0) * sum_log_ +
           static_cast<double>(k_ - 1) * sum_log1m;
  }

private:
  std::size_t k_;
  std::vector<double> log_rho_;
  double sum_log_ = 0.0;
};

}  // namespace detail

/// Continuous maximizer of the distance log-likelihood over [1, d_max].
/// ll is strictly concave in d, so a doubling bracket followed by
/// golden-section refinement to 1e-3 absolute is exact enough and fully
/// deterministic. All ratios at the boundary flag the fit as degenerate
/// (the likelihood then increases without bound) and return d_max.
inline NormStats fit_ml_dimension(const std::vector<double>& rho, std::size_t k, double d_max) {
  if (!(d_max >= 1.0)) throw ParameterError("fit_ml_dimension: d_max must be >= 1");
  if (rho.empty()) throw ParameterError("fit_ml_dimension: empty rho vector");
  NormStats stats;
  stats.rho = rho;
  stats.k = k;

  bool all_boundary = true;
  for (double r : rho)
    if (r < 1.0 - 2.0 * kRhoClip) {
      all_boundary = false;
      break;
    }
  if (all_boundary) {
    stats.d_ml = d_max;
    stats.degenerate = true;
    return stats;
  }

  const detail::LikelihoodProfile ll(rho, k);

  // Doubling bracket: by concavity the maximizer lies in [lo, hi] once the
  // value stops rising (or hi reaches the ceiling, where golden-section
  // converges to the boundary on a still-rising profile).
  double lo = 1.0;
  double hi = std::min(2.0, d_max);
  double prev = ll(lo);
  double cur = ll(hi);
  while (cur > prev && hi < d_max) {
    lo = hi / 2.0 >= 1.0 ? hi / 2.0 : 1.0;
    prev = cur;
    hi = std::min(hi * 2.0, d_max);
    cur = ll(hi);
  }

  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = ll(x1), f2 = ll(x2);
  while (b - a > 1e-3) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = ll(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = ll(x1);
    }
  }
  stats.d_ml = std::clamp(0.5 * (a + b), 1.0, d_max);
  return stats;
}

/// Largest neighborhood size for which the alternating binomial sum below
/// retains usable precision in double arithmetic; beyond it the closed form
/// refuses and callers switch to kl_norms_numeric.
inline constexpr std::size_t kKlNormsMaxK = 40;

/// Closed-form KL divergence between the normalized-distance densities
/// g(.; k, d_hat) and g(.; k, d_check):
///   H_k (dc/dh) - 1 - H_{k-1} - ln(dc/dh)
///   - (k-1) sum_{i=0..k} (-1)^i C(k,i) Psi(1 + i dh/dc).
/// The alternating sum is evaluated with Kahan compensation in descending
/// magnitude order; it loses roughly one bit per unit k, hence the k cap.
inline double kl_norms(double d_hat, double d_check, std::size_t k) {
  if (!(d_hat >= 1.0) || !(d_check >= 1.0))
    throw ParameterError("kl_norms: dimensions must be >= 1");
  if (k < 1) throw ParameterError("kl_norms: k must be >= 1");
  if (k > kKlNormsMaxK)
    throw NumericError("kl_norms: closed form unusable for k > " + std::to_string(kKlNormsMaxK) +
                       " (alternating-sum cancellation); use kl_norms_numeric");
  if (d_hat == d_check) return 0.0;

  std::vector<double> terms(k + 1);
  double binom = 1.0;  // C(k, i), exact in double for k <= 40
  const double ratio = d_hat / d_check;
  for (std::size_t i = 0; i <= k; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    terms[i] = sign * binom * digamma(1.0 + static_cast<double>(i) * ratio);
    binom = binom * static_cast<double>(k - i) / static_cast<double>(i + 1);
  }
  std::sort(terms.begin(), terms.end(),
            [](double a, double b) { return std::abs(a) > std::abs(b); });
  double sum = 0.0, comp = 0.0, abs_sum = 0.0;
  for (double t : terms) {
    abs_sum += std::abs(t);
    const double y = t - comp;
    const double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
  }

  const double q = d_check / d_hat;
  const double kl = harmonic(static_cast<int>(k)) * q - 1.0 -
                    (k > 1 ? harmonic(static_cast<int>(k) - 1) : 0.0) - std::log(q) -
                    static_cast<double>(k - 1) * sum;
  // Roundoff carried into the result by the cancelling sum; with the k cap it
  // stays well below the value scale, so tripping this means the inputs are
  // pathological.
  const double noise = 2.2e-16 * abs_sum * static_cast<double>(k - 1);
  if (noise > std::max(1.0, std::abs(kl)))
    throw NumericError("kl_norms: alternating sum lost all significant digits");
  return std::max(kl, 0.0);
}

namespace detail {

inline double log_norm_pdf(double r, std::size_t k, double d) {
  if (r <= 0.0 || r >= 1.0) {
    // ln g is -inf at the endpoints whenever the corresponding factor
    // vanishes; callers treat that as a zero-density point.
    if (r == 0.0 && d == 1.0) return std::log(static_cast<double>(k));
    return -std::numeric_limits<double>::infinity();
  }
  const double lr = std::log(r);
  return std::log(static_cast<double>(k) * d) + (d - 1.0) * lr +
         static_cast<double>(k - 1) * std::log1p(-std::exp(d * lr));
}

/// tanh-sinh quadrature on (0, 1). Handles the logarithmic endpoint
/// singularities of the KL integrand; halves the step until the trapezoid
/// value stabilizes.
template <typename Fn>
double tanh_sinh_01(Fn&& f, double tol = 1e-10) {
  constexpr double half_pi = 1.5707963267948966;
  constexpr double t_max = 4.0;  // node weights underflow beyond
  auto eval = [&](double t) -> double {
    const double sh = half_pi * std::sinh(t);
    const double x = 0.5 * (1.0 + std::tanh(sh));
    const double ch = std::cosh(sh);
    const double w = 0.5 * half_pi * std::cosh(t) / (ch * ch);
    if (x <= 0.0 || x >= 1.0 || !(w > 0.0) || !std::isfinite(w)) return 0.0;
    return w * f(x);
  };
  double h = 0.5;
  double sum = eval(0.0);
  for (int j = 1; j * h <= t_max; ++j) sum += eval(j * h) + eval(-j * h);
  double integral = h * sum;
  for (int level = 0; level < 10; ++level) {
    const double h2 = 0.5 * h;
    double odd = 0.0;
    for (int j = 1; j * h2 <= t_max; j += 2) odd += eval(j * h2) + eval(-j * h2);
    const double next = 0.5 * integral + h2 * odd;
    if (level >= 2 && std::abs(next - integral) <= tol * std::max(1.0, std::abs(next)))
      return next;
    integral = next;
    h = h2;
  }
  return integral;
}

}  // namespace detail

/// Numeric evaluation of the same KL divergence via tanh-sinh quadrature of
/// integral g(r; k, d_hat) ln(g(r; k, d_hat) / g(r; k, d_check)) dr.
/// The supported path for k beyond the closed form's cap.
inline double kl_norms_numeric(double d_hat, double d_check, std::size_t k) {
  if (!(d_hat >= 1.0) || !(d_check >= 1.0))
    throw ParameterError("kl_norms_numeric: dimensions must be >= 1");
  if (k < 1) throw ParameterError("kl_norms_numeric: k must be >= 1");
  if (d_hat == d_check) return 0.0;
  auto integrand = [&](double r) {
    const double lg1 = detail::log_norm_pdf(r, k, d_hat);
    if (!std::isfinite(lg1)) return 0.0;
    const double lg2 = detail::log_norm_pdf(r, k, d_check);
    return std::exp(lg1) * (lg1 - lg2);
  };
  return std::max(detail::tanh_sinh_01(integrand), 0.0);
}

}  // namespace idim
