#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "idim/data_matrix.hpp"
#include "idim/detail/parallel.hpp"
#include "idim/errors.hpp"
#include "idim/neighbors.hpp"
#include "idim/rng.hpp"
#include "idim/special_functions.hpp"

namespace idim {

/// Ceiling for the fitted concentration. The inverse-A approximation has a
/// pole at resultant length 1; saturated fits are capped here and flagged.
inline constexpr double kTauCap = 1e5;

/// von Mises parameters: mean direction in (-pi, pi] and concentration >= 0.
struct VonMisesParams {
  double nu = 0.0;
  double tau = 0.0;
  bool saturated = false;  // resultant length numerically 1, tau capped
};

inline double normalize_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

/// von Mises density exp(tau cos(theta - nu)) / (2 pi I0(tau)), evaluated in
/// log space so large concentrations cannot overflow.
inline double vm_pdf(double theta, const VonMisesParams& p) {
  if (!(theta >= -std::numbers::pi - 1e-12 && theta <= std::numbers::pi + 1e-12))
    throw ParameterError("vm_pdf: theta outside [-pi, pi]");
  if (!(p.tau >= 0.0)) throw ParameterError("vm_pdf: tau must be >= 0");
  return std::exp(p.tau * std::cos(theta - p.nu) - std::log(2.0 * std::numbers::pi) -
                  log_bessel_i(0, p.tau));
}

namespace detail {

/// Fisher's three-branch approximation of A^{-1}(eta).
inline double concentration_from_resultant(double eta) {
  if (eta < 0.53) return 2.0 * eta + eta * eta * eta + 5.0 * std::pow(eta, 5) / 6.0;
  if (eta < 0.85) return -0.4 + 1.39 * eta + 0.43 / (1.0 - eta);
  return 1.0 / (eta * eta * eta - 4.0 * eta * eta + 3.0 * eta);
}

inline VonMisesParams fit_vm_from_sums(double sum_cos, double sum_sin, std::size_t n) {
  VonMisesParams p;
  p.nu = normalize_angle(std::atan2(sum_sin, sum_cos));
  const double eta = std::min(std::hypot(sum_cos / n, sum_sin / n), 1.0);
  if (eta >= 1.0 - 1e-10) {
    p.tau = kTauCap;
    p.saturated = true;
    return p;
  }
  const double tau = concentration_from_resultant(eta);
  if (tau > kTauCap) {
    p.tau = kTauCap;
    p.saturated = true;
  } else {
    p.tau = std::max(tau, 0.0);
  }
  return p;
}

}  // namespace detail

/// Maximum-likelihood von Mises fit: mean direction from the quadrant-aware
/// arctangent of the summed sine and cosine, concentration from the
/// three-branch inverse of A(tau) = I1/I0 applied to the resultant length.
inline VonMisesParams fit_vm(std::span<const double> angles) {
  if (angles.size() < 2) throw ParameterError("fit_vm: need at least 2 angles");
  double sum_cos = 0.0, sum_sin = 0.0;
  for (double a : angles) {
    sum_cos += std::cos(a);
    sum_sin += std::sin(a);
  }
  return detail::fit_vm_from_sums(sum_cos, sum_sin, angles.size());
}

/// Closed-form KL divergence between two von Mises densities:
///   ln(I0(tau2)/I0(tau1)) + A(tau1) (tau1 - tau2 cos(nu2 - nu1)),
/// using I1(-tau) = -I1(tau) to collapse the odd-order terms. Bessel factors
/// stay in log space; round-off negatives clamp to zero.
inline double kl_von_mises(const VonMisesParams& p1, const VonMisesParams& p2) {
  if (!(p1.tau >= 0.0) || !(p2.tau >= 0.0)) throw ParameterError("kl_von_mises: tau must be >= 0");
  const double log_ratio = log_bessel_i(0, p2.tau) - log_bessel_i(0, p1.tau);
  const double kl =
      log_ratio + bessel_ratio_A(p1.tau) * (p1.tau - p2.tau * std::cos(p2.nu - p1.nu));
  return std::max(kl, 0.0);
}

/// Angle statistics of a dataset: one von Mises fit per neighborhood plus
/// their means. The mean direction is the circular mean of the per-point
/// directions; the concentration mean is arithmetic.
struct AngleStats {
  std::vector<VonMisesParams> per_point;
  double mu_nu = 0.0;
  double mu_tau = 0.0;
  std::size_t excluded_pairs = 0;
  std::size_t saturated = 0;
};

inline AngleStats fit_angle_stats(const DataMatrix& data, const NeighborhoodIndex& index,
                                  double epsilon = 1e-12) {
  AngleStats stats;
  stats.per_point.resize(index.n);
  std::vector<std::size_t> excluded(index.n, 0);
  detail::parallel_for(index.n, [&](std::size_t i) {
    const AngleSet set = pairwise_angles(data, index, i, epsilon);
    excluded[i] = set.excluded_pairs;
    stats.per_point[i] = fit_vm(set.angles);
  });
  double sum_cos = 0.0, sum_sin = 0.0, sum_tau = 0.0;
  for (std::size_t i = 0; i < index.n; ++i) {
    const auto& p = stats.per_point[i];
    sum_cos += std::cos(p.nu);
    sum_sin += std::sin(p.nu);
    sum_tau += p.tau;
    stats.excluded_pairs += excluded[i];
    if (p.saturated) ++stats.saturated;
  }
  stats.mu_nu = normalize_angle(std::atan2(sum_sin, sum_cos));
  stats.mu_tau = sum_tau / static_cast<double>(index.n);
  return stats;
}

/// Monte-Carlo diagnostic for the concentration-dimension link: fits a von
/// Mises law to all pairwise angles of uniformly random unit directions in
/// R^d and returns the fitted concentration, which approaches d as d grows.
inline double concentration_of_dimension(std::size_t d, std::size_t n_vectors, std::uint64_t seed) {
  if (d < 2) throw ParameterError("concentration_of_dimension: d must be >= 2");
  if (n_vectors < 2) throw ParameterError("concentration_of_dimension: need at least 2 vectors");
  Rng rng(seed);
  std::vector<double> dirs(n_vectors * d);
  for (std::size_t i = 0; i < n_vectors; ++i) {
    double norm2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double g = rng.normal();
      dirs[i * d + j] = g;
      norm2 += g * g;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t j = 0; j < d; ++j) dirs[i * d + j] *= inv;
  }
  double sum_cos = 0.0, sum_sin = 0.0;
  std::size_t count = 0;
  for (std::size_t a = 0; a + 1 < n_vectors; ++a) {
    for (std::size_t b = a + 1; b < n_vectors; ++b) {
      double dot = 0.0;
      for (std::size_t j = 0; j < d; ++j) dot += dirs[a * d + j] * dirs[b * d + j];
      const double theta = std::acos(std::clamp(dot, -1.0, 1.0));
      sum_cos += std::cos(theta);
      sum_sin += std::sin(theta);
      ++count;
    }
  }
  return detail::fit_vm_from_sums(sum_cos, sum_sin, count).tau;
}

}  // namespace idim
