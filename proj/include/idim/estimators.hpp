#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "idim/angle_model.hpp"
#include "idim/calibration.hpp"
#include "idim/data_matrix.hpp"
#include "idim/errors.hpp"
#include "idim/neighbors.hpp"
#include "idim/norm_model.hpp"

namespace idim {

struct KlProfilePoint {
  std::size_t d = 0;
  double kl_norm = 0.0;
  double kl_vm = 0.0;
  double total = 0.0;
};

struct EstimateResult {
  std::string method;
  double d_hat = 1.0;
  std::vector<KlProfilePoint> kl_profile;  // filled by the KL-matching estimators
  std::size_t k = 0;
  std::size_t k1 = 0, k2 = 0;  // neighbor range estimators only
  std::size_t max_dim = 0;
  std::string calibration_id;
  std::string notes;
  std::vector<std::string> warnings;
};

struct DancoOptions {
  /// Diagnostic mode: drop the angle term and match on distance statistics
  /// alone.
  bool norm_kl_only = false;
};

/// Gap below which the profile minimum is reported as a near-tie.
inline constexpr double kKlTieGap = 1e-6;

/// Joint KL-matching estimator: fits the normalized-distance ML dimension and
/// the mean von Mises parameters on the data, then returns the candidate d
/// whose reference statistics minimize the summed closed-form divergences.
/// Ties break toward the smaller dimension.
inline EstimateResult estimate_danco(const DataMatrix& data, std::size_t k, std::size_t max_dim,
                                     const CalibrationTable& calib, DancoOptions options = {}) {
  if (max_dim < 1) throw ParameterError("estimate_danco: max_dim must be >= 1");
  if (max_dim > calib.max_dim)
    throw ParameterError("estimate_danco: max_dim " + std::to_string(max_dim) +
                         " exceeds calibration depth " + std::to_string(calib.max_dim));
  ensure_coherent(calib, data.n_points(), k);

  const NeighborhoodIndex index = build_index(data, k);
  const NormStats norm = fit_ml_dimension(rho_statistics(index), k, kMlSearchCeiling);
  const AngleStats angle = fit_angle_stats(data, index);
  const VonMisesParams data_vm{angle.mu_nu, angle.mu_tau, false};

  EstimateResult result;
  result.method = options.norm_kl_only ? "danco[norm-only]" : "danco";
  result.k = k;
  result.max_dim = max_dim;
  result.calibration_id = calib.id();
  if (norm.degenerate) result.warnings.push_back("degenerate distance statistics (all ratios at 1)");
  if (angle.saturated > 0)
    result.warnings.push_back("von Mises saturation in " + std::to_string(angle.saturated) +
                              " neighborhoods (tau capped)");

  result.kl_profile.reserve(max_dim);
  for (std::size_t d = 1; d <= max_dim; ++d) {
    const CalibrationEntry& ref = calib.entry(d);
    KlProfilePoint p;
    p.d = d;
    p.kl_norm = k <= kKlNormsMaxK ? kl_norms(norm.d_ml, ref.d_check_ml, k)
                                  : kl_norms_numeric(norm.d_ml, ref.d_check_ml, k);
    p.kl_vm = options.norm_kl_only
                  ? 0.0
                  : kl_von_mises(data_vm, VonMisesParams{ref.mu_nu, ref.mu_tau, false});
    p.total = p.kl_norm + p.kl_vm;
    result.kl_profile.push_back(p);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < result.kl_profile.size(); ++i)
    if (result.kl_profile[i].total < result.kl_profile[best].total) best = i;
  double runner_up_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < result.kl_profile.size(); ++i)
    if (i != best)
      runner_up_gap = std::min(runner_up_gap, result.kl_profile[i].total - result.kl_profile[best].total);
  if (result.kl_profile.size() > 1 && runner_up_gap < kKlTieGap)
    result.warnings.push_back("near-tie in KL profile (gap < 1e-6); smaller d reported");

  result.d_hat = static_cast<double>(result.kl_profile[best].d);
  std::ostringstream notes;
  notes << "d_ml=" << norm.d_ml << " mu_nu=" << angle.mu_nu << " mu_tau=" << angle.mu_tau;
  result.notes = notes.str();
  return result;
}

/// Norm-only ML estimator: the continuous maximizer of the distance
/// log-likelihood over [1, max_dim], rounded to the nearest integer.
inline EstimateResult estimate_mind_ml(const DataMatrix& data, std::size_t k, std::size_t max_dim) {
  if (max_dim < 1) throw ParameterError("estimate_mind_ml: max_dim must be >= 1");
  const NeighborhoodIndex index = build_index(data, k);
  const NormStats norm = fit_ml_dimension(rho_statistics(index), k, static_cast<double>(max_dim));

  EstimateResult result;
  result.method = "mind_ml";
  result.k = k;
  result.max_dim = max_dim;
  result.d_hat = std::clamp<double>(std::round(norm.d_ml), 1.0, static_cast<double>(max_dim));
  if (norm.degenerate) result.warnings.push_back("degenerate distance statistics (all ratios at 1)");
  std::ostringstream notes;
  notes << "d_ml=" << norm.d_ml;
  result.notes = notes.str();
  return result;
}

/// Neighbor-distance maximum-likelihood estimator (Levina-Bickel form with
/// the small-sample normalization k-2): per point,
///   m_k(x) = (k-2) / sum_{j=1..k-1} ln(T_k(x) / T_j(x)),
/// averaged over points, then averaged over k in [k1, k2]. Fractional output.
inline EstimateResult estimate_mle(const DataMatrix& data, std::size_t k1, std::size_t k2) {
  if (k1 < 3) throw ParameterError("estimate_mle: k1 must be >= 3 (normalization needs k-2 > 0)");
  if (data.n_points() < 3 || !(k1 < k2) || k2 > data.n_points() - 2)
    throw ParameterError("estimate_mle: need k1 < k2 <= N-2");
  const NeighborhoodIndex index = build_index(data, k2 - 1);  // k2 neighbors per point
  const std::size_t n = data.n_points();
  for (std::size_t i = 0; i < n; ++i)
    if (index.distances(i)[0] <= 0.0)
      throw DataError("estimate_mle: zero nearest-neighbor distance at point " + std::to_string(i));

  double sum_over_k = 0.0;
  for (std::size_t k = k1; k <= k2; ++k) {
    double mean_mk = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto d = index.distances(i);
      const double log_tk = std::log(d[k - 1]);
      double s = 0.0;
      for (std::size_t j = 0; j + 1 < k; ++j) s += log_tk - std::log(d[j]);
      mean_mk += static_cast<double>(k - 2) / s;
    }
    sum_over_k += mean_mk / static_cast<double>(n);
  }

  EstimateResult result;
  result.method = "mle";
  result.k1 = k1;
  result.k2 = k2;
  result.max_dim = data.ambient_dim();
  const double raw = sum_over_k / static_cast<double>(k2 - k1 + 1);
  result.d_hat = std::clamp(raw, 1.0, static_cast<double>(data.ambient_dim()));
  if (result.d_hat != raw)
    result.warnings.push_back("estimate clamped to [1, D]");
  return result;
}

struct CdOptions {
  std::size_t grid_size = 32;
  /// Scale range as quantiles of the pairwise-distance distribution. The fit
  /// needs the small-scale regime; by the median the correlation integral has
  /// long saturated on high-dimensional data.
  double lower_quantile = 0.001;
  double upper_quantile = 0.05;
  /// Central slice of the log-r grid used for the least-squares fit.
  double fit_begin = 0.2;
  double fit_end = 0.8;
};

/// Correlation-dimension estimator: slope of log C(r) against log r over the
/// central scaling region, where C(r) is the fraction of point pairs within
/// distance r.
inline EstimateResult estimate_correlation_dim(const DataMatrix& data, CdOptions options = {}) {
  if (options.grid_size < 4) throw ParameterError("estimate_correlation_dim: grid too small");
  const std::size_t n = data.n_points();
  if (n < 3) throw ParameterError("estimate_correlation_dim: need at least 3 points");
  std::vector<double> pair_dist;
  pair_dist.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      pair_dist.push_back(std::sqrt(squared_distance(data.row(i), data.row(j))));
  std::sort(pair_dist.begin(), pair_dist.end());

  const auto quantile = [&](double q) {
    const std::size_t idx = static_cast<std::size_t>(q * (pair_dist.size() - 1));
    return pair_dist[idx];
  };
  const double lo = quantile(options.lower_quantile);
  const double hi = quantile(options.upper_quantile);
  if (!(lo > 0.0) || !(hi > lo))
    throw DegenerateGeometryError("estimate_correlation_dim: degenerate scaling region");

  const std::size_t g = options.grid_size;
  std::vector<double> log_r(g), log_c(g);
  const double log_lo = std::log(lo), log_hi = std::log(hi);
  for (std::size_t i = 0; i < g; ++i) {
    log_r[i] = log_lo + (log_hi - log_lo) * static_cast<double>(i) / static_cast<double>(g - 1);
    const double r = std::exp(log_r[i]);
    const auto count = std::upper_bound(pair_dist.begin(), pair_dist.end(), r) - pair_dist.begin();
    log_c[i] = std::log(static_cast<double>(count) / static_cast<double>(pair_dist.size()));
  }

  const std::size_t a = static_cast<std::size_t>(options.fit_begin * g);
  const std::size_t b = std::max<std::size_t>(a + 2, static_cast<std::size_t>(options.fit_end * g));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(b - a);
  for (std::size_t i = a; i < b; ++i) {
    sx += log_r[i];
    sy += log_c[i];
    sxx += log_r[i] * log_r[i];
    sxy += log_r[i] * log_c[i];
  }
  const double denom = m * sxx - sx * sx;
  if (denom <= 0.0) throw DegenerateGeometryError("estimate_correlation_dim: empty scaling region");
  const double slope = (m * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / m;
  double residual = 0.0;
  for (std::size_t i = a; i < b; ++i) {
    const double e = log_c[i] - (slope * log_r[i] + intercept);
    residual += e * e;
  }

  EstimateResult result;
  result.method = "cd";
  result.max_dim = data.ambient_dim();
  const double raw = slope;
  result.d_hat = std::clamp(raw, 1.0, static_cast<double>(data.ambient_dim()));
  if (result.d_hat != raw) result.warnings.push_back("estimate clamped to [1, D]");
  std::ostringstream notes;
  notes << "scaling region r=[" << lo << ", " << hi << "], fit rms="
        << std::sqrt(residual / m);
  result.notes = notes.str();
  return result;
}

/// Mean percentage error over (true, estimated) pairs: 100/M sum |d_hat-d|/d.
inline double mean_percentage_error(const std::vector<std::pair<double, double>>& results) {
  if (results.empty()) throw ParameterError("mean_percentage_error: empty input");
  double sum = 0.0;
  for (const auto& [d_true, d_hat] : results) {
    if (!(d_true > 0.0)) throw ParameterError("mean_percentage_error: d_true must be > 0");
    sum += std::abs(d_hat - d_true) / d_true;
  }
  return 100.0 * sum / static_cast<double>(results.size());
}

}  // namespace idim
