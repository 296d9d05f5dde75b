#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "idim/angle_model.hpp"
#include "idim/data_matrix.hpp"
#include "idim/detail/parallel.hpp"
#include "idim/detail/text_io.hpp"
#include "idim/errors.hpp"
#include "idim/neighbors.hpp"
#include "idim/norm_model.hpp"
#include "idim/rng.hpp"

namespace idim {

/// Search ceiling for the continuous ML dimension fits feeding the KL
/// comparison. Deliberately far above any dataset dimension handled here so
/// the bound never binds, and independent of the calibration table's depth so
/// entry d is the same no matter how many entries the table holds.
inline constexpr double kMlSearchCeiling = 1000.0;

/// n points uniform in the unit d-ball: direction from a normalized d-variate
/// standard Gaussian, radius U^(1/d).
inline DataMatrix sample_unit_ball(std::size_t d, std::size_t n, Rng& rng) {
  if (d < 1) throw ParameterError("sample_unit_ball: d must be >= 1");
  if (n < 3) throw ParameterError("sample_unit_ball: n must be >= 3");
  std::vector<double> values(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    double norm2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double g = rng.normal();
      values[i * d + j] = g;
      norm2 += g * g;
    }
    const double radius = std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
    const double scale = radius / std::sqrt(norm2);
    for (std::size_t j = 0; j < d; ++j) values[i * d + j] *= scale;
  }
  return DataMatrix(std::move(values), n, d);
}

/// n points uniform on the d-sphere, the d-dimensional surface embedded in
/// R^(d+1): a normalized (d+1)-variate standard Gaussian draw.
inline DataMatrix sample_sphere_surface(std::size_t d, std::size_t n, Rng& rng) {
  if (d < 1) throw ParameterError("sample_sphere_surface: d must be >= 1");
  if (n < 3) throw ParameterError("sample_sphere_surface: n must be >= 3");
  const std::size_t dim = d + 1;
  std::vector<double> values(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    double norm2 = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double g = rng.normal();
      values[i * dim + j] = g;
      norm2 += g * g;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t j = 0; j < dim; ++j) values[i * dim + j] *= inv;
  }
  return DataMatrix(std::move(values), n, dim);
}

/// Reference family the calibration statistics are computed from. The
/// d-sphere surface is the default: it has no boundary, so its neighborhood
/// statistics carry none of the edge bias a solid ball picks up, and curved
/// or high-dimensional data match it far better in practice. The ball family
/// is kept as a diagnostic alternative.
enum class CalibrationFamily { sphere_surface, unit_ball };

inline std::string to_string(CalibrationFamily f) {
  return f == CalibrationFamily::sphere_surface ? "sphere_surface" : "unit_ball";
}

/// Reference statistics for one candidate dimension.
struct CalibrationEntry {
  std::size_t d = 0;
  double d_check_ml = 1.0;  // ML dimension fitted to the reference sample
  double mu_nu = 0.0;       // mean von Mises direction of the reference sample
  double mu_tau = 0.0;      // mean von Mises concentration
};

inline constexpr int kCalibrationFormatVersion = 1;

/// Reference statistics for every candidate dimension 1..max_dim, computed
/// with the same (n, k) the query-time statistics will use.
struct CalibrationTable {
  int format_version = kCalibrationFormatVersion;
  CalibrationFamily family = CalibrationFamily::sphere_surface;
  std::size_t n_points = 0;
  std::size_t k = 0;
  std::size_t max_dim = 0;
  std::size_t n_reps = 1;
  std::uint64_t seed = 0;
  std::vector<CalibrationEntry> entries;  // entries[i].d == i + 1

  const CalibrationEntry& entry(std::size_t d) const {
    if (d < 1 || d > entries.size())
      throw ParameterError("CalibrationTable: no entry for d=" + std::to_string(d));
    return entries[d - 1];
  }

  std::string id() const {
    std::ostringstream os;
    os << "family=" << to_string(family) << ";n=" << n_points << ";k=" << k << ";D=" << max_dim
       << ";reps=" << n_reps << ";seed=" << seed << ";v=" << format_version;
    return os.str();
  }
};

/// Refuses reference statistics that were computed under a different (n, k)
/// than the data statistics they are about to be compared against.
inline void ensure_coherent(const CalibrationTable& table, std::size_t n_points, std::size_t k) {
  if (table.n_points != n_points || table.k != k)
    throw ParameterError("calibration mismatch: table built with n=" + std::to_string(table.n_points) +
                         ", k=" + std::to_string(table.k) + " but data has n=" +
                         std::to_string(n_points) + ", k=" + std::to_string(k));
}

/// Builds the reference table: for each d in 1..max_dim, draw n points from
/// the reference family, run the full norm/angle pipeline, and average the
/// three statistics over n_reps independent repetitions. Entry d consumes RNG
/// substream (d, rep) only, so a deeper table leaves earlier entries
/// bit-identical and the per-d jobs can run in parallel.
inline CalibrationTable build_calibration(std::size_t max_dim, std::size_t n, std::size_t k,
                                          std::size_t n_reps, std::uint64_t seed,
                                          CalibrationFamily family = CalibrationFamily::sphere_surface) {
  if (max_dim < 1) throw ParameterError("build_calibration: max_dim must be >= 1");
  if (n_reps < 1) throw ParameterError("build_calibration: n_reps must be >= 1");
  if (n < 3 || k < 1 || k > n - 2)
    throw ParameterError("build_calibration: need n >= 3 and 1 <= k <= n-2");

  CalibrationTable table;
  table.family = family;
  table.n_points = n;
  table.k = k;
  table.max_dim = max_dim;
  table.n_reps = n_reps;
  table.seed = seed;
  table.entries.resize(max_dim);

  detail::parallel_for(max_dim, [&](std::size_t job) {
    const std::size_t d = job + 1;
    double sum_d_ml = 0.0, sum_nu = 0.0, sum_tau = 0.0;
    for (std::size_t rep = 0; rep < n_reps; ++rep) {
      const std::uint64_t stream = (static_cast<std::uint64_t>(d) << 32) + rep;
      Rng rng = Rng::substream(seed, stream);
      const DataMatrix sample = family == CalibrationFamily::sphere_surface
                                    ? sample_sphere_surface(d, n, rng)
                                    : sample_unit_ball(d, n, rng);
      const NeighborhoodIndex index = build_index(sample, k);
      const NormStats norm = fit_ml_dimension(rho_statistics(index), k, kMlSearchCeiling);
      const AngleStats angle = fit_angle_stats(sample, index);
      sum_d_ml += norm.d_ml;
      sum_nu += angle.mu_nu;
      sum_tau += angle.mu_tau;
    }
    table.entries[job] = {d, sum_d_ml / n_reps, sum_nu / n_reps, sum_tau / n_reps};
  });
  return table;
}

/// Cache file layout: a keyed header block followed by one record per d with
/// shortest-round-trip decimal floats, closed by an "end" marker. Diff-able,
/// portable, and bit-exact through save/load.
inline void save_calibration(const CalibrationTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_calibration: cannot open '" + path + "' for writing");
  out << "idim-calibration " << table.format_version << "\n";
  out << "rng " << kRngId << "\n";
  out << "family " << to_string(table.family) << "\n";
  out << "n_points " << table.n_points << "\n";
  out << "k " << table.k << "\n";
  out << "max_dim " << table.max_dim << "\n";
  out << "n_reps " << table.n_reps << "\n";
  out << "seed " << table.seed << "\n";
  out << "entries\n";
  for (const auto& e : table.entries) {
    out << e.d << ' ' << detail::format_double(e.d_check_ml) << ' '
        << detail::format_double(e.mu_nu) << ' ' << detail::format_double(e.mu_tau) << "\n";
  }
  out << "end\n";
  if (!out) throw IoError("save_calibration: write to '" + path + "' failed");
}

namespace detail {

inline std::string next_header_value(std::istream& in, const std::string& key) {
  std::string line;
  if (!std::getline(in, line)) throw CorruptFileError("calibration file: truncated header");
  const auto space = line.find(' ');
  if (space == std::string::npos || line.substr(0, space) != key)
    throw CorruptFileError("calibration file: expected '" + key + "' header line");
  return line.substr(space + 1);
}

inline std::uint64_t header_u64(std::istream& in, const std::string& key) {
  std::uint64_t v = 0;
  if (!parse_u64(next_header_value(in, key), v))
    throw CorruptFileError("calibration file: bad integer in '" + key + "' header");
  return v;
}

}  // namespace detail

inline CalibrationTable load_calibration(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_calibration: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw CorruptFileError("calibration file: empty");
  {
    std::istringstream head(line);
    std::string magic;
    int version = -1;
    head >> magic >> version;
    if (magic != "idim-calibration") throw CorruptFileError("calibration file: bad magic");
    if (version != kCalibrationFormatVersion)
      throw FormatVersionError("calibration file: format version " + std::to_string(version) +
                               " not supported (expected " +
                               std::to_string(kCalibrationFormatVersion) + ")");
  }
  if (detail::next_header_value(in, "rng") != std::string(kRngId))
    throw FormatVersionError("calibration file: produced by a different random generator");

  CalibrationTable table;
  const std::string family = detail::next_header_value(in, "family");
  if (family == "sphere_surface")
    table.family = CalibrationFamily::sphere_surface;
  else if (family == "unit_ball")
    table.family = CalibrationFamily::unit_ball;
  else
    throw CorruptFileError("calibration file: unknown family '" + family + "'");
  table.n_points = detail::header_u64(in, "n_points");
  table.k = detail::header_u64(in, "k");
  table.max_dim = detail::header_u64(in, "max_dim");
  table.n_reps = detail::header_u64(in, "n_reps");
  table.seed = detail::header_u64(in, "seed");
  if (!std::getline(in, line) || line != "entries")
    throw CorruptFileError("calibration file: missing 'entries' marker");

  table.entries.reserve(table.max_dim);
  for (std::size_t i = 0; i < table.max_dim; ++i) {
    if (!std::getline(in, line)) throw CorruptFileError("calibration file: truncated entry list");
    std::istringstream row(line);
    std::string d_text, ml_text, nu_text, tau_text;
    if (!(row >> d_text >> ml_text >> nu_text >> tau_text))
      throw CorruptFileError("calibration file: malformed entry line '" + line + "'");
    CalibrationEntry e;
    std::uint64_t d = 0;
    if (!detail::parse_u64(d_text, d) || !detail::parse_double(ml_text, e.d_check_ml) ||
        !detail::parse_double(nu_text, e.mu_nu) || !detail::parse_double(tau_text, e.mu_tau))
      throw CorruptFileError("calibration file: unparsable entry line '" + line + "'");
    e.d = d;
    table.entries.push_back(e);
  }
  if (!std::getline(in, line) || line != "end")
    throw CorruptFileError("calibration file: missing 'end' marker");

  // Invariant checks, distinct from parse failures.
  if (table.n_points < 3 || table.k < 1 || table.k > table.n_points - 2)
    throw DataError("calibration file: invalid (n_points, k)");
  for (std::size_t i = 0; i < table.entries.size(); ++i) {
    const auto& e = table.entries[i];
    if (e.d != i + 1)
      throw DataError("calibration file: entries must cover 1..max_dim without gaps (got d=" +
                      std::to_string(e.d) + " at position " + std::to_string(i + 1) + ")");
    if (!(e.d_check_ml >= 1.0) || !(e.mu_tau >= 0.0))
      throw DataError("calibration file: entry d=" + std::to_string(e.d) + " violates invariants");
  }
  return table;
}

}  // namespace idim
