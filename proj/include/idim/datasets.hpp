#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "idim/calibration.hpp"
#include "idim/data_matrix.hpp"
#include "idim/detail/text_io.hpp"
#include "idim/errors.hpp"
#include "idim/rng.hpp"

namespace idim {

/// A synthetic manifold request: generator name, intrinsic and ambient
/// dimensions where the generator takes them, sample size and seed.
struct ManifoldSpec {
  std::string name;          // hypercube, ball, sphere_surface, affine, swiss_roll,
                             // helix, gaussian, m13, m14
  std::size_t d = 0;         // intrinsic dimension parameter (where applicable)
  std::size_t ambient = 0;   // ambient dimension (affine only; others derive it)
  std::size_t n_points = 2500;
  std::uint64_t seed = 0;
};

namespace detail {

inline DataMatrix generate_hypercube(std::size_t d, std::size_t n, Rng& rng) {
  // Uniform [0,1]^d embedded in R^(d+1) by a zero coordinate; any isometric
  // embedding gives identical estimates.
  const std::size_t dim = d + 1;
  std::vector<double> v(n * dim, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) v[i * dim + j] = rng.uniform();
  return DataMatrix(std::move(v), n, dim);
}

inline DataMatrix generate_affine(std::size_t d, std::size_t ambient, std::size_t n, Rng& rng) {
  if (ambient < d) throw ParameterError("affine: ambient dimension must be >= d");
  // Column-orthonormalized Gaussian map (modified Gram-Schmidt) plus offset.
  std::vector<double> basis(ambient * d);
  for (auto& x : basis) x = rng.normal();
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t p = 0; p < c; ++p) {
      double dot = 0.0;
      for (std::size_t r = 0; r < ambient; ++r) dot += basis[r * d + c] * basis[r * d + p];
      for (std::size_t r = 0; r < ambient; ++r) basis[r * d + c] -= dot * basis[r * d + p];
    }
    double norm2 = 0.0;
    for (std::size_t r = 0; r < ambient; ++r) norm2 += basis[r * d + c] * basis[r * d + c];
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t r = 0; r < ambient; ++r) basis[r * d + c] *= inv;
  }
  std::vector<double> offset(ambient);
  for (auto& x : offset) x = rng.uniform();

  std::vector<double> v(n * ambient);
  std::vector<double> u(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& x : u) x = rng.uniform();
    for (std::size_t r = 0; r < ambient; ++r) {
      double s = offset[r];
      for (std::size_t c = 0; c < d; ++c) s += basis[r * d + c] * u[c];
      v[i * ambient + r] = s;
    }
  }
  return DataMatrix(std::move(v), n, ambient);
}

inline DataMatrix generate_gaussian(std::size_t d, std::size_t n, Rng& rng) {
  std::vector<double> v(n * d);
  for (auto& x : v) x = rng.normal();
  return DataMatrix(std::move(v), n, d);
}

inline DataMatrix generate_swiss_roll(std::size_t n, Rng& rng) {
  // (t cos t, y, t sin t), t in [1.5 pi, 4.5 pi], y in [0, 21].
  std::vector<double> v(n * 3);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 1.5 * std::numbers::pi * (1.0 + 2.0 * rng.uniform());
    v[i * 3 + 0] = t * std::cos(t);
    v[i * 3 + 1] = 21.0 * rng.uniform();
    v[i * 3 + 2] = t * std::sin(t);
  }
  return DataMatrix(std::move(v), n, 3);
}

inline DataMatrix generate_helix(std::size_t n, Rng& rng) {
  // Helicoid surface (u cos v, u sin v, v/2), u in [0,1], v in [0, 3 pi].
  std::vector<double> v(n * 3);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    const double w = 3.0 * std::numbers::pi * rng.uniform();
    v[i * 3 + 0] = u * std::cos(w);
    v[i * 3 + 1] = u * std::sin(w);
    v[i * 3 + 2] = 0.5 * w;
  }
  return DataMatrix(std::move(v), n, 3);
}

/// Nonlinear high-dimensional family: u uniform in [0,1]^base, concatenate
/// the elementwise products u*sin(cos(2 pi u)) and u*cos(sin(2 pi u)), then
/// duplicate every coordinate. base=18 gives 2500 points in R^72 with
/// intrinsic dimension 18; base=24 gives R^96 with dimension 24.
inline DataMatrix generate_warped_duplicated(std::size_t base, std::size_t n, Rng& rng) {
  const std::size_t dim = 4 * base;
  std::vector<double> v(n * dim);
  std::vector<double> u(base);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& x : u) x = rng.uniform();
    double* row = v.data() + i * dim;
    for (std::size_t j = 0; j < base; ++j) {
      const double a = u[j] * std::sin(std::cos(2.0 * std::numbers::pi * u[j]));
      row[2 * j] = a;
      row[2 * j + 1] = a;
    }
    for (std::size_t j = 0; j < base; ++j) {
      const double b = u[j] * std::cos(std::sin(2.0 * std::numbers::pi * u[j]));
      row[2 * base + 2 * j] = b;
      row[2 * base + 2 * j + 1] = b;
    }
  }
  return DataMatrix(std::move(v), n, dim);
}

}  // namespace detail

/// Deterministic synthetic manifold generation. Unknown names and invalid
/// dimension combinations are parameter errors.
inline DataMatrix generate(const ManifoldSpec& spec) {
  Rng rng(spec.seed);
  const std::size_t n = spec.n_points;
  if (spec.name == "hypercube") {
    if (spec.d < 1) throw ParameterError("generate: hypercube needs d >= 1");
    return detail::generate_hypercube(spec.d, n, rng);
  }
  if (spec.name == "ball") {
    if (spec.d < 1) throw ParameterError("generate: ball needs d >= 1");
    return sample_unit_ball(spec.d, n, rng);
  }
  if (spec.name == "sphere_surface") {
    if (spec.d < 1) throw ParameterError("generate: sphere_surface needs d >= 1");
    return sample_sphere_surface(spec.d, n, rng);
  }
  if (spec.name == "affine") {
    if (spec.d < 1 || spec.ambient < spec.d)
      throw ParameterError("generate: affine needs 1 <= d <= ambient");
    return detail::generate_affine(spec.d, spec.ambient, n, rng);
  }
  if (spec.name == "gaussian") {
    if (spec.d < 1) throw ParameterError("generate: gaussian needs d >= 1");
    return detail::generate_gaussian(spec.d, n, rng);
  }
  if (spec.name == "swiss_roll") return detail::generate_swiss_roll(n, rng);
  if (spec.name == "helix") return detail::generate_helix(n, rng);
  if (spec.name == "m13") return detail::generate_warped_duplicated(18, n, rng);
  if (spec.name == "m14") return detail::generate_warped_duplicated(24, n, rng);
  throw ParameterError("generate: unknown generator '" + spec.name + "'");
}

/// Ambient dimension a spec will generate, without generating it.
inline std::size_t ambient_dim_of(const ManifoldSpec& spec) {
  if (spec.name == "hypercube" || spec.name == "sphere_surface") return spec.d + 1;
  if (spec.name == "ball" || spec.name == "gaussian") return spec.d;
  if (spec.name == "affine") return spec.ambient;
  if (spec.name == "swiss_roll" || spec.name == "helix") return 3;
  if (spec.name == "m13") return 72;
  if (spec.name == "m14") return 96;
  throw ParameterError("ambient_dim_of: unknown generator '" + spec.name + "'");
}

/// Method of delays with non-overlapping windows: row t holds
/// series[t*D .. t*D + D - 1]; trailing samples that do not fill a window are
/// dropped.
inline DataMatrix delay_embed(const std::vector<double>& series, std::size_t window) {
  if (window < 1) throw ParameterError("delay_embed: window must be >= 1");
  if (series.size() < window)
    throw ParameterError("delay_embed: series shorter than one window");
  const std::size_t rows = series.size() / window;
  std::vector<double> v(series.begin(), series.begin() + rows * window);
  return DataMatrix(std::move(v), rows, window);
}

struct LoadOptions {
  bool detect_header = true;
};

struct LoadReport {
  std::size_t n_points = 0;
  std::size_t ambient_dim = 0;
  std::size_t skipped_lines = 0;  // blank and comment lines
  bool header_skipped = false;
};

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',' || c == ' ' || c == '\t' || c == '\r') {
      if (!cur.empty()) fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) fields.push_back(std::move(cur));
  return fields;
}

}  // namespace detail

/// Reads delimited numeric text (comma or whitespace), one point per row.
/// Blank lines and '#' comments are skipped and counted; a non-numeric first
/// row is treated as a header when detection is enabled. Ragged rows and
/// non-numeric cells are hard errors naming the line.
inline DataMatrix load_table(std::istream& in, LoadOptions options = {}, LoadReport* report = nullptr) {
  std::vector<double> values;
  std::size_t cols = 0, rows = 0, line_no = 0;
  LoadReport local;
  bool first_data_row = true;

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = detail::split_fields(line);
    if (fields.empty() || fields[0][0] == '#') {
      ++local.skipped_lines;
      continue;
    }
    std::vector<double> row;
    row.reserve(fields.size());
    bool numeric = true;
    for (const auto& f : fields) {
      double x = 0.0;
      if (!detail::parse_double(f, x)) {
        numeric = false;
        break;
      }
      row.push_back(x);
    }
    if (!numeric) {
      if (first_data_row && options.detect_header) {
        local.header_skipped = true;
        first_data_row = false;
        continue;
      }
      throw DataError("load_table: non-numeric cell at line " + std::to_string(line_no));
    }
    if (rows == 0) {
      cols = row.size();
    } else if (row.size() != cols) {
      throw DataError("load_table: ragged row at line " + std::to_string(line_no) + " (" +
                      std::to_string(row.size()) + " cells, expected " + std::to_string(cols) + ")");
    }
    first_data_row = false;
    values.insert(values.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows == 0) throw DataError("load_table: no data rows");
  local.n_points = rows;
  local.ambient_dim = cols;
  if (report) *report = local;
  return DataMatrix(std::move(values), rows, cols);
}

inline DataMatrix load_table(const std::string& path, LoadOptions options = {},
                             LoadReport* report = nullptr) {
  std::ifstream in(path);
  if (!in) throw IoError("load_table: cannot open '" + path + "'");
  return load_table(in, options, report);
}

/// Writes a DataMatrix as comma-delimited text with round-trip-exact floats.
inline void save_table(const DataMatrix& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_table: cannot open '" + path + "' for writing");
  for (std::size_t i = 0; i < data.n_points(); ++i) {
    const auto row = data.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << detail::format_double(row[j]);
    }
    out << '\n';
  }
  if (!out) throw IoError("save_table: write to '" + path + "' failed");
}

}  // namespace idim
