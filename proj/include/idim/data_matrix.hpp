#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "idim/errors.hpp"

namespace idim {

/// N points in D ambient dimensions, row-major. The universal input of every
/// estimator. Construction validates shape and finiteness; the neighborhood
/// operations enforce their own minimum sizes (k <= N-2 implies N >= 3).
class DataMatrix {
public:
  DataMatrix(std::vector<double> values, std::size_t n_points, std::size_t ambient_dim)
      : values_(std::move(values)), n_points_(n_points), ambient_dim_(ambient_dim) {
    if (ambient_dim_ == 0) throw ParameterError("DataMatrix: ambient_dim must be >= 1");
    if (n_points_ < 1) throw ParameterError("DataMatrix: need at least 1 point");
    if (values_.size() != n_points_ * ambient_dim_)
      throw ParameterError("DataMatrix: value count does not match n_points * ambient_dim");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i]))
        throw DataError("DataMatrix: non-finite entry at row " + std::to_string(i / ambient_dim_) +
                        ", column " + std::to_string(i % ambient_dim_));
    }
  }

  std::size_t n_points() const { return n_points_; }
  std::size_t ambient_dim() const { return ambient_dim_; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * ambient_dim_, ambient_dim_};
  }

  const std::vector<double>& values() const { return values_; }

private:
  std::vector<double> values_;
  std::size_t n_points_;
  std::size_t ambient_dim_;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

}  // namespace idim
