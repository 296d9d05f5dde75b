#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "idim/data_matrix.hpp"
#include "idim/detail/parallel.hpp"
#include "idim/errors.hpp"

namespace idim {

/// Exact k+1 nearest neighbors of every point (the point itself excluded),
/// sorted by ascending distance with ties broken by ascending point index.
/// Immutable after construction and safe to share across threads.
struct NeighborhoodIndex {
  std::size_t k = 0;
  std::size_t n = 0;
  std::vector<std::uint32_t> ids;  // n rows x (k+1) columns
  std::vector<double> dist;        // Euclidean distances, same layout

  std::span<const std::uint32_t> neighbors(std::size_t i) const {
    return {ids.data() + i * (k + 1), k + 1};
  }
  std::span<const double> distances(std::size_t i) const {
    return {dist.data() + i * (k + 1), k + 1};
  }
};

namespace detail {

struct Candidate {
  double d2;
  std::uint32_t id;
  bool operator<(const Candidate& o) const {
    return d2 < o.d2 || (d2 == o.d2 && id < o.id);
  }
};

/// Bounded sorted candidate list; keeps the m best by (distance, index).
class CandidateList {
public:
  explicit CandidateList(std::size_t m) : m_(m) { best_.reserve(m); }

  void offer(Candidate c) {
    if (best_.size() == m_ && !(c < best_.back())) return;
    auto pos = std::upper_bound(best_.begin(), best_.end(), c);
    best_.insert(pos, c);
    if (best_.size() > m_) best_.pop_back();
  }

  bool full() const { return best_.size() == m_; }
  double worst_d2() const { return best_.back().d2; }
  const std::vector<Candidate>& items() const { return best_; }

private:
  std::size_t m_;
  std::vector<Candidate> best_;
};

/// Median-split kd-tree over point indices. Queries return exactly the same
/// neighbor sets as the brute-force scan, including the index tie-break:
/// both paths compare the identical squared_distance values, and a subtree is
/// pruned only when its plane distance strictly exceeds the current worst.
class KdTree {
public:
  KdTree(const DataMatrix& data) : data_(data), order_(data.n_points()) {
    std::iota(order_.begin(), order_.end(), 0u);
    nodes_.reserve(2 * data.n_points() / kLeafSize + 2);
    root_ = build(0, data.n_points());
  }

  void query(std::size_t query_id, CandidateList& out) const {
    search(root_, query_id, out);
  }

private:
  static constexpr std::size_t kLeafSize = 16;

  struct Node {
    int left = -1, right = -1;
    std::uint32_t begin = 0, end = 0;  // leaf range into order_
    std::uint32_t axis = 0;
    double split = 0.0;
    bool leaf = false;
  };

  int build(std::size_t begin, std::size_t end) {
    Node node;
    if (end - begin <= kLeafSize) {
      node.leaf = true;
      node.begin = static_cast<std::uint32_t>(begin);
      node.end = static_cast<std::uint32_t>(end);
      nodes_.push_back(node);
      return static_cast<int>(nodes_.size() - 1);
    }
    node.axis = widest_axis(begin, end);
    const std::size_t mid = begin + (end - begin) / 2;
    const std::uint32_t axis = node.axis;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                       const double ca = data_.row(a)[axis], cb = data_.row(b)[axis];
                       return ca < cb || (ca == cb && a < b);
                     });
    node.split = data_.row(order_[mid])[axis];
    const int self = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    const int left = build(begin, mid);
    const int right = build(mid, end);
    nodes_[self].left = left;
    nodes_[self].right = right;
    return self;
  }

  std::uint32_t widest_axis(std::size_t begin, std::size_t end) const {
    const std::size_t dim = data_.ambient_dim();
    std::uint32_t best = 0;
    double best_spread = -1.0;
    for (std::uint32_t a = 0; a < dim; ++a) {
      double lo = data_.row(order_[begin])[a], hi = lo;
      for (std::size_t i = begin + 1; i < end; ++i) {
        const double v = data_.row(order_[i])[a];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi - lo > best_spread) {
        best_spread = hi - lo;
        best = a;
      }
    }
    return best;
  }

  void search(int node_id, std::size_t query_id, CandidateList& out) const {
    const Node& node = nodes_[node_id];
    if (node.leaf) {
      const auto q = data_.row(query_id);
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const std::uint32_t p = order_[i];
        if (p == query_id) continue;
        out.offer({squared_distance(q, data_.row(p)), p});
      }
      return;
    }
    const double delta = data_.row(query_id)[node.axis] - node.split;
    const int near = delta < 0.0 ? node.left : node.right;
    const int far = delta < 0.0 ? node.right : node.left;
    search(near, query_id, out);
    if (!out.full() || delta * delta <= out.worst_d2()) search(far, query_id, out);
  }

  const DataMatrix& data_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

inline void brute_force_query(const DataMatrix& data, std::size_t query_id, CandidateList& out) {
  const auto q = data.row(query_id);
  for (std::size_t j = 0; j < data.n_points(); ++j) {
    if (j == query_id) continue;
    out.offer({squared_distance(q, data.row(j)), static_cast<std::uint32_t>(j)});
  }
}

}  // namespace detail

/// Ambient dimension above which the space-partitioning tree degrades and the
/// brute-force scan takes over. Both paths return identical results.
inline constexpr std::size_t kKdTreeMaxDim = 15;

enum class KnnAlgorithm { automatic, kd_tree, brute_force };

/// Exact Euclidean (k+1)-nearest-neighbor search for every point.
/// Ties in distance break toward the smaller point index, which makes every
/// downstream estimate reproducible.
inline NeighborhoodIndex build_index(const DataMatrix& data, std::size_t k,
                                     KnnAlgorithm algorithm = KnnAlgorithm::automatic) {
  const std::size_t n = data.n_points();
  if (n < 3 || k < 1 || k > n - 2)
    throw ParameterError("build_index: k must satisfy 1 <= k <= N-2 (k=" + std::to_string(k) +
                         ", N=" + std::to_string(n) + ")");
  const std::size_t m = k + 1;
  NeighborhoodIndex index;
  index.k = k;
  index.n = n;
  index.ids.resize(n * m);
  index.dist.resize(n * m);

  const bool use_tree = algorithm == KnnAlgorithm::kd_tree ||
                        (algorithm == KnnAlgorithm::automatic && data.ambient_dim() <= kKdTreeMaxDim);
  std::unique_ptr<detail::KdTree> tree;
  if (use_tree) tree = std::make_unique<detail::KdTree>(data);

  detail::parallel_for(n, [&](std::size_t i) {
    detail::CandidateList best(m);
    if (use_tree)
      tree->query(i, best);
    else
      detail::brute_force_query(data, i, best);
    for (std::size_t c = 0; c < m; ++c) {
      index.ids[i * m + c] = best.items()[c].id;
      index.dist[i * m + c] = std::sqrt(best.items()[c].d2);
    }
  });

  for (std::size_t i = 0; i < n; ++i) {
    if (index.dist[i * m + k] == 0.0)
      throw DataError("build_index: point " + std::to_string(i) +
                      " has zero distance to its farthest neighbor (duplicate points)");
  }
  return index;
}

/// Per-point normalized neighbor distance: nearest-neighbor distance divided
/// by the (k+1)-th-neighbor distance. Values lie in (0, 1] and are invariant
/// under rigid motions and uniform scaling of the data.
inline std::vector<double> rho_statistics(const NeighborhoodIndex& index) {
  std::vector<double> rho(index.n);
  for (std::size_t i = 0; i < index.n; ++i) {
    const auto d = index.distances(i);
    if (d[index.k] <= 0.0)
      throw DegenerateGeometryError("rho_statistics: zero farthest-neighbor distance at point " +
                                    std::to_string(i));
    rho[i] = d[0] / d[index.k];
  }
  return rho;
}

/// Result of pairwise_angles: the usable angles plus the number of pairs
/// dropped because a centered neighbor vector was numerically zero.
struct AngleSet {
  std::vector<double> angles;
  std::size_t excluded_pairs = 0;
};

/// Angles between all pairs of the k nearest neighbors of one point, after
/// centering on that point. Cosines are clamped to [-1, 1], so every angle
/// lies in [0, pi]. Output is lexicographic in the neighbor pair (z, j),
/// z < j, over the distance-sorted neighbor order.
inline AngleSet pairwise_angles(const DataMatrix& data, const NeighborhoodIndex& index,
                                std::size_t point, double epsilon = 1e-12) {
  if (point >= index.n) throw ParameterError("pairwise_angles: point index out of range");
  const std::size_t k = index.k;
  const std::size_t dim = data.ambient_dim();
  const auto center = data.row(point);
  const auto ids = index.neighbors(point);

  std::vector<double> vectors;
  vectors.reserve(k * dim);
  std::size_t kept = 0;
  for (std::size_t z = 0; z < k; ++z) {
    double norm2 = 0.0;
    const auto nb = data.row(ids[z]);
    for (std::size_t j = 0; j < dim; ++j) {
      const double v = nb[j] - center[j];
      vectors.push_back(v);
      norm2 += v * v;
    }
    const double norm = std::sqrt(norm2);
    if (norm < epsilon) {
      vectors.resize(vectors.size() - dim);  // drop degenerate vector
      continue;
    }
    for (std::size_t j = 0; j < dim; ++j) vectors[kept * dim + j] /= norm;
    ++kept;
  }
  if (kept < 2)
    throw DegenerateGeometryError("pairwise_angles: fewer than 2 usable neighbor vectors at point " +
                                  std::to_string(point));

  AngleSet out;
  out.excluded_pairs = k * (k - 1) / 2 - kept * (kept - 1) / 2;
  out.angles.reserve(kept * (kept - 1) / 2);
  for (std::size_t z = 0; z + 1 < kept; ++z) {
    for (std::size_t j = z + 1; j < kept; ++j) {
      double dot = 0.0;
      for (std::size_t c = 0; c < dim; ++c) dot += vectors[z * dim + c] * vectors[j * dim + c];
      out.angles.push_back(std::acos(std::clamp(dot, -1.0, 1.0)));
    }
  }
  return out;
}

}  // namespace idim
