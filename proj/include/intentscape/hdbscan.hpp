#pragma once

// Building blocks of the HDBSCAN implementation, exposed for testing.

#include <cstddef>
#include <map>
#include <vector>

#include "intentscape/clustering.hpp"

namespace intentscape::hdbscan_detail {

// Dense symmetric matrix with a zero diagonal.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {}
  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double v) {
    d_[i * n_ + j] = v;
    d_[j * n_ + i] = v;
  }

 private:
  std::size_t n_;
  std::vector<double> d_;
};

DistanceMatrix cosine_distance_matrix(const std::vector<Vector>& points);

// Distance to the min_samples-th nearest neighbour, the point itself being
// neighbour 1.
std::vector<double> core_distances(const DistanceMatrix& d, int min_samples);

struct MstEdge {
  std::size_t a = 0;  // a < b
  std::size_t b = 0;
  double weight = 0.0;
};

// Edges compare by (weight, a, b); under that strict order the minimum
// spanning tree is unique. Dense Prim, O(n^2).
bool edge_less(const MstEdge& x, const MstEdge& y);

std::vector<MstEdge> mutual_reachability_mst(const DistanceMatrix& d, const std::vector<double>& core);

// Merge i creates node n + i from nodes `left` and `right`.
struct LinkageMerge {
  std::size_t left = 0;
  std::size_t right = 0;
  double distance = 0.0;
  std::size_t size = 0;
};

std::vector<LinkageMerge> single_linkage(std::vector<MstEdge> mst, std::size_t n);

// Child ids below n_points are points; larger ids are clusters. The root
// cluster is n_points.
struct CondensedEdge {
  std::size_t parent = 0;
  std::size_t child = 0;
  double lambda = 0.0;
  std::size_t child_size = 0;
};

struct CondensedTree {
  std::size_t n_points = 0;
  std::vector<CondensedEdge> edges;

  std::size_t root() const { return n_points; }
};

CondensedTree condense_tree(const std::vector<LinkageMerge>& merges, std::size_t n, int min_cluster_size);

// Sum over leaving points of (lambda_p - lambda_birth).
std::map<std::size_t, double> stabilities(const CondensedTree& tree);

// Selected clusters. The root is only ever selected when it has no child
// clusters.
std::vector<std::size_t> select_clusters(const CondensedTree& tree, ClusterSelection selection);

// Per-point label: index into `selected` order renumbered by smallest member,
// or kNoise.
std::vector<int> label_points(const CondensedTree& tree, const std::vector<std::size_t>& selected);

}  // namespace intentscape::hdbscan_detail
