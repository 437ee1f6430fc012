#pragma once

#include <cstddef>
#include <vector>

#include <nlohmann/json.hpp>

#include "intentscape/embedding.hpp"

namespace intentscape {

// Merge i creates node leaf_count + i.
struct DendrogramMerge {
  int node_a = 0;
  int node_b = 0;
  double distance = 0.0;
  std::size_t size = 0;

  friend bool operator==(const DendrogramMerge&, const DendrogramMerge&) = default;
};

struct Dendrogram {
  std::size_t leaf_count = 0;
  std::vector<DendrogramMerge> merges;  // non-decreasing distance

  friend bool operator==(const Dendrogram&, const Dendrogram&) = default;
};

// Average-link agglomeration over the cosine distances between `centers`.
// Equal distances go to the pair with the smallest (lower id, higher id).
// node_a is the node that sits earlier in the active list.
Dendrogram average_link(const std::vector<Vector>& centers);

// Same, starting from a precomputed symmetric distance matrix (row-major).
Dendrogram average_link_from_distances(std::size_t n, const std::vector<double>& distances);

// Applies merges while distance < threshold; labels leaves by component,
// numbered in order of each component's smallest leaf. Throws DomainError
// if threshold <= 0.
std::vector<int> cut_dendrogram(const Dendrogram& dendrogram, double threshold);

nlohmann::json dendrogram_to_json(const Dendrogram& d);
// Throws Error unless every merge joins two distinct live nodes with a
// consistent size in non-decreasing distance order.
Dendrogram dendrogram_from_json(const nlohmann::json& j);

}  // namespace intentscape
