#include "intentscape/linkage.hpp"

#include <algorithm>
#include <numeric>

#include "intentscape/error.hpp"

namespace intentscape {

using nlohmann::json;

Dendrogram average_link(const std::vector<Vector>& centers) {
  const std::size_t n = centers.size();
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d[i * n + j] = d[j * n + i] = cosine_distance(centers[i], centers[j]);
  return average_link_from_distances(n, d);
}

Dendrogram average_link_from_distances(std::size_t n, const std::vector<double>& distances) {
  if (distances.size() != n * n) throw DomainError("distance matrix has the wrong size");
  Dendrogram dend;
  dend.leaf_count = n;
  if (n < 2) return dend;

  // Working matrix indexed by original slot; `active` lists live slots in
  // order, `node` maps a slot to its current node id.
  std::vector<double> d = distances;
  std::vector<std::size_t> active(n);
  std::iota(active.begin(), active.end(), std::size_t{0});
  std::vector<int> node(n);
  std::iota(node.begin(), node.end(), 0);
  std::vector<std::size_t> size(n, 1);
  double last = 0.0;

  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t best_i = 0, best_j = 1;
    double best = d[active[0] * n + active[1]];
    auto key = [&](std::size_t i, std::size_t j) {
      const int a = node[active[i]];
      const int b = node[active[j]];
      return std::make_pair(std::min(a, b), std::max(a, b));
    };
    for (std::size_t i = 0; i < active.size(); ++i)
      for (std::size_t j = i + 1; j < active.size(); ++j) {
        const double v = d[active[i] * n + active[j]];
        if (v < best || (v == best && key(i, j) < key(best_i, best_j))) {
          best = v;
          best_i = i;
          best_j = j;
        }
      }

    const std::size_t si = active[best_i];
    const std::size_t sj = active[best_j];
    // Average linkage is monotone; the clamp only absorbs rounding.
    last = std::max(last, best);
    dend.merges.push_back(DendrogramMerge{node[si], node[sj], last, size[si] + size[sj]});

    for (std::size_t k : active) {
      if (k == si || k == sj) continue;
      const double v = (static_cast<double>(size[si]) * d[si * n + k] + static_cast<double>(size[sj]) * d[sj * n + k]) /
                       static_cast<double>(size[si] + size[sj]);
      d[si * n + k] = d[k * n + si] = v;
    }
    size[si] += size[sj];
    node[si] = static_cast<int>(n + step);
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_j));
  }
  return dend;
}

std::vector<int> cut_dendrogram(const Dendrogram& dendrogram, double threshold) {
  if (!(threshold > 0.0)) throw DomainError("cut threshold must be positive");
  const std::size_t n = dendrogram.leaf_count;
  const std::size_t total = n + dendrogram.merges.size();

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  // Any leaf under each node stands in for it.
  std::vector<std::size_t> leaf_of(total);
  std::iota(leaf_of.begin(), leaf_of.begin() + static_cast<std::ptrdiff_t>(n), std::size_t{0});

  for (std::size_t i = 0; i < dendrogram.merges.size(); ++i) {
    const auto& m = dendrogram.merges[i];
    if (!(m.distance < threshold)) break;
    const auto a = static_cast<std::size_t>(m.node_a);
    const auto b = static_cast<std::size_t>(m.node_b);
    if (m.node_a < 0 || m.node_b < 0 || a >= n + i || b >= n + i || a == b)
      throw Error("dendrogram merge " + std::to_string(i) + " references an invalid node");
    const std::size_t ra = find(leaf_of[a]);
    const std::size_t rb = find(leaf_of[b]);
    parent[std::max(ra, rb)] = std::min(ra, rb);
    leaf_of[n + i] = std::min(ra, rb);
  }

  std::vector<int> labels(n, -1);
  std::vector<int> label_of_root(n, -1);
  int next = 0;
  for (std::size_t leaf = 0; leaf < n; ++leaf) {
    const std::size_t r = find(leaf);
    if (label_of_root[r] < 0) label_of_root[r] = next++;
    labels[leaf] = label_of_root[r];
  }
  return labels;
}

json dendrogram_to_json(const Dendrogram& d) {
  json merges = json::array();
  for (const auto& m : d.merges) merges.push_back(json::array({m.node_a, m.node_b, m.distance, m.size}));
  return json{{"leaf_count", d.leaf_count}, {"merges", merges}};
}

Dendrogram dendrogram_from_json(const json& j) {
  Dendrogram d;
  d.leaf_count = j.at("leaf_count").get<std::size_t>();
  std::vector<std::size_t> size(d.leaf_count, 1);
  std::vector<bool> used(d.leaf_count, false);
  for (const auto& m : j.at("merges")) {
    const std::size_t i = d.merges.size();
    const DendrogramMerge merge{m.at(0).get<int>(), m.at(1).get<int>(), m.at(2).get<double>(),
                                m.at(3).get<std::size_t>()};
    const auto a = static_cast<std::size_t>(merge.node_a);
    const auto b = static_cast<std::size_t>(merge.node_b);
    if (merge.node_a < 0 || merge.node_b < 0 || a >= size.size() || b >= size.size() || a == b || used[a] ||
        used[b])
      throw Error("dendrogram merge " + std::to_string(i) + " references an invalid node");
    if (merge.size != size[a] + size[b])
      throw Error("dendrogram merge " + std::to_string(i) + " has inconsistent size");
    if (i > 0 && merge.distance < d.merges.back().distance)
      throw Error("dendrogram merge " + std::to_string(i) + " is out of distance order");
    used[a] = used[b] = true;
    size.push_back(merge.size);
    used.push_back(false);
    d.merges.push_back(merge);
  }
  return d;
}

}  // namespace intentscape
