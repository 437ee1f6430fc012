#include "intentscape/hdbscan.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <tuple>

#include <spdlog/spdlog.h>

#include "intentscape/error.hpp"

namespace intentscape {
namespace hdbscan_detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double to_lambda(double distance) { return distance > 0.0 ? 1.0 / distance : kInf; }

// lambda_p - lambda_birth with inf - inf taken as 0.
double persistence(double lambda, double birth) { return lambda == birth ? 0.0 : lambda - birth; }

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(2 * n - 1), size_(2 * n - 1, 0), next_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    std::fill(size_.begin(), size_.begin() + static_cast<std::ptrdiff_t>(n), 1);
  }

  std::size_t find(std::size_t x) {
    std::size_t root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      const std::size_t next = parent_[x];
      parent_[x] = root;
      x = next;
    }
    return root;
  }

  // Joins two roots under a fresh node and returns it.
  std::size_t join(std::size_t a, std::size_t b) {
    const std::size_t node = next_++;
    parent_[a] = parent_[b] = node;
    size_[node] = size_[a] + size_[b];
    return node;
  }

  std::size_t size(std::size_t node) const { return size_[node]; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
  std::size_t next_;
};

}  // namespace

DistanceMatrix cosine_distance_matrix(const std::vector<Vector>& points) {
  const std::size_t n = points.size();
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    norms[i] = norm(points[i]);
    if (!(norms[i] > 0.0)) throw DomainError("zero vector in clustering input");
  }
  DistanceMatrix d(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double sim = std::clamp(dot(points[i], points[j]) / (norms[i] * norms[j]), -1.0, 1.0);
      d.set(i, j, 1.0 - sim);
    }
  return d;
}

std::vector<double> core_distances(const DistanceMatrix& d, int min_samples) {
  const std::size_t n = d.size();
  const auto k = static_cast<std::size_t>(min_samples - 1);
  std::vector<double> core(n);
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) row[j] = d(i, j);
    std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k), row.end());
    core[i] = row[k];
  }
  return core;
}

bool edge_less(const MstEdge& x, const MstEdge& y) {
  return std::tie(x.weight, x.a, x.b) < std::tie(y.weight, y.a, y.b);
}

std::vector<MstEdge> mutual_reachability_mst(const DistanceMatrix& d, const std::vector<double>& core) {
  const std::size_t n = d.size();
  std::vector<MstEdge> mst;
  if (n < 2) return mst;
  mst.reserve(n - 1);

  auto reach = [&](std::size_t u, std::size_t v) {
    return MstEdge{std::min(u, v), std::max(u, v), std::max({core[u], core[v], d(u, v)})};
  };
  std::vector<bool> in_tree(n, false);
  std::vector<MstEdge> best(n);
  in_tree[0] = true;
  for (std::size_t v = 1; v < n; ++v) best[v] = reach(0, v);

  for (std::size_t step = 1; step < n; ++step) {
    std::size_t next = n;
    for (std::size_t v = 0; v < n; ++v)
      if (!in_tree[v] && (next == n || edge_less(best[v], best[next]))) next = v;
    in_tree[next] = true;
    mst.push_back(best[next]);
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      const MstEdge candidate = reach(next, v);
      if (edge_less(candidate, best[v])) best[v] = candidate;
    }
  }
  return mst;
}

std::vector<LinkageMerge> single_linkage(std::vector<MstEdge> mst, std::size_t n) {
  std::sort(mst.begin(), mst.end(), edge_less);
  std::vector<LinkageMerge> merges;
  if (n < 2) return merges;
  merges.reserve(mst.size());
  UnionFind uf(n);
  for (const auto& e : mst) {
    const std::size_t ra = uf.find(e.a);
    const std::size_t rb = uf.find(e.b);
    if (ra == rb) throw Error("spanning tree contains a cycle");
    const std::size_t node = uf.join(ra, rb);
    merges.push_back(LinkageMerge{ra, rb, e.weight, uf.size(node)});
  }
  return merges;
}

CondensedTree condense_tree(const std::vector<LinkageMerge>& merges, std::size_t n, int min_cluster_size) {
  CondensedTree tree;
  tree.n_points = n;
  if (n == 0) return tree;
  if (merges.size() + 1 != n) throw Error("linkage must have n - 1 merges");
  const auto mcs = static_cast<std::size_t>(min_cluster_size);

  const std::size_t root = 2 * n - 2;
  auto node_size = [&](std::size_t node) { return node < n ? std::size_t{1} : merges[node - n].size; };

  // Points below `node`, in BFS order.
  auto leaves_of = [&](std::size_t node) {
    std::vector<std::size_t> out;
    std::deque<std::size_t> queue{node};
    while (!queue.empty()) {
      const std::size_t x = queue.front();
      queue.pop_front();
      if (x < n) {
        out.push_back(x);
      } else {
        queue.push_back(merges[x - n].left);
        queue.push_back(merges[x - n].right);
      }
    }
    return out;
  };

  std::vector<std::size_t> relabel(2 * n - 1, 0);
  relabel[root] = n;
  std::size_t next_label = n + 1;

  if (n == 1) return tree;

  std::deque<std::size_t> queue{root};
  while (!queue.empty()) {
    const std::size_t node = queue.front();
    queue.pop_front();
    if (node < n) continue;
    const auto& m = merges[node - n];
    const double lambda = to_lambda(m.distance);
    const std::size_t parent = relabel[node];
    const std::size_t left_count = node_size(m.left);
    const std::size_t right_count = node_size(m.right);

    auto fall_out = [&](std::size_t child) {
      for (std::size_t p : leaves_of(child)) tree.edges.push_back(CondensedEdge{parent, p, lambda, 1});
    };

    if (left_count >= mcs && right_count >= mcs) {
      relabel[m.left] = next_label++;
      tree.edges.push_back(CondensedEdge{parent, relabel[m.left], lambda, left_count});
      relabel[m.right] = next_label++;
      tree.edges.push_back(CondensedEdge{parent, relabel[m.right], lambda, right_count});
      queue.push_back(m.left);
      queue.push_back(m.right);
    } else if (left_count < mcs && right_count < mcs) {
      fall_out(m.left);
      fall_out(m.right);
    } else if (left_count < mcs) {
      relabel[m.right] = parent;
      fall_out(m.left);
      queue.push_back(m.right);
    } else {
      relabel[m.left] = parent;
      fall_out(m.right);
      queue.push_back(m.left);
    }
  }
  return tree;
}

std::map<std::size_t, double> stabilities(const CondensedTree& tree) {
  std::map<std::size_t, double> birth;
  birth[tree.root()] = 0.0;
  for (const auto& e : tree.edges)
    if (e.child >= tree.n_points) birth[e.child] = e.lambda;
  std::map<std::size_t, double> stability;
  for (const auto& [c, _] : birth) stability[c] = 0.0;
  for (const auto& e : tree.edges)
    stability[e.parent] += persistence(e.lambda, birth.at(e.parent)) * static_cast<double>(e.child_size);
  return stability;
}

std::vector<std::size_t> select_clusters(const CondensedTree& tree, ClusterSelection selection) {
  std::map<std::size_t, std::vector<std::size_t>> children;
  for (const auto& e : tree.edges)
    if (e.child >= tree.n_points) children[e.parent].push_back(e.child);
  if (children.empty()) return {tree.root()};

  std::map<std::size_t, double> stability = stabilities(tree);
  std::map<std::size_t, bool> selected;
  for (const auto& [c, _] : stability)
    if (c != tree.root()) selected[c] = true;

  if (selection == ClusterSelection::leaf) {
    for (auto& [c, sel] : selected) sel = !children.count(c);
  } else {
    // Descending ids visit children before parents.
    for (auto it = selected.rbegin(); it != selected.rend(); ++it) {
      const std::size_t node = it->first;
      auto kids = children.find(node);
      if (kids == children.end()) continue;
      double subtree = 0.0;
      for (std::size_t k : kids->second) subtree += stability[k];
      if (subtree > stability[node]) {
        it->second = false;
        stability[node] = subtree;
      } else {
        std::deque<std::size_t> queue(kids->second.begin(), kids->second.end());
        while (!queue.empty()) {
          const std::size_t x = queue.front();
          queue.pop_front();
          selected[x] = false;
          if (auto g = children.find(x); g != children.end()) queue.insert(queue.end(), g->second.begin(), g->second.end());
        }
      }
    }
  }

  std::vector<std::size_t> out;
  for (const auto& [c, sel] : selected)
    if (sel) out.push_back(c);
  return out;
}

std::vector<int> label_points(const CondensedTree& tree, const std::vector<std::size_t>& selected) {
  const std::size_t n = tree.n_points;
  std::map<std::size_t, std::size_t> parent_of;
  for (const auto& e : tree.edges) parent_of[e.child] = e.parent;

  std::map<std::size_t, bool> is_selected;
  for (std::size_t c : selected) is_selected[c] = true;

  std::vector<std::size_t> owner(n, 0);
  std::vector<bool> assigned(n, false);
  for (std::size_t p = 0; p < n; ++p) {
    std::size_t x = p;
    for (;;) {
      if (x >= n && is_selected.count(x)) {
        owner[p] = x;
        assigned[p] = true;
        break;
      }
      auto it = parent_of.find(x);
      if (it == parent_of.end()) break;
      x = it->second;
    }
  }

  // Number clusters by their smallest member.
  std::map<std::size_t, int> label_of;
  std::vector<int> labels(n, kNoise);
  for (std::size_t p = 0; p < n; ++p) {
    if (!assigned[p]) continue;
    auto [it, inserted] = label_of.try_emplace(owner[p], static_cast<int>(label_of.size()));
    labels[p] = it->second;
  }
  return labels;
}

}  // namespace hdbscan_detail

LowLevelClustering hdbscan(const std::vector<Vector>& points, const DensityParams& params) {
  using namespace hdbscan_detail;
  if (params.min_cluster_size < 2) throw ConfigError("min_cluster_size must be >= 2");
  if (params.effective_min_samples() < 1) throw ConfigError("min_samples must be >= 1");
  if (points.empty()) throw DomainError("clustering needs at least one point");
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) throw DomainError("clustering input has mixed dimensions");
    for (double x : p)
      if (std::isnan(x)) throw DomainError("NaN in clustering input");
  }

  const std::size_t n = points.size();
  LowLevelClustering result;
  result.labels.assign(n, kNoise);
  if (n < static_cast<std::size_t>(params.min_cluster_size)) {
    spdlog::warn("{} points is below min_cluster_size {}; all points are noise", n, params.min_cluster_size);
    return result;
  }
  int min_samples = params.effective_min_samples();
  if (static_cast<std::size_t>(min_samples) > n) {
    spdlog::warn("min_samples {} exceeds the {} points; clamping", min_samples, n);
    min_samples = static_cast<int>(n);
  }

  const DistanceMatrix d = cosine_distance_matrix(points);
  const std::vector<double> core = core_distances(d, min_samples);
  const auto merges = single_linkage(mutual_reachability_mst(d, core), n);
  const CondensedTree tree = condense_tree(merges, n, params.min_cluster_size);
  result.labels = label_points(tree, select_clusters(tree, params.selection));

  int count = 0;
  for (int l : result.labels) count = std::max(count, l + 1);
  result.clusters.resize(static_cast<std::size_t>(count));
  for (int c = 0; c < count; ++c) result.clusters[static_cast<std::size_t>(c)].id = c;
  for (std::size_t p = 0; p < n; ++p)
    if (result.labels[p] != kNoise) result.clusters[static_cast<std::size_t>(result.labels[p])].members.push_back(p);
  compute_centers(result, points);
  return result;
}

}  // namespace intentscape
