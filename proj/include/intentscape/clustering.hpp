#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "intentscape/embedding.hpp"

namespace intentscape {

enum class ClusterSelection { excess_of_mass, leaf };

std::string_view to_string(ClusterSelection s);
std::optional<ClusterSelection> parse_cluster_selection(std::string_view s);

struct DensityParams {
  int min_cluster_size = 2;
  // Defaults to min_cluster_size.
  std::optional<int> min_samples;
  ClusterSelection selection = ClusterSelection::excess_of_mass;

  int effective_min_samples() const { return min_samples.value_or(min_cluster_size); }
};

inline constexpr int kNoise = -1;

struct LowLevelCluster {
  int id = 0;
  std::vector<std::size_t> members;  // point indices, ascending
  Vector center;                     // arithmetic mean of members, not renormalized
};

struct LowLevelClustering {
  std::vector<int> labels;  // kNoise or 0..C-1
  std::vector<LowLevelCluster> clusters;
};

// HDBSCAN over cosine distance. Cluster ids are assigned in order of each
// cluster's smallest member index.
LowLevelClustering hdbscan(const std::vector<Vector>& points, const DensityParams& params);

// Fills clusters[i].center with the mean of its members.
void compute_centers(LowLevelClustering& clustering, const std::vector<Vector>& points);

// Hyperparameters tuned per MultiDoGo domain.
struct DomainPreset {
  std::string_view name;
  int min_cluster_size;
  double distance_threshold;
  double force_cluster_threshold;
};

const std::vector<DomainPreset>& domain_presets();
std::optional<DomainPreset> find_preset(std::string_view name);

}  // namespace intentscape
