#include "intentscape/clustering.hpp"

#include "intentscape/error.hpp"

namespace intentscape {

std::string_view to_string(ClusterSelection s) { return s == ClusterSelection::leaf ? "leaf" : "excess_of_mass"; }

std::optional<ClusterSelection> parse_cluster_selection(std::string_view s) {
  if (s == "excess_of_mass" || s == "eom") return ClusterSelection::excess_of_mass;
  if (s == "leaf") return ClusterSelection::leaf;
  return std::nullopt;
}

void compute_centers(LowLevelClustering& clustering, const std::vector<Vector>& points) {
  for (auto& c : clustering.clusters) {
    if (c.members.empty()) throw Error("cluster " + std::to_string(c.id) + " has no members");
    const std::size_t dim = points[c.members.front()].size();
    Vector center(dim, 0.0);
    for (std::size_t m : c.members)
      for (std::size_t j = 0; j < dim; ++j) center[j] += points[m][j];
    for (double& x : center) x /= static_cast<double>(c.members.size());
    c.center = std::move(center);
  }
}

const std::vector<DomainPreset>& domain_presets() {
  static const std::vector<DomainPreset> presets = {
      {"airline", 4, 0.29, 0.3},  {"media", 3, 0.42, 0.2},    {"insurance", 2, 0.5, 0.2},
      {"finance", 2, 0.45, 0.2},  {"software", 2, 0.5, 0.3},
  };
  return presets;
}

std::optional<DomainPreset> find_preset(std::string_view name) {
  for (const auto& p : domain_presets())
    if (p.name == name) return p;
  return std::nullopt;
}

}  // namespace intentscape
