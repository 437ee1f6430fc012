#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "intentscape/clustering.hpp"
#include "intentscape/embedding.hpp"
#include "intentscape/mapping.hpp"

namespace intentscape {

// Dialogue-act labels dropped from every intent scheme.
const std::array<std::string_view, 7>& discarded_markers();
bool is_discarded_marker(std::string_view intent);

enum class AssignmentSource { clustered, forced, unassigned };

std::string_view to_string(AssignmentSource s);
std::optional<AssignmentSource> parse_assignment_source(std::string_view s);

struct Assignment {
  std::optional<int> low_cluster;
  std::optional<int> top_cluster;
  AssignmentSource source = AssignmentSource::unassigned;
  std::string reason;  // why the dialogue is unassigned

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

using Assignments = std::map<std::string, Assignment>;

struct ForceParams {
  double force_cluster_threshold = 0.3;
};

// Point indices of each dialogue's spans, ordered by rank.
std::map<std::string, std::vector<std::size_t>> spans_by_dialogue(const std::vector<SpanRef>& refs);

// Attaches each dialogue through its lowest-rank valid span. `labels` are the
// low-level labels of `refs`; `top_of_low` maps low cluster id to top id.
Assignments attach_dialogues(const std::vector<std::string>& dialogue_ids, const std::vector<SpanRef>& refs,
                             const std::vector<int>& labels, const std::vector<int>& top_of_low);

// Tries every valid span of every unassigned dialogue against every low-level
// center. Returns the number of dialogues forced.
std::size_t force_assign(Assignments& assignments, const std::vector<SpanRef>& refs,
                         const std::vector<Vector>& vectors, const LowLevelClustering& clustering,
                         const std::vector<int>& top_of_low, const ForceParams& params);

struct VolumeReport {
  std::map<std::string, std::size_t> volumes;
  std::size_t unassigned = 0;

  friend bool operator==(const VolumeReport&, const VolumeReport&) = default;
};

// Throws UnmappedClusterError if any live top cluster lacks an intent.
VolumeReport estimate_volumes(const Assignments& assignments, const IntentMapping& mapping);

double scheme_recall(const IntentMapping& mapping, const std::set<std::string>& scheme);

// Member span nearest the unweighted mean of each top cluster's low-level
// centers.
std::map<int, std::string> top_cluster_representatives(const LowLevelClustering& clustering,
                                                       const std::vector<int>& top_of_low,
                                                       const std::vector<Vector>& vectors,
                                                       const std::vector<std::string>& texts);

struct SourceCounts {
  std::size_t clustered = 0;
  std::size_t forced = 0;
  std::size_t unassigned = 0;
};

SourceCounts count_sources(const Assignments& assignments);

struct LandscapeResult {
  Assignments assignments;
  std::optional<VolumeReport> volumes;
};

nlohmann::json landscape_to_json(const LandscapeResult& result);
LandscapeResult landscape_from_json(const nlohmann::json& j);

}  // namespace intentscape
