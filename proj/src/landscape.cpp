#include "intentscape/landscape.hpp"

#include <algorithm>
#include <limits>

#include <spdlog/spdlog.h>

#include "intentscape/error.hpp"

namespace intentscape {

using nlohmann::json;

const std::array<std::string_view, 7>& discarded_markers() {
  static const std::array<std::string_view, 7> markers{"openinggreeting", "closinggreeting", "confirmation",
                                                       "rejection",       "contentonly",     "thankyou",
                                                       "outofdomain"};
  return markers;
}

bool is_discarded_marker(std::string_view intent) {
  const auto& m = discarded_markers();
  return std::find(m.begin(), m.end(), intent) != m.end();
}

std::string_view to_string(AssignmentSource s) {
  switch (s) {
    case AssignmentSource::clustered: return "clustered";
    case AssignmentSource::forced: return "forced";
    case AssignmentSource::unassigned: return "unassigned";
  }
  return "unassigned";
}

std::optional<AssignmentSource> parse_assignment_source(std::string_view s) {
  for (auto v : {AssignmentSource::clustered, AssignmentSource::forced, AssignmentSource::unassigned})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

std::map<std::string, std::vector<std::size_t>> spans_by_dialogue(const std::vector<SpanRef>& refs) {
  std::map<std::string, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < refs.size(); ++i) out[refs[i].dialogue_id].push_back(i);
  for (auto& [id, idx] : out)
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return refs[a].rank < refs[b].rank; });
  return out;
}

Assignments attach_dialogues(const std::vector<std::string>& dialogue_ids, const std::vector<SpanRef>& refs,
                             const std::vector<int>& labels, const std::vector<int>& top_of_low) {
  if (labels.size() != refs.size()) throw Error("attach_dialogues: labels and spans differ in length");
  const auto by_dialogue = spans_by_dialogue(refs);
  Assignments out;
  for (const auto& id : dialogue_ids) {
    Assignment a;
    auto it = by_dialogue.find(id);
    if (it == by_dialogue.end()) {
      a.reason = "no valid spans";
    } else {
      const int low = labels[it->second.front()];
      if (low == kNoise) {
        a.reason = "representative span is noise";
      } else {
        if (low < 0 || static_cast<std::size_t>(low) >= top_of_low.size())
          throw Error("attach_dialogues: low cluster " + std::to_string(low) + " has no top cluster");
        a.low_cluster = low;
        a.top_cluster = top_of_low[low];
        a.source = AssignmentSource::clustered;
      }
    }
    out.emplace(id, std::move(a));
  }
  return out;
}

std::size_t force_assign(Assignments& assignments, const std::vector<SpanRef>& refs,
                         const std::vector<Vector>& vectors, const LowLevelClustering& clustering,
                         const std::vector<int>& top_of_low, const ForceParams& params) {
  if (vectors.size() != refs.size()) throw Error("force_assign: vectors and spans differ in length");
  const auto by_dialogue = spans_by_dialogue(refs);
  std::size_t forced = 0;
  for (auto& [id, a] : assignments) {
    if (a.source != AssignmentSource::unassigned) continue;
    auto it = by_dialogue.find(id);
    if (it == by_dialogue.end()) {
      a.reason = "no valid spans";
      continue;
    }
    double best = std::numeric_limits<double>::infinity();
    int best_cluster = kNoise;
    for (std::size_t p : it->second) {
      for (const auto& c : clustering.clusters) {
        if (norm(c.center) == 0.0) continue;
        const double d = cosine_distance(vectors[p], c.center);
        if (d < best || (d == best && c.id < best_cluster)) {
          best = d;
          best_cluster = c.id;
        }
      }
    }
    if (best_cluster != kNoise && best < params.force_cluster_threshold) {
      a.low_cluster = best_cluster;
      a.top_cluster = top_of_low.at(best_cluster);
      a.source = AssignmentSource::forced;
      a.reason.clear();
      ++forced;
    } else {
      a.reason = best_cluster == kNoise ? "no cluster centers" : "nearest center beyond force threshold";
    }
  }
  return forced;
}

VolumeReport estimate_volumes(const Assignments& assignments, const IntentMapping& mapping) {
  if (auto missing = mapping.unmapped(); !missing.empty()) throw UnmappedClusterError(missing);
  VolumeReport r;
  for (const auto& [id, e] : mapping.entries) r.volumes[*e.intent];
  std::vector<int> dangling;
  for (const auto& [dialogue, a] : assignments) {
    if (a.source == AssignmentSource::unassigned || !a.top_cluster) {
      ++r.unassigned;
      continue;
    }
    const int live = mapping.resolve(*a.top_cluster);
    auto it = mapping.entries.find(live);
    if (it == mapping.entries.end()) {
      dangling.push_back(*a.top_cluster);
      continue;
    }
    ++r.volumes[*it->second.intent];
  }
  if (!dangling.empty()) {
    std::sort(dangling.begin(), dangling.end());
    dangling.erase(std::unique(dangling.begin(), dangling.end()), dangling.end());
    throw UnmappedClusterError(dangling);
  }
  return r;
}

double scheme_recall(const IntentMapping& mapping, const std::set<std::string>& scheme) {
  if (scheme.empty()) throw DomainError("scheme_recall: empty scheme");
  for (const auto& s : scheme)
    if (is_discarded_marker(s)) throw DomainError("scheme_recall: scheme contains marker '" + s + "'");
  std::set<std::string> mapped;
  for (const auto& [id, e] : mapping.entries)
    if (e.intent) mapped.insert(*e.intent);
  std::size_t hit = 0;
  for (const auto& s : scheme) hit += mapped.count(s);
  return static_cast<double>(hit) / static_cast<double>(scheme.size());
}

std::map<int, std::string> top_cluster_representatives(const LowLevelClustering& clustering,
                                                       const std::vector<int>& top_of_low,
                                                       const std::vector<Vector>& vectors,
                                                       const std::vector<std::string>& texts) {
  std::map<int, std::vector<const LowLevelCluster*>> groups;
  for (const auto& c : clustering.clusters) groups[top_of_low.at(c.id)].push_back(&c);

  std::map<int, std::string> out;
  for (const auto& [top, lows] : groups) {
    Vector mean(lows.front()->center.size(), 0.0);
    for (const auto* c : lows)
      for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += c->center[k];
    for (auto& x : mean) x /= static_cast<double>(lows.size());

    const bool degenerate = norm(mean) == 0.0;
    double best = std::numeric_limits<double>::infinity();
    const std::string* pick = nullptr;
    for (const auto* c : lows) {
      for (std::size_t p : c->members) {
        const double d = degenerate ? 0.0 : cosine_distance(vectors[p], mean);
        if (!pick || d < best || (d == best && texts[p] < *pick)) {
          best = d;
          pick = &texts[p];
        }
      }
    }
    out[top] = pick ? *pick : std::string{};
  }
  return out;
}

SourceCounts count_sources(const Assignments& assignments) {
  SourceCounts c;
  for (const auto& [id, a] : assignments) {
    switch (a.source) {
      case AssignmentSource::clustered: ++c.clustered; break;
      case AssignmentSource::forced: ++c.forced; break;
      case AssignmentSource::unassigned: ++c.unassigned; break;
    }
  }
  return c;
}

namespace {

json opt(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json landscape_to_json(const LandscapeResult& result) {
  json assignments = json::object();
  for (const auto& [id, a] : result.assignments) {
    json row{{"low_cluster", opt(a.low_cluster)}, {"top_cluster", opt(a.top_cluster)}, {"source", to_string(a.source)}};
    if (!a.reason.empty()) row["reason"] = a.reason;
    assignments[id] = std::move(row);
  }
  const auto counts = count_sources(result.assignments);
  json j{{"assignments", assignments},
         {"counts", {{"clustered", counts.clustered}, {"forced", counts.forced}, {"unassigned", counts.unassigned}}}};
  if (result.volumes) {
    j["volumes"] = result.volumes->volumes;
    j["unassigned_volume"] = result.volumes->unassigned;
  } else {
    j["volumes"] = nullptr;
  }
  return j;
}

LandscapeResult landscape_from_json(const json& j) {
  LandscapeResult r;
  for (const auto& [id, row] : j.at("assignments").items()) {
    Assignment a;
    if (!row.at("low_cluster").is_null()) a.low_cluster = row.at("low_cluster").get<int>();
    if (!row.at("top_cluster").is_null()) a.top_cluster = row.at("top_cluster").get<int>();
    auto src = parse_assignment_source(row.at("source").get<std::string>());
    if (!src) throw Error("landscape: unknown source for dialogue " + id);
    a.source = *src;
    a.reason = row.value("reason", std::string{});
    r.assignments.emplace(id, std::move(a));
  }
  if (j.contains("volumes") && !j.at("volumes").is_null()) {
    VolumeReport v;
    v.volumes = j.at("volumes").get<std::map<std::string, std::size_t>>();
    v.unassigned = j.value("unassigned_volume", std::size_t{0});
    r.volumes = std::move(v);
  }
  return r;
}

}  // namespace intentscape
