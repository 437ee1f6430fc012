#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace intentscape {

// Reserved intent for clusters that match nothing in a known scheme.
inline constexpr std::string_view kOtherIntent = "OTHER";

struct MappingEntry {
  std::optional<std::string> intent;  // nullopt until the analyst maps it
  std::string representative_span;

  friend bool operator==(const MappingEntry&, const MappingEntry&) = default;
};

enum class MappingOpKind { merge, rename, set_other };

// merge(a, b): b is folded into a and deleted. rename(a, intent).
// set_other(a).
struct MappingOp {
  MappingOpKind kind = MappingOpKind::rename;
  int a = 0;
  int b = 0;
  std::string intent;

  static MappingOp merge(int into, int from) { return {MappingOpKind::merge, into, from, {}}; }
  static MappingOp rename(int id, std::string intent) { return {MappingOpKind::rename, id, 0, std::move(intent)}; }
  static MappingOp set_other(int id) { return {MappingOpKind::set_other, id, 0, {}}; }

  friend bool operator==(const MappingOp&, const MappingOp&) = default;
};

struct IntentMapping {
  std::map<int, MappingEntry> entries;  // live top-level clusters
  std::vector<MappingOp> merge_log;

  // Live cluster that `top_cluster` was merged into (itself if never merged).
  int resolve(int top_cluster) const;
  std::vector<int> unmapped() const;
  bool complete() const { return unmapped().empty(); }

  friend bool operator==(const IntentMapping&, const IntentMapping&) = default;
};

// One unmapped entry per top-level cluster, with its representative span.
IntentMapping initial_mapping(const std::map<int, std::string>& representatives);

// Applies `ops` in order and appends them to the log. Throws MappingError
// carrying the log position of the first op that names a deleted or unknown
// cluster.
IntentMapping apply_mapping_ops(IntentMapping mapping, const std::vector<MappingOp>& ops);

// Rebuilds entries from `initial` by replaying `log`.
IntentMapping replay_mapping(const IntentMapping& initial, const std::vector<MappingOp>& log);

nlohmann::json mapping_to_json(const IntentMapping& m);
IntentMapping mapping_from_json(const nlohmann::json& j);

// Canonical bytes of mapping.json: sorted keys, two-space indent, trailing
// newline.
std::string serialize_mapping(const IntentMapping& m);

}  // namespace intentscape
