#include "intentscape/mapping.hpp"

#include "intentscape/error.hpp"

namespace intentscape {

using nlohmann::json;

int IntentMapping::resolve(int top_cluster) const {
  std::map<int, int> alias;
  for (const auto& op : merge_log)
    if (op.kind == MappingOpKind::merge) alias[op.b] = op.a;
  int id = top_cluster;
  for (auto it = alias.find(id); it != alias.end(); it = alias.find(id)) id = it->second;
  return id;
}

std::vector<int> IntentMapping::unmapped() const {
  std::vector<int> out;
  for (const auto& [id, e] : entries)
    if (!e.intent || e.intent->empty()) out.push_back(id);
  return out;
}

IntentMapping initial_mapping(const std::map<int, std::string>& representatives) {
  IntentMapping m;
  for (const auto& [id, span] : representatives) m.entries[id] = MappingEntry{std::nullopt, span};
  return m;
}

IntentMapping apply_mapping_ops(IntentMapping mapping, const std::vector<MappingOp>& ops) {
  for (const auto& op : ops) {
    const std::size_t position = mapping.merge_log.size();
    auto live = [&](int id) {
      if (!mapping.entries.count(id))
        throw MappingError(position, "cluster " + std::to_string(id) + " is unknown or was merged away");
    };
    switch (op.kind) {
      case MappingOpKind::merge:
        live(op.a);
        live(op.b);
        if (op.a == op.b) throw MappingError(position, "cannot merge cluster " + std::to_string(op.a) + " into itself");
        mapping.entries.erase(op.b);
        break;
      case MappingOpKind::rename:
        live(op.a);
        if (op.intent.empty()) throw MappingError(position, "rename to an empty intent");
        mapping.entries[op.a].intent = op.intent;
        break;
      case MappingOpKind::set_other:
        live(op.a);
        mapping.entries[op.a].intent = std::string(kOtherIntent);
        break;
    }
    mapping.merge_log.push_back(op);
  }
  return mapping;
}

IntentMapping replay_mapping(const IntentMapping& initial, const std::vector<MappingOp>& log) {
  IntentMapping base = initial;
  base.merge_log.clear();
  return apply_mapping_ops(std::move(base), log);
}

namespace {

json op_to_json(const MappingOp& op) {
  switch (op.kind) {
    case MappingOpKind::merge: return json{{"op", "merge"}, {"a", op.a}, {"b", op.b}};
    case MappingOpKind::rename: return json{{"op", "rename"}, {"id", op.a}, {"intent", op.intent}};
    case MappingOpKind::set_other: return json{{"op", "set_other"}, {"id", op.a}};
  }
  return {};
}

MappingOp op_from_json(const json& j) {
  const auto kind = j.at("op").get<std::string>();
  if (kind == "merge") return MappingOp::merge(j.at("a").get<int>(), j.at("b").get<int>());
  if (kind == "rename") return MappingOp::rename(j.at("id").get<int>(), j.at("intent").get<std::string>());
  if (kind == "set_other") return MappingOp::set_other(j.at("id").get<int>());
  throw Error("unknown mapping op '" + kind + "'");
}

}  // namespace

json mapping_to_json(const IntentMapping& m) {
  json entries = json::object();
  for (const auto& [id, e] : m.entries)
    entries[std::to_string(id)] = json{{"intent", e.intent ? json(*e.intent) : json(nullptr)},
                                       {"representative_span", e.representative_span}};
  json log = json::array();
  for (const auto& op : m.merge_log) log.push_back(op_to_json(op));
  return json{{"entries", entries}, {"merge_log", log}};
}

IntentMapping mapping_from_json(const json& j) {
  IntentMapping m;
  try {
    for (const auto& [key, value] : j.at("entries").items()) {
      std::size_t used = 0;
      const int id = std::stoi(key, &used);
      if (used != key.size()) throw Error("non-integer cluster id '" + key + "'");
      MappingEntry e;
      if (!value.at("intent").is_null()) e.intent = value.at("intent").get<std::string>();
      e.representative_span = value.value("representative_span", std::string{});
      m.entries[id] = std::move(e);
    }
    for (const auto& op : j.at("merge_log")) m.merge_log.push_back(op_from_json(op));
  } catch (const json::exception& e) {
    throw Error(std::string("malformed mapping: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw Error("malformed mapping: non-integer cluster id");
  }
  return m;
}

std::string serialize_mapping(const IntentMapping& m) { return mapping_to_json(m).dump(2) + "\n"; }

}  // namespace intentscape
