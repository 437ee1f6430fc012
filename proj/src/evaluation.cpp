#include "intentscape/evaluation.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "intentscape/csv.hpp"
#include "intentscape/embedding.hpp"
#include "intentscape/error.hpp"
#include "intentscape/landscape.hpp"
#include "intentscape/text.hpp"

namespace intentscape {

using nlohmann::json;

namespace {

int parse_turn_field(const std::string& s, std::size_t row) {
  const auto t = std::string(text::trim(s));
  try {
    std::size_t used = 0;
    const int v = std::stoi(t, &used);
    if (used != t.size() || v < 0) throw std::invalid_argument("turn");
    return v;
  } catch (const std::exception&) {
    throw RecordError(row, "turnNumber '" + s + "' is not a non-negative integer");
  }
}

struct TurnVotes {
  std::vector<std::string> order;  // labels in first-seen order
  std::map<std::string, std::size_t> counts;
};

}  // namespace

std::vector<GoldLabel> load_gold(std::istream& in, CorpusFormat format) {
  std::map<std::pair<std::string, int>, TurnVotes> votes;
  std::vector<std::pair<std::string, int>> first_seen;
  auto add = [&](std::string dialogue, int turn, std::string intent) {
    intent = std::string(text::trim(intent));
    if (intent.empty()) return;
    auto key = std::make_pair(std::move(dialogue), turn);
    auto [it, inserted] = votes.try_emplace(key);
    if (inserted) first_seen.push_back(key);
    if (it->second.counts[intent]++ == 0) it->second.order.push_back(intent);
  };

  if (format == CorpusFormat::csv) {
    csv::Reader reader(in);
    auto head = reader.next();
    if (!head) return {};
    csv::Header header(*head);
    auto c_id = header.find("conversationId");
    auto c_turn = header.find("turnNumber");
    auto c_intent = header.find("intent");
    if (!c_id || !c_turn || !c_intent) throw RecordError(1, "gold header needs conversationId, turnNumber, intent");
    while (auto rec = reader.next()) {
      const auto row = reader.record_number();
      if (rec->size() == 1 && rec->front().empty()) continue;
      const std::size_t need = std::max({*c_id, *c_turn, *c_intent});
      if (rec->size() <= need) throw RecordError(row, "too few fields");
      add((*rec)[*c_id], parse_turn_field((*rec)[*c_turn], row), (*rec)[*c_intent]);
    }
  } else {
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
      ++row;
      if (text::trim(line).empty()) continue;
      try {
        const auto j = json::parse(line);
        const auto& t = j.at("turnNumber");
        const int turn = t.is_string() ? parse_turn_field(t.get<std::string>(), row) : t.get<int>();
        const auto& intent = j.at("intent");
        add(j.at("conversationId").get<std::string>(), turn, intent.is_null() ? "" : intent.get<std::string>());
      } catch (const json::exception& e) {
        throw RecordError(row, e.what());
      }
    }
  }

  std::vector<GoldLabel> out;
  for (const auto& key : first_seen) {
    const auto& v = votes.at(key);
    std::string best = v.order.front();
    for (const auto& label : v.order)
      if (v.counts.at(label) > v.counts.at(best)) best = label;
    out.push_back(GoldLabel{key.first, key.second, best});
  }
  return out;
}

Prediction zero_shot_classify(std::span<const double> s, const std::vector<LowLevelCluster>& clusters,
                              const EvalParams& params) {
  if (clusters.empty()) throw DomainError("zero_shot_classify: no cluster centers");
  if (norm(s) == 0.0) throw DomainError("zero_shot_classify: zero span vector");
  std::optional<int> best_id;
  double best = 0.0;
  for (const auto& c : clusters) {
    if (norm(c.center) == 0.0) continue;
    const double sim = cosine_similarity(s, c.center);
    if (!best_id || sim > best || (sim == best && c.id < *best_id)) {
      best = sim;
      best_id = c.id;
    }
  }
  if (!best_id || best < params.unlabeled_threshold) return Prediction{std::nullopt, best_id ? best : 0.0};
  return Prediction{best_id, best};
}

Alignment align_gold(const std::vector<ValidatedSpan>& spans, const std::vector<GoldLabel>& gold) {
  std::map<std::pair<std::string, int>, const std::string*> labels;
  std::set<std::string> dialogues;
  for (const auto& g : gold) {
    labels[{g.dialogue_id, g.turn_index}] = &g.intent;
    dialogues.insert(g.dialogue_id);
  }
  Alignment a;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const auto& s = spans[i];
    if (!dialogues.count(s.candidate.dialogue_id)) {
      ++a.excluded_missing_dialogue;
      continue;
    }
    auto it = s.source_turn ? labels.find({s.candidate.dialogue_id, *s.source_turn}) : labels.end();
    if (it == labels.end()) {
      ++a.excluded_unlabeled;
    } else if (is_discarded_marker(*it->second)) {
      ++a.excluded_marker;
    } else {
      a.pairs.push_back(AlignedSpan{i, *it->second});
    }
  }
  return a;
}

EvaluationReport classification_report(const std::vector<std::string>& gold,
                                       const std::vector<Prediction>& predictions,
                                       const std::vector<int>& top_of_low, const IntentMapping& mapping,
                                       const EvalParams& params) {
  if (gold.size() != predictions.size()) throw Error("classification_report: gold and predictions differ in length");
  if (params.min_support < 1) throw ConfigError("min_support must be at least 1");

  std::vector<std::string> predicted;
  predicted.reserve(predictions.size());
  std::set<int> unmapped;
  for (const auto& p : predictions) {
    if (!p.cluster) {
      predicted.emplace_back(kUnlabeled);
      continue;
    }
    if (*p.cluster < 0 || static_cast<std::size_t>(*p.cluster) >= top_of_low.size())
      throw Error("classification_report: unknown low cluster " + std::to_string(*p.cluster));
    const int top = top_of_low[*p.cluster];
    auto it = mapping.entries.find(mapping.resolve(top));
    if (it == mapping.entries.end() || !it->second.intent) {
      unmapped.insert(top);
      predicted.emplace_back();
      continue;
    }
    predicted.push_back(*it->second.intent);
  }
  if (!unmapped.empty()) throw UnmappedClusterError({unmapped.begin(), unmapped.end()});

  EvaluationReport r;
  r.evaluated = gold.size();
  std::map<std::string, std::size_t> support, tp, fp;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    ++support[gold[i]];
    ++r.confusion[gold[i]][predicted[i]];
    if (predicted[i] == kUnlabeled) {
      ++r.unlabeled_count;
    } else if (predicted[i] == gold[i]) {
      ++tp[gold[i]];
    } else {
      ++fp[predicted[i]];
    }
  }
  for (const auto& [intent, n] : support) {
    if (n <= static_cast<std::size_t>(params.min_support)) continue;
    IntentRow row;
    row.intent = intent;
    row.support = n;
    const double t = static_cast<double>(tp[intent]);
    const double denom = t + static_cast<double>(fp[intent]);
    row.precision = denom > 0 ? t / denom : 0.0;
    row.recall = t / static_cast<double>(n);
    row.f1 = row.precision + row.recall > 0 ? 2 * row.precision * row.recall / (row.precision + row.recall) : 0.0;
    r.rows.push_back(row);
  }
  return r;
}

json report_to_json(const EvaluationReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back(json{{"intent", row.intent},
                        {"precision", row.precision},
                        {"recall", row.recall},
                        {"f1", row.f1},
                        {"support", row.support}});
  return json{{"rows", rows}, {"unlabeled_count", r.unlabeled_count}, {"evaluated", r.evaluated},
              {"confusion", r.confusion}};
}

}  // namespace intentscape
