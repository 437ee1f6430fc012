#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "intentscape/clustering.hpp"
#include "intentscape/corpus.hpp"
#include "intentscape/mapping.hpp"
#include "intentscape/validation.hpp"

namespace intentscape {

inline constexpr std::string_view kUnlabeled = "UNLABELED";

struct GoldLabel {
  std::string dialogue_id;
  int turn_index = 0;
  std::string intent;

  friend bool operator==(const GoldLabel&, const GoldLabel&) = default;
};

// Reads conversationId, turnNumber, intent rows. Several rows for one turn
// (sentence-level annotation) collapse to the majority label, ties going to
// the first. Rows with an empty intent are skipped.
std::vector<GoldLabel> load_gold(std::istream& in, CorpusFormat format);

struct EvalParams {
  double unlabeled_threshold = 0.4;
  int min_support = 10;
};

struct Prediction {
  std::optional<int> cluster;  // nullopt means UNLABELED
  double similarity = 0.0;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

// Most similar low-level center by cosine against the raw mean centers.
// Throws DomainError on a zero span vector or an empty center list.
Prediction zero_shot_classify(std::span<const double> span_vector, const std::vector<LowLevelCluster>& clusters,
                              const EvalParams& params);

struct AlignedSpan {
  std::size_t span_index = 0;  // into the spans passed to align_gold
  std::string intent;
};

struct Alignment {
  std::vector<AlignedSpan> pairs;
  std::size_t excluded_marker = 0;
  std::size_t excluded_unlabeled = 0;
  std::size_t excluded_missing_dialogue = 0;
};

Alignment align_gold(const std::vector<ValidatedSpan>& spans, const std::vector<GoldLabel>& gold);

struct IntentRow {
  std::string intent;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct EvaluationReport {
  std::vector<IntentRow> rows;  // sorted by intent, support > min_support only
  std::size_t unlabeled_count = 0;
  std::size_t evaluated = 0;
  // gold intent -> predicted intent (or UNLABELED) -> count
  std::map<std::string, std::map<std::string, std::size_t>> confusion;
};

// `gold[i]` pairs with `predictions[i]`. `top_of_low` maps low cluster ids to
// top cluster ids, which the mapping resolves to intents. Throws
// UnmappedClusterError if a predicted cluster has no intent.
EvaluationReport classification_report(const std::vector<std::string>& gold,
                                       const std::vector<Prediction>& predictions,
                                       const std::vector<int>& top_of_low, const IntentMapping& mapping,
                                       const EvalParams& params);

nlohmann::json report_to_json(const EvaluationReport& r);

}  // namespace intentscape
