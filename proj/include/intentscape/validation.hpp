#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "intentscape/corpus.hpp"
#include "intentscape/extraction.hpp"
#include "intentscape/tagger.hpp"

namespace intentscape {

struct ValidatedSpan {
  CandidateSpan candidate;
  bool pos_ok = false;
  bool sentence_ok = false;
  bool channel_ok = false;
  std::optional<int> source_turn;

  bool valid() const { return pos_ok && sentence_ok && channel_ok; }
};

enum class ImpossibleDecision { keep, drop_impossible, drop_no_candidates };

// Whole-dialogue rule: drop if any candidate is the impossible answer.
ImpossibleDecision filter_impossible(const std::vector<CandidateSpan>& dialogue_candidates);

// True iff at least one VERB (AUX excluded) and one NOUN or PROPN.
bool validate_pos(const std::vector<TaggedToken>& tokens);

// True iff no channel prefix or line break, and 2..12 whitespace tokens.
bool validate_sentence(const std::string& text);

enum class ChannelReason { ok, agent_channel, cross_turn, outside_utterance };

struct ChannelCheck {
  bool ok = false;
  std::optional<int> source_turn;
  ChannelReason reason = ChannelReason::outside_utterance;
};

// The span must lie inside a single customer utterance segment.
ChannelCheck validate_channel(const CandidateSpan& span, const ContextDocument& ctx);

// Surviving dialogue counts per stage. Addition merges shards.
struct FunnelReport {
  std::size_t initial_dialogues = 0;
  std::size_t after_impossible = 0;
  std::size_t after_pos = 0;
  std::size_t after_sentence = 0;
  std::size_t after_channel = 0;
  // Diagnostics, not part of the stage counts.
  std::size_t no_candidates = 0;
  std::size_t tagger_failures = 0;

  // 100 * count / initial_dialogues for the four stages (0 when empty).
  std::array<double, 4> percentages() const;

  FunnelReport& operator+=(const FunnelReport& other);
  friend FunnelReport operator+(FunnelReport a, const FunnelReport& b) { return a += b; }
  friend bool operator==(const FunnelReport&, const FunnelReport&) = default;
};

struct FunnelResult {
  FunnelReport report;
  // Valid spans of each surviving dialogue, in rank order.
  std::map<std::string, std::vector<ValidatedSpan>> valid_spans;
  // Every span that reached the per-span stages, valid or not.
  std::map<std::string, std::vector<ValidatedSpan>> evaluated_spans;
};

// Applies impossible -> POS -> sentence -> channel. A dialogue survives a
// stage iff at least one of its candidates passes that stage and all
// earlier ones. Tagger failures mark the span pos_ok = false.
FunnelResult run_funnel(const std::map<std::string, std::vector<CandidateSpan>>& corpus_candidates,
                        const std::map<std::string, ContextDocument>& contexts, TaggerBackend& tagger);

nlohmann::json funnel_to_json(const FunnelReport& report);
FunnelReport funnel_from_json(const nlohmann::json& j);

// Valid-span file: JSONL of {dialogue_id, rank, text, score, char_start,
// char_end, source_turn}.
void write_valid_spans(std::ostream& out, const std::map<std::string, std::vector<ValidatedSpan>>& spans);
std::vector<ValidatedSpan> read_valid_spans(std::istream& in);

}  // namespace intentscape
