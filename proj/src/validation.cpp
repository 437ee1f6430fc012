#include "intentscape/validation.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include <spdlog/spdlog.h>

#include "intentscape/error.hpp"
#include "intentscape/text.hpp"

namespace intentscape {

using nlohmann::json;

ImpossibleDecision filter_impossible(const std::vector<CandidateSpan>& dialogue_candidates) {
  if (dialogue_candidates.empty()) return ImpossibleDecision::drop_no_candidates;
  const bool any = std::any_of(dialogue_candidates.begin(), dialogue_candidates.end(),
                               [](const CandidateSpan& c) { return c.impossible; });
  return any ? ImpossibleDecision::drop_impossible : ImpossibleDecision::keep;
}

bool validate_pos(const std::vector<TaggedToken>& tokens) {
  bool action = false;
  bool object = false;
  for (const auto& t : tokens) {
    action = action || t.tag == PosTag::VERB;
    object = object || t.tag == PosTag::NOUN || t.tag == PosTag::PROPN;
  }
  return action && object;
}

bool validate_sentence(const std::string& span) {
  if (span.find("customer: ") != std::string::npos) return false;
  if (span.find("agent: ") != std::string::npos) return false;
  if (span.find('\n') != std::string::npos) return false;
  const std::size_t n = text::whitespace_tokens(span).size();
  return n >= 2 && n <= 12;
}

ChannelCheck validate_channel(const CandidateSpan& span, const ContextDocument& ctx) {
  if (span.impossible || span.char_end <= span.char_start) return {};
  const Segment* first = ctx.segment_at(span.char_start);
  const Segment* last = ctx.segment_at(span.char_end - 1);
  if (first == nullptr || last == nullptr) return {};
  if (first != last) return {false, std::nullopt, ChannelReason::cross_turn};
  if (first->kind != SegmentKind::utterance) return {false, std::nullopt, ChannelReason::outside_utterance};
  if (first->channel != Channel::customer) return {false, std::nullopt, ChannelReason::agent_channel};
  return {true, first->turn_index, ChannelReason::ok};
}

std::array<double, 4> FunnelReport::percentages() const {
  auto pct = [this](std::size_t c) {
    return initial_dialogues == 0 ? 0.0 : 100.0 * static_cast<double>(c) / static_cast<double>(initial_dialogues);
  };
  return {pct(after_impossible), pct(after_pos), pct(after_sentence), pct(after_channel)};
}

FunnelReport& FunnelReport::operator+=(const FunnelReport& o) {
  initial_dialogues += o.initial_dialogues;
  after_impossible += o.after_impossible;
  after_pos += o.after_pos;
  after_sentence += o.after_sentence;
  after_channel += o.after_channel;
  no_candidates += o.no_candidates;
  tagger_failures += o.tagger_failures;
  return *this;
}

namespace {

constexpr std::size_t kTaggerBatch = 256;

// Tags every text; a failed batch is retried one text at a time so that a
// single bad span only fails itself.
std::vector<std::optional<std::vector<TaggedToken>>> tag_all(const std::vector<std::string>& texts,
                                                             TaggerBackend& tagger, std::size_t& failures) {
  std::vector<std::optional<std::vector<TaggedToken>>> out(texts.size());
  for (std::size_t begin = 0; begin < texts.size(); begin += kTaggerBatch) {
    const std::size_t end = std::min(texts.size(), begin + kTaggerBatch);
    std::vector<std::string> batch(texts.begin() + static_cast<std::ptrdiff_t>(begin),
                                   texts.begin() + static_cast<std::ptrdiff_t>(end));
    try {
      auto tagged = tagger.tag(batch);
      if (tagged.size() != batch.size()) throw Error("tagger returned wrong number of results");
      for (std::size_t i = 0; i < tagged.size(); ++i) out[begin + i] = std::move(tagged[i]);
      continue;
    } catch (const std::exception& e) {
      spdlog::warn("tagger batch failed, retrying per span: {}", e.what());
    }
    for (std::size_t i = begin; i < end; ++i) {
      try {
        auto tagged = tagger.tag({texts[i]});
        if (tagged.size() != 1) throw Error("tagger returned wrong number of results");
        out[i] = std::move(tagged[0]);
      } catch (const std::exception& e) {
        ++failures;
        spdlog::warn("tagger failed on span '{}': {}", texts[i], e.what());
      }
    }
  }
  return out;
}

}  // namespace

FunnelResult run_funnel(const std::map<std::string, std::vector<CandidateSpan>>& corpus_candidates,
                        const std::map<std::string, ContextDocument>& contexts, TaggerBackend& tagger) {
  FunnelResult result;
  FunnelReport& r = result.report;
  r.initial_dialogues = corpus_candidates.size();

  std::vector<const std::vector<CandidateSpan>*> kept;
  std::vector<const std::string*> kept_ids;
  for (const auto& [id, candidates] : corpus_candidates) {
    if (!contexts.count(id)) throw Error("no context for dialogue " + id);
    const auto decision = filter_impossible(candidates);
    if (decision == ImpossibleDecision::drop_no_candidates) ++r.no_candidates;
    if (decision != ImpossibleDecision::keep) continue;
    ++r.after_impossible;
    kept.push_back(&candidates);
    kept_ids.push_back(&id);
  }

  std::vector<std::string> texts;
  for (const auto* list : kept)
    for (const auto& c : *list) texts.push_back(c.text);
  const auto tags = tag_all(texts, tagger, r.tagger_failures);

  std::size_t t = 0;
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const ContextDocument& ctx = contexts.at(*kept_ids[k]);
    bool pos = false, sentence = false, channel = false;
    std::vector<ValidatedSpan> evaluated;
    for (const auto& c : *kept[k]) {
      ValidatedSpan v;
      v.candidate = c;
      v.pos_ok = tags[t].has_value() && validate_pos(*tags[t]);
      ++t;
      v.sentence_ok = validate_sentence(c.text);
      const ChannelCheck ch = validate_channel(c, ctx);
      v.channel_ok = ch.ok;
      v.source_turn = ch.source_turn;
      pos = pos || v.pos_ok;
      sentence = sentence || (v.pos_ok && v.sentence_ok);
      channel = channel || v.valid();
      evaluated.push_back(std::move(v));
    }
    r.after_pos += pos ? 1 : 0;
    r.after_sentence += sentence ? 1 : 0;
    r.after_channel += channel ? 1 : 0;

    std::vector<ValidatedSpan> valid;
    for (const auto& v : evaluated)
      if (v.valid()) valid.push_back(v);
    std::sort(valid.begin(), valid.end(),
              [](const ValidatedSpan& a, const ValidatedSpan& b) { return a.candidate.rank < b.candidate.rank; });
    if (!valid.empty()) result.valid_spans.emplace(*kept_ids[k], std::move(valid));
    result.evaluated_spans.emplace(*kept_ids[k], std::move(evaluated));
  }
  return result;
}

json funnel_to_json(const FunnelReport& r) {
  const auto p = r.percentages();
  return json{{"initial_dialogues", r.initial_dialogues},
              {"after_impossible", r.after_impossible},
              {"after_pos", r.after_pos},
              {"after_sentence", r.after_sentence},
              {"after_channel", r.after_channel},
              {"no_candidates", r.no_candidates},
              {"tagger_failures", r.tagger_failures},
              {"percentages", {p[0], p[1], p[2], p[3]}}};
}

FunnelReport funnel_from_json(const json& j) {
  FunnelReport r;
  r.initial_dialogues = j.at("initial_dialogues").get<std::size_t>();
  r.after_impossible = j.at("after_impossible").get<std::size_t>();
  r.after_pos = j.at("after_pos").get<std::size_t>();
  r.after_sentence = j.at("after_sentence").get<std::size_t>();
  r.after_channel = j.at("after_channel").get<std::size_t>();
  r.no_candidates = j.value("no_candidates", std::size_t{0});
  r.tagger_failures = j.value("tagger_failures", std::size_t{0});
  return r;
}

void write_valid_spans(std::ostream& out, const std::map<std::string, std::vector<ValidatedSpan>>& spans) {
  for (const auto& [id, list] : spans) {
    for (const auto& v : list) {
      const auto& c = v.candidate;
      json row = {{"dialogue_id", c.dialogue_id}, {"rank", c.rank},
                  {"text", c.text},               {"score", c.score},
                  {"char_start", c.char_start},   {"char_end", c.char_end},
                  {"source_turn", v.source_turn ? json(*v.source_turn) : json(nullptr)}};
      out << row.dump() << '\n';
    }
  }
}

std::vector<ValidatedSpan> read_valid_spans(std::istream& in) {
  std::vector<ValidatedSpan> out;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (text::trim(line).empty()) continue;
    try {
      const json obj = json::parse(line);
      ValidatedSpan v;
      v.candidate.dialogue_id = obj.at("dialogue_id").get<std::string>();
      v.candidate.rank = obj.at("rank").get<int>();
      v.candidate.text = obj.at("text").get<std::string>();
      v.candidate.score = obj.at("score").get<double>();
      v.candidate.char_start = obj.at("char_start").get<std::size_t>();
      v.candidate.char_end = obj.at("char_end").get<std::size_t>();
      if (!obj.at("source_turn").is_null()) v.source_turn = obj.at("source_turn").get<int>();
      v.pos_ok = v.sentence_ok = v.channel_ok = true;
      out.push_back(std::move(v));
    } catch (const json::exception& e) {
      throw RecordError(row, std::string("bad valid-span row: ") + e.what());
    }
  }
  return out;
}

}  // namespace intentscape
