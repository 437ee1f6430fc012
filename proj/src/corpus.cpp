#include "intentscape/corpus.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "intentscape/csv.hpp"
#include "intentscape/error.hpp"
#include "intentscape/text.hpp"

namespace intentscape {

using nlohmann::json;

std::string_view to_string(Channel c) { return c == Channel::customer ? "customer" : "agent"; }

std::optional<Channel> parse_channel(std::string_view s) {
  if (s == "customer") return Channel::customer;
  if (s == "agent") return Channel::agent;
  return std::nullopt;
}

std::string channel_prefix(Channel c) { return std::string(to_string(c)) + ": "; }

std::optional<CorpusFormat> parse_corpus_format(std::string_view s) {
  if (s == "jsonl") return CorpusFormat::jsonl;
  if (s == "csv") return CorpusFormat::csv;
  return std::nullopt;
}

ContextDocument::ContextDocument(std::string dialogue_id, std::string text, std::vector<Segment> segments)
    : dialogue_id_(std::move(dialogue_id)),
      text_(std::move(text)),
      segments_(std::move(segments)),
      byte_offsets_(text::codepoint_offsets(text_)) {}

std::string ContextDocument::slice(std::size_t start, std::size_t end) const {
  if (start > end || end > length()) throw std::out_of_range("context slice out of range");
  return text_.substr(byte_offsets_[start], byte_offsets_[end] - byte_offsets_[start]);
}

const Segment* ContextDocument::segment_at(std::size_t offset) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), offset,
                             [](std::size_t off, const Segment& s) { return off < s.char_end; });
  if (it == segments_.end() || offset < it->char_start) return nullptr;
  return &*it;
}

std::optional<int> ContextDocument::turn_at(std::size_t offset) const {
  const Segment* seg = segment_at(offset);
  if (seg == nullptr || seg->kind != SegmentKind::utterance) return std::nullopt;
  return seg->turn_index;
}

namespace {

struct Row {
  std::string dialogue_id;
  long long turn = 0;
  std::string channel;
  std::string utterance;
};

Utterance make_utterance(Row row, std::size_t row_number) {
  auto channel = parse_channel(row.channel);
  if (!channel) throw RecordError(row_number, "unknown channel '" + row.channel + "'");
  if (row.dialogue_id.empty()) throw RecordError(row_number, "empty conversationId");
  if (row.turn < 0) throw RecordError(row_number, "negative turnNumber");
  if (!text::is_valid_utf8(row.utterance)) throw RecordError(row_number, "utterance is not valid UTF-8");
  std::string cleaned = text::collapse_newlines(row.utterance);
  if (text::trim(cleaned).empty()) throw RecordError(row_number, "empty utterance");
  return Utterance{std::move(row.dialogue_id), static_cast<int>(row.turn), *channel, std::move(cleaned)};
}

long long parse_turn(const std::string& s, std::size_t row_number) {
  const auto t = text::trim(s);
  try {
    std::size_t used = 0;
    const long long v = std::stoll(std::string(t), &used);
    if (used != t.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw RecordError(row_number, "turnNumber '" + s + "' is not an integer");
  }
}

std::vector<Dialogue> group(std::vector<Utterance> utterances) {
  std::vector<Dialogue> dialogues;
  std::map<std::string, std::size_t> index;
  for (auto& u : utterances) {
    auto [it, inserted] = index.try_emplace(u.dialogue_id, dialogues.size());
    if (inserted) dialogues.push_back(Dialogue{u.dialogue_id, {}});
    dialogues[it->second].utterances.push_back(std::move(u));
  }
  for (auto& d : dialogues) {
    std::stable_sort(d.utterances.begin(), d.utterances.end(),
                     [](const Utterance& a, const Utterance& b) { return a.turn_index < b.turn_index; });
    bool has_customer = false;
    for (std::size_t i = 0; i < d.utterances.size(); ++i) {
      const auto& u = d.utterances[i];
      if (i > 0 && d.utterances[i - 1].turn_index == u.turn_index)
        throw CorpusError("dialogue " + d.id + ": duplicate turn " + std::to_string(u.turn_index));
      if (u.turn_index != static_cast<int>(i))
        throw CorpusError("dialogue " + d.id + ": turns are not contiguous from 0 (missing turn " +
                          std::to_string(i) + ")");
      has_customer = has_customer || u.channel == Channel::customer;
    }
    if (!has_customer) throw CorpusError("dialogue " + d.id + ": no customer utterance");
  }
  return dialogues;
}

std::vector<Utterance> read_jsonl(std::istream& in) {
  std::vector<Utterance> out;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (text::trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw RecordError(row, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw RecordError(row, "expected a JSON object");
    Row r;
    try {
      r.dialogue_id = obj.at("conversationId").get<std::string>();
      r.turn = obj.at("turnNumber").get<long long>();
      r.channel = obj.at("channel").get<std::string>();
      r.utterance = obj.at("utterance").get<std::string>();
    } catch (const json::exception& e) {
      throw RecordError(row, std::string("missing or mistyped field: ") + e.what());
    }
    out.push_back(make_utterance(std::move(r), row));
  }
  return out;
}

std::vector<Utterance> read_csv(std::istream& in) {
  csv::Reader reader(in);
  auto header_row = reader.next();
  if (!header_row) return {};
  const csv::Header header(std::move(*header_row));
  const auto id_col = header.find("conversationId");
  const auto turn_col = header.find("turnNumber");
  const auto channel_col = header.find_any({"channel", "authorRole"});
  const auto text_col = header.find("utterance");
  if (!id_col || !turn_col || !channel_col || !text_col)
    throw RecordError(1, "header must name conversationId, turnNumber, channel, utterance");

  std::vector<Utterance> out;
  while (auto fields = reader.next()) {
    const std::size_t row = reader.record_number();
    if (fields->size() == 1 && text::trim((*fields)[0]).empty()) continue;
    const std::size_t need = std::max({*id_col, *turn_col, *channel_col, *text_col});
    if (fields->size() <= need) throw RecordError(row, "too few columns");
    Row r;
    r.dialogue_id = std::string(text::trim((*fields)[*id_col]));
    r.turn = parse_turn((*fields)[*turn_col], row);
    r.channel = text::to_lower_ascii(text::trim((*fields)[*channel_col]));
    r.utterance = (*fields)[*text_col];
    out.push_back(make_utterance(std::move(r), row));
  }
  return out;
}

}  // namespace

std::vector<Dialogue> parse_corpus(std::istream& source, CorpusFormat format) {
  return group(format == CorpusFormat::jsonl ? read_jsonl(source) : read_csv(source));
}

void write_corpus_jsonl(std::ostream& out, const std::vector<Dialogue>& dialogues) {
  for (const auto& d : dialogues) {
    for (const auto& u : d.utterances) {
      json row = {{"conversationId", u.dialogue_id},
                  {"turnNumber", u.turn_index},
                  {"channel", to_string(u.channel)},
                  {"utterance", u.text}};
      out << row.dump() << '\n';
    }
  }
}

ContextDocument render_context(const Dialogue& d) {
  std::string text;
  std::vector<Segment> segments;
  segments.reserve(d.utterances.size() * 3);
  std::size_t pos = 0;
  auto append = [&](const std::string& piece, const Utterance& u, SegmentKind kind) {
    const std::size_t len = text::codepoint_length(piece);
    segments.push_back(Segment{pos, pos + len, u.turn_index, u.channel, kind});
    text += piece;
    pos += len;
  };
  for (const auto& u : d.utterances) {
    append(channel_prefix(u.channel), u, SegmentKind::prefix);
    append(u.text, u, SegmentKind::utterance);
    append("\n", u, SegmentKind::newline);
  }
  return ContextDocument(d.id, std::move(text), std::move(segments));
}

}  // namespace intentscape
