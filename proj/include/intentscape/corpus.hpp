#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace intentscape {

enum class Channel { customer, agent };

std::string_view to_string(Channel c);
std::optional<Channel> parse_channel(std::string_view s);

struct Utterance {
  std::string dialogue_id;
  int turn_index = 0;
  Channel channel = Channel::customer;
  std::string text;
};

// Utterances are sorted by turn_index, contiguous from 0, and at least one
// is on the customer channel.
struct Dialogue {
  std::string id;
  std::vector<Utterance> utterances;
};

enum class SegmentKind { prefix, utterance, newline };

// Half-open range [char_start, char_end) in code points.
struct Segment {
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  int turn_index = 0;
  Channel channel = Channel::customer;
  SegmentKind kind = SegmentKind::prefix;
};

// QA context rendered from a dialogue: "<channel>: <utterance>\n" per turn.
// Offsets throughout are Unicode scalar values, not bytes.
class ContextDocument {
 public:
  ContextDocument() = default;
  ContextDocument(std::string dialogue_id, std::string text, std::vector<Segment> segments);

  const std::string& dialogue_id() const { return dialogue_id_; }
  const std::string& text() const { return text_; }
  const std::vector<Segment>& segments() const { return segments_; }

  // Length in code points.
  std::size_t length() const { return byte_offsets_.size() - 1; }

  // UTF-8 substring for the code point range [start, end). Throws
  // std::out_of_range if the range is invalid.
  std::string slice(std::size_t start, std::size_t end) const;

  // Segment containing the code point at `offset`, if any.
  const Segment* segment_at(std::size_t offset) const;

  // Turn whose utterance segment contains `offset`; nullopt for offsets on a
  // prefix or newline, or past the end.
  std::optional<int> turn_at(std::size_t offset) const;

 private:
  std::string dialogue_id_;
  std::string text_;
  std::vector<Segment> segments_;
  std::vector<std::size_t> byte_offsets_{0};
};

enum class CorpusFormat { jsonl, csv };

std::optional<CorpusFormat> parse_corpus_format(std::string_view s);

// Reads dialogue rows (conversationId, turnNumber, channel, utterance) and
// groups them into dialogues, in order of first appearance. CSV input also
// accepts MultiDoGo's `authorRole` column in place of `channel` and ignores
// unknown columns.
std::vector<Dialogue> parse_corpus(std::istream& source, CorpusFormat format);

// Writes dialogues back as JSONL rows in the ingestion schema.
void write_corpus_jsonl(std::ostream& out, const std::vector<Dialogue>& dialogues);

ContextDocument render_context(const Dialogue& d);

std::string channel_prefix(Channel c);

}  // namespace intentscape
