#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "intentscape/http_client.hpp"

namespace intentscape {

enum class PosTag { VERB, NOUN, PROPN, AUX, PRON, OTHER };

std::string_view to_string(PosTag t);
// Unknown tag names map to OTHER.
PosTag parse_pos_tag(std::string_view s);

struct TaggedToken {
  std::string surface;
  PosTag tag = PosTag::OTHER;
};

class TaggerBackend {
 public:
  virtual ~TaggerBackend() = default;
  // One token list per input text.
  virtual std::vector<std::vector<TaggedToken>> tag(const std::vector<std::string>& texts) = 0;
  virtual std::string id() const = 0;
};

// Deterministic coarse tagger: closed-class lexicon, a customer-service verb
// and noun wordlist, and suffix heuristics. Tokens are whitespace-split.
class BaselineTagger : public TaggerBackend {
 public:
  std::vector<std::vector<TaggedToken>> tag(const std::vector<std::string>& texts) override;
  std::string id() const override { return "baseline"; }

  std::vector<TaggedToken> tag_one(std::string_view text) const;
};

// Tagger service: request {"texts": [...]}, response
// {"tags": [[{"token", "tag"}, ...], ...]}.
class HttpTagger : public TaggerBackend {
 public:
  explicit HttpTagger(const std::string& url);
  std::vector<std::vector<TaggedToken>> tag(const std::vector<std::string>& texts) override;
  std::string id() const override { return "http:" + url_; }

 private:
  std::string url_;
  Endpoint endpoint_;
};

}  // namespace intentscape
