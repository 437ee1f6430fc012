#include "intentscape/tagger.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

#include "intentscape/error.hpp"
#include "intentscape/text.hpp"

namespace intentscape {

using nlohmann::json;

std::string_view to_string(PosTag t) {
  switch (t) {
    case PosTag::VERB: return "VERB";
    case PosTag::NOUN: return "NOUN";
    case PosTag::PROPN: return "PROPN";
    case PosTag::AUX: return "AUX";
    case PosTag::PRON: return "PRON";
    case PosTag::OTHER: return "OTHER";
  }
  return "OTHER";
}

PosTag parse_pos_tag(std::string_view s) {
  if (s == "VERB") return PosTag::VERB;
  if (s == "NOUN") return PosTag::NOUN;
  if (s == "PROPN") return PosTag::PROPN;
  if (s == "AUX") return PosTag::AUX;
  if (s == "PRON") return PosTag::PRON;
  return PosTag::OTHER;
}

namespace {

using WordSet = std::unordered_set<std::string_view>;

const WordSet& pronouns() {
  static const WordSet s = {"i",     "you",    "he",     "she",    "it",        "we",       "they",
                            "me",    "him",    "her",    "us",     "them",      "my",       "your",
                            "his",   "its",    "our",    "their",  "mine",      "yours",    "myself",
                            "yourself", "what", "who",   "whom",   "which",     "someone",  "something",
                            "anything", "everything", "nothing", "anyone", "everyone", "u", "ur"};
  return s;
}

const WordSet& auxiliaries() {
  static const WordSet s = {"am",    "is",    "are",   "was",    "were",   "be",     "been",  "being",
                            "do",    "does",  "did",   "can",    "could",  "will",   "would", "shall",
                            "should", "may",  "might", "must",   "'m",     "'re",    "'s",    "'d",
                            "'ll",   "'ve",   "ca",    "wo",     "don't",  "doesn't", "didn't", "can't",
                            "won't", "isn't", "aren't", "wasn't", "weren't", "couldn't", "wouldn't",
                            "shouldn't", "im"};
  return s;
}

// Determiners, prepositions, conjunctions, particles, adverbs, common
// adjectives and interjections.
const WordSet& other_words() {
  static const WordSet s = {
      "a",      "an",     "the",     "this",    "that",    "these",   "those",   "some",    "any",
      "no",     "every",  "each",    "all",     "both",    "either",  "neither", "another", "other",
      "to",     "of",     "in",      "on",      "at",      "for",     "with",    "from",    "by",
      "about",  "into",   "over",    "under",   "up",      "down",    "out",     "off",     "through",
      "between", "after", "before",  "during",  "without", "within",  "per",     "via",     "and",
      "or",     "but",    "if",      "so",      "because", "than",    "then",    "not",     "n't",
      "yes",    "yeah",   "please",  "pls",     "plz",     "hello",   "hi",      "hey",     "thanks",
      "thank",  "ok",     "okay",    "sure",    "very",    "too",     "also",    "just",    "now",
      "today",  "there",  "here",    "how",     "when",    "where",   "why",     "again",   "already",
      "still",  "new",    "old",     "good",    "great",   "fine",    "right",   "wrong",   "more",
      "most",   "much",   "many",    "few",     "first",   "last",    "next",    "same",    "only",
      "well",   "bye",    "goodbye", "welcome", "sorry",   "oh",      "um",      "uh",      "hmm",
      "as",     "whether", "while",   "until",   "since",   "once",    "never",   "always",
      "soon",   "later",  "yet",     "ever",    "even",    "really",  "quite",   "one",     "two",
      "three",  "four",   "five",    "ten",     "high",    "low",     "slow",    "fast",    "big",
      "small",  "whole",  "own",     "such",    "own",     "another"};
  return s;
}

const WordSet& verb_stems() {
  static const WordSet s = {
      "want",     "wanna",    "need",     "purchase", "buy",      "book",     "order",    "check",
      "change",   "cancel",   "get",      "know",     "send",     "pay",      "transfer", "report",
      "update",   "block",    "close",    "open",     "sign",     "reimburse", "view",    "see",
      "set",      "help",     "make",     "find",     "tell",     "give",     "add",      "remove",
      "replace",  "fix",      "upgrade",  "renew",    "apply",    "request",  "submit",   "track",
      "dispute",  "reorder",  "inquire",  "activate", "reset",    "install",  "download", "reserve",
      "switch",   "return",   "refund",   "confirm",  "lose",     "expire",   "break",    "meet",
      "miss",     "keep",     "go",       "work",     "run",      "look",     "call",     "use",
      "receive",  "debit",    "charge",   "travel",   "fly",      "move",     "start",    "stop",
      "ask",      "try",      "come",     "take",     "print",    "email",    "provide",  "verify",
      "login",    "log",      "access",   "connect",  "subscribe", "unsubscribe", "enroll", "register",
      "like",     "love",     "wish",     "hope",     "prefer",   "choose",   "select",   "schedule",
      "file",     "claim",    "drop",     "damage",   "crash",    "freeze",   "block",    "deposit",
      "withdraw", "owe",      "borrow",   "lend",     "save",     "spend",    "sell",     "rent",
      "repair",   "summit",   "face",     "show",     "explain",  "understand", "think",  "let",
      "put",      "bring",    "leave",    "arrive",   "depart",   "board",    "seat",     "reach",
      "contact",  "discuss",  "clear",    "wand",     "reimbursement", "deliver", "locate", "issue",
      "process",  "recover",  "unlock",   "ship",     "redeem"};
  return s;
}

// Irregular or otherwise unstrippable verb forms.
const WordSet& verb_forms() {
  static const WordSet s = {"got",   "gave",  "given", "made",  "sent",  "paid",  "lost",   "broke",
                            "broken", "met",  "went",  "gone",  "kept",  "told",  "found",  "took",
                            "taken", "came",  "bought", "sold", "ran",   "saw",   "seen",   "knew",
                            "known", "flew",  "flown", "left",  "brought", "thought", "put", "set",
                            "wanted", "needed", "ordered", "booked", "checked", "changed", "cancelled",
                            "canceled", "charged", "debited", "expired", "missed", "received"};
  return s;
}

// Words that are nouns after a determiner or possessive ("my order") and
// verbs elsewhere ("order a pizza").
const WordSet& noun_verb_ambiguous() {
  static const WordSet s = {"book",   "order",  "check",  "change", "transfer", "report", "update",
                            "help",   "need",   "set",    "sign",   "pay",      "view",   "return",
                            "request", "block", "claim",  "charge", "travel",   "call",   "use",
                            "file",   "seat",   "board",  "deposit", "work",    "access", "repair",
                            "email",  "look",   "start",  "stop",   "print",    "drop",   "damage",
                            "crash",  "face",   "show",   "reimbursement", "purchase", "refund", "run",
                            "issue",  "process", "ship"};
  return s;
}

const WordSet& determiners() {
  static const WordSet s = {"a",    "an",   "the",   "my",    "your",  "his",   "her",  "its",
                            "our",  "their", "this", "that",  "these", "those", "some", "any",
                            "no",   "every", "each", "new",   "old",   "another", "one", "other"};
  return s;
}

std::string normalize(std::string_view token) {
  auto is_punct = [](char c) {
    return std::ispunct(static_cast<unsigned char>(c)) != 0 && c != '\'' && c != '$';
  };
  while (!token.empty() && is_punct(token.front())) token.remove_prefix(1);
  while (!token.empty() && (is_punct(token.back()) || token.back() == '\'')) token.remove_suffix(1);
  return text::to_lower_ascii(token);
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool is_verb_stem(std::string_view w) { return verb_stems().count(w) != 0; }

// Maps an inflected form onto a known verb stem, if possible.
bool inflected_verb(const std::string& w) {
  if (verb_forms().count(w)) return true;
  auto try_stem = [](std::string stem) {
    if (is_verb_stem(stem)) return true;
    if (is_verb_stem(stem + "e")) return true;
    // Doubled final consonant: "stopped", "running".
    if (stem.size() >= 2 && stem[stem.size() - 1] == stem[stem.size() - 2] &&
        is_verb_stem(stem.substr(0, stem.size() - 1)))
      return true;
    return false;
  };
  if (ends_with(w, "ing") && w.size() > 4 && try_stem(w.substr(0, w.size() - 3))) return true;
  if (ends_with(w, "ied") && w.size() > 4 && is_verb_stem(w.substr(0, w.size() - 3) + "y")) return true;
  if (ends_with(w, "ed") && w.size() > 3 && try_stem(w.substr(0, w.size() - 2))) return true;
  if (ends_with(w, "es") && w.size() > 3 && is_verb_stem(w.substr(0, w.size() - 2))) return true;
  if (ends_with(w, "s") && w.size() > 2 && is_verb_stem(w.substr(0, w.size() - 1))) return true;
  return false;
}

bool has_alpha(std::string_view w) {
  return std::any_of(w.begin(), w.end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; });
}

// Context the ambiguous-word rule looks at.
struct Previous {
  std::string word;
  PosTag tag = PosTag::OTHER;
  bool exists = false;
};

bool verb_context(const Previous& prev) {
  static const WordSet openers = {"to", "please", "pls", "plz", "and", "or", "not", "wanna", "gonna"};
  return !prev.exists || prev.tag == PosTag::PRON || prev.tag == PosTag::AUX || openers.count(prev.word) != 0;
}

PosTag classify(std::string_view surface, const std::string& w, const Previous& prev) {
  const bool first = !prev.exists;
  if (w.empty() || !has_alpha(w)) return PosTag::OTHER;
  if (pronouns().count(w)) return PosTag::PRON;
  if (auxiliaries().count(w)) return PosTag::AUX;

  const auto apostrophe = w.find('\'');
  if (apostrophe != std::string::npos) {
    const std::string head = w.substr(0, apostrophe);
    if (pronouns().count(head)) return PosTag::PRON;
    if (auxiliaries().count(head) || ends_with(w, "n't")) return PosTag::AUX;
  }

  if (w == "have" || w == "has" || w == "had") return PosTag::VERB;

  const bool ambiguous =
      noun_verb_ambiguous().count(w) != 0 ||
      (ends_with(w, "s") && noun_verb_ambiguous().count(std::string_view(w).substr(0, w.size() - 1)) != 0);
  if (ambiguous) {
    if (determiners().count(prev.word)) return PosTag::NOUN;
    return verb_context(prev) ? PosTag::VERB : PosTag::NOUN;
  }

  if (other_words().count(w)) return PosTag::OTHER;
  if (is_verb_stem(w) || inflected_verb(w)) return PosTag::VERB;

  if (!first && std::isupper(static_cast<unsigned char>(surface.front())) != 0) return PosTag::PROPN;

  static constexpr std::array<std::string_view, 9> adjective_suffixes = {"ous", "ful", "ive", "able", "ible",
                                                                         "less", "ish", "ic", "ary"};
  if (ends_with(w, "ly")) return PosTag::OTHER;
  for (auto s : adjective_suffixes)
    if (w.size() > s.size() + 2 && ends_with(w, s)) return PosTag::OTHER;
  if (w.size() > 4 && (ends_with(w, "ing") || ends_with(w, "ize") || ends_with(w, "ise"))) return PosTag::VERB;
  if (w.size() > 3 && ends_with(w, "ed")) return PosTag::VERB;
  return PosTag::NOUN;
}

}  // namespace

std::vector<TaggedToken> BaselineTagger::tag_one(std::string_view span) const {
  std::vector<TaggedToken> out;
  Previous prev;
  for (auto token : text::whitespace_tokens(span)) {
    std::string w = normalize(token);
    const PosTag tag = classify(token, w, prev);
    out.push_back(TaggedToken{std::string(token), tag});
    prev = Previous{std::move(w), tag, true};
  }
  return out;
}

std::vector<std::vector<TaggedToken>> BaselineTagger::tag(const std::vector<std::string>& texts) {
  std::vector<std::vector<TaggedToken>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(tag_one(t));
  return out;
}

HttpTagger::HttpTagger(const std::string& url) : url_(url), endpoint_(parse_endpoint(url)) {}

std::vector<std::vector<TaggedToken>> HttpTagger::tag(const std::vector<std::string>& texts) {
  const json body = post_json(endpoint_, json{{"texts", texts}});
  std::vector<std::vector<TaggedToken>> out;
  try {
    const auto& tags = body.at("tags");
    if (!tags.is_array() || tags.size() != texts.size())
      throw Error("tagger returned " + std::to_string(tags.size()) + " results for " +
                  std::to_string(texts.size()) + " texts");
    for (const auto& tokens : tags) {
      auto& row = out.emplace_back();
      for (const auto& t : tokens)
        row.push_back(TaggedToken{t.at("token").get<std::string>(), parse_pos_tag(t.at("tag").get<std::string>())});
    }
  } catch (const json::exception& e) {
    throw Error(std::string("malformed tagger response: ") + e.what());
  }
  return out;
}

}  // namespace intentscape
