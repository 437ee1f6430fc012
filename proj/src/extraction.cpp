#include "intentscape/extraction.hpp"

#include <algorithm>
#include <future>
#include <istream>
#include <ostream>
#include <semaphore>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "intentscape/error.hpp"
#include "intentscape/text.hpp"

namespace intentscape {

using nlohmann::json;

std::vector<CandidateSpan> extract_candidates(const ContextDocument& ctx, const ExtractionConfig& cfg,
                                              QaBackend& backend) {
  if (cfg.question.empty()) throw ConfigError("extraction question is empty");
  if (cfg.top_k < 1) throw ConfigError("top_k must be >= 1");

  QaRequest req{ctx.dialogue_id(), cfg.question, ctx.text(), cfg.top_k, cfg.handle_impossible};
  std::vector<QaAnswer> answers = backend.answer(req);

  // Ties keep backend order.
  std::stable_sort(answers.begin(), answers.end(),
                   [](const QaAnswer& a, const QaAnswer& b) { return a.score > b.score; });
  if (answers.size() > static_cast<std::size_t>(cfg.top_k)) answers.resize(static_cast<std::size_t>(cfg.top_k));

  std::vector<CandidateSpan> out;
  out.reserve(answers.size());
  for (std::size_t i = 0; i < answers.size(); ++i) {
    const auto& a = answers[i];
    const int rank = static_cast<int>(i);
    CandidateSpan c;
    c.dialogue_id = ctx.dialogue_id();
    c.rank = rank;
    c.score = std::clamp(a.score, 0.0, 1.0);
    if (a.answer.empty()) {
      if (a.start != a.end)
        throw IntegrityError(ctx.dialogue_id(), rank, "empty answer with non-empty offset range");
      c.impossible = true;
      c.char_start = c.char_end = 0;
    } else {
      if (a.start < 0 || a.end <= a.start || static_cast<std::size_t>(a.end) > ctx.length())
        throw IntegrityError(ctx.dialogue_id(), rank,
                             "offsets [" + std::to_string(a.start) + ", " + std::to_string(a.end) +
                                 ") outside context");
      c.char_start = static_cast<std::size_t>(a.start);
      c.char_end = static_cast<std::size_t>(a.end);
      if (ctx.slice(c.char_start, c.char_end) != a.answer)
        throw IntegrityError(ctx.dialogue_id(), rank, "answer text does not match context at its offsets");
      c.text = a.answer;
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<std::vector<CandidateSpan>> extract_corpus(const std::vector<ContextDocument>& contexts,
                                                       const ExtractionConfig& cfg, QaBackend& backend,
                                                       const ExtractionOptions& options) {
  const int parallel = std::max(1, options.max_parallel);
  std::counting_semaphore<> slots(parallel);
  std::vector<std::future<std::vector<CandidateSpan>>> futures;
  futures.reserve(contexts.size());

  for (const auto& ctx : contexts) {
    slots.acquire();
    futures.push_back(std::async(std::launch::async, [&, ctxp = &ctx] {
      struct Release {
        std::counting_semaphore<>& s;
        ~Release() { s.release(); }
      } release{slots};
      for (int attempt = 0;; ++attempt) {
        try {
          return extract_candidates(*ctxp, cfg, backend);
        } catch (const TransportError& e) {
          if (attempt >= options.retries) throw;
          spdlog::warn("extraction for {} failed (attempt {}): {}", ctxp->dialogue_id(), attempt + 1, e.what());
        }
      }
    }));
  }

  std::vector<std::vector<CandidateSpan>> results;
  results.reserve(futures.size());
  for (auto& f : futures) results.push_back(f.get());
  return results;
}

const std::vector<std::string>& default_questions() {
  static const std::vector<std::string> questions = {
      "What is the main reason of the call mentionned by the customer?",
      "What can the agent help the customer with?",
      "What is the customer's first intent?",
  };
  return questions;
}

const std::string& corrected_q1() {
  static const std::string q = "What is the main reason of the call mentioned by the customer?";
  return q;
}

void write_candidates(std::ostream& out, const std::vector<CandidateSpan>& candidates) {
  for (const auto& c : candidates) {
    json row = {{"dialogue_id", c.dialogue_id}, {"rank", c.rank},           {"text", c.text},
                {"score", c.score},             {"start", c.char_start},    {"end", c.char_end}};
    out << row.dump() << '\n';
  }
}

std::vector<CandidateSpan> read_candidates(std::istream& in) {
  std::vector<CandidateSpan> out;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (text::trim(line).empty()) continue;
    try {
      const json obj = json::parse(line);
      CandidateSpan c;
      c.dialogue_id = obj.at("dialogue_id").get<std::string>();
      c.rank = obj.at("rank").get<int>();
      c.text = obj.at("text").get<std::string>();
      c.score = obj.at("score").get<double>();
      c.char_start = obj.at("start").get<std::size_t>();
      c.char_end = obj.at("end").get<std::size_t>();
      c.impossible = c.text.empty() && c.char_start == c.char_end;
      out.push_back(std::move(c));
    } catch (const json::exception& e) {
      throw RecordError(row, std::string("bad candidate row: ") + e.what());
    }
  }
  return out;
}

}  // namespace intentscape
