#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "intentscape/corpus.hpp"

namespace intentscape {

struct ExtractionConfig {
  std::string question;
  int top_k = 10;
  bool handle_impossible = true;
};

// One QA answer as reported on the wire. The impossible answer has an empty
// `answer` and start == end == 0. Offsets are code points.
struct QaAnswer {
  std::string answer;
  double score = 0.0;
  long long start = 0;
  long long end = 0;
};

struct QaRequest {
  std::string dialogue_id;
  std::string question;
  std::string context;
  int top_k = 10;
  bool handle_impossible = true;
};

class QaBackend {
 public:
  virtual ~QaBackend() = default;
  virtual std::vector<QaAnswer> answer(const QaRequest& request) = 0;
  // Recorded in run metadata.
  virtual std::string id() const = 0;
};

struct CandidateSpan {
  std::string dialogue_id;
  int rank = 0;
  std::string text;
  double score = 0.0;
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  bool impossible = false;

  friend bool operator==(const CandidateSpan&, const CandidateSpan&) = default;
};

// Top-k candidates for one dialogue, stably sorted by descending score and
// checked against the context. Throws IntegrityError when an answer's
// offsets do not slice back to its text.
std::vector<CandidateSpan> extract_candidates(const ContextDocument& ctx, const ExtractionConfig& cfg,
                                              QaBackend& backend);

struct ExtractionOptions {
  int max_parallel = 4;
  int retries = 2;
};

// Runs extract_candidates over many contexts with bounded parallelism.
// Output order follows `contexts`. TransportError is retried up to
// `retries` times per dialogue before propagating.
std::vector<std::vector<CandidateSpan>> extract_corpus(const std::vector<ContextDocument>& contexts,
                                                       const ExtractionConfig& cfg, QaBackend& backend,
                                                       const ExtractionOptions& options = {});

// The three prompting questions, verbatim (Q1 keeps "mentionned").
const std::vector<std::string>& default_questions();

// Q1 with the spelling corrected to "mentioned".
const std::string& corrected_q1();

// Candidate file: JSONL of {dialogue_id, rank, text, score, start, end}.
void write_candidates(std::ostream& out, const std::vector<CandidateSpan>& candidates);
std::vector<CandidateSpan> read_candidates(std::istream& in);

}  // namespace intentscape
