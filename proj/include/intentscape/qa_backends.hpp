#pragma once

#include <map>
#include <string>
#include <vector>

#include "intentscape/extraction.hpp"
#include "intentscape/http_client.hpp"

namespace intentscape {

// Extractive QA service speaking the JSON wire protocol:
//   request  {"question", "context", "top_k", "handle_impossible_answer"}
//   response [{"answer", "score", "start", "end"}, ...]
class HttpQaBackend : public QaBackend {
 public:
  explicit HttpQaBackend(const std::string& url);
  std::vector<QaAnswer> answer(const QaRequest& request) override;
  std::string id() const override { return "http:" + url_; }

 private:
  std::string url_;
  Endpoint endpoint_;
};

// Re-emits answers recorded in a candidate file, in rank order.
class ReplayQaBackend : public QaBackend {
 public:
  explicit ReplayQaBackend(const std::vector<CandidateSpan>& candidates, std::string source = "replay");
  std::vector<QaAnswer> answer(const QaRequest& request) override;
  std::string id() const override { return "replay:" + source_; }

 private:
  std::map<std::string, std::vector<QaAnswer>> answers_;
  std::string source_;
};

// Parses a wire-format response body into answers. Answers missing offsets
// are rejected.
std::vector<QaAnswer> parse_qa_response(const nlohmann::json& body);

}  // namespace intentscape
