#include "intentscape/qa_backends.hpp"

#include <algorithm>

#include "intentscape/error.hpp"

namespace intentscape {

using nlohmann::json;

std::vector<QaAnswer> parse_qa_response(const json& body) {
  // A single answer may come back as a bare object when top_k == 1.
  const json list = body.is_array() ? body : json::array({body});
  std::vector<QaAnswer> out;
  out.reserve(list.size());
  for (const auto& item : list) {
    if (!item.is_object() || !item.contains("start") || !item.contains("end"))
      throw Error("QA backend answer without start/end offsets");
    try {
      out.push_back(QaAnswer{item.at("answer").get<std::string>(), item.at("score").get<double>(),
                             item.at("start").get<long long>(), item.at("end").get<long long>()});
    } catch (const json::exception& e) {
      throw Error(std::string("malformed QA answer: ") + e.what());
    }
  }
  return out;
}

HttpQaBackend::HttpQaBackend(const std::string& url) : url_(url), endpoint_(parse_endpoint(url)) {}

std::vector<QaAnswer> HttpQaBackend::answer(const QaRequest& request) {
  const json body = {{"question", request.question},
                     {"context", request.context},
                     {"top_k", request.top_k},
                     {"handle_impossible_answer", request.handle_impossible}};
  return parse_qa_response(post_json(endpoint_, body));
}

ReplayQaBackend::ReplayQaBackend(const std::vector<CandidateSpan>& candidates, std::string source)
    : source_(std::move(source)) {
  std::map<std::string, std::vector<const CandidateSpan*>> grouped;
  for (const auto& c : candidates) grouped[c.dialogue_id].push_back(&c);
  for (auto& [id, list] : grouped) {
    std::stable_sort(list.begin(), list.end(),
                     [](const CandidateSpan* a, const CandidateSpan* b) { return a->rank < b->rank; });
    auto& answers = answers_[id];
    for (const auto* c : list)
      answers.push_back(QaAnswer{c->text, c->score, static_cast<long long>(c->char_start),
                                 static_cast<long long>(c->char_end)});
  }
}

std::vector<QaAnswer> ReplayQaBackend::answer(const QaRequest& request) {
  auto it = answers_.find(request.dialogue_id);
  if (it == answers_.end()) throw Error("replay file has no candidates for dialogue " + request.dialogue_id);
  return it->second;
}

}  // namespace intentscape
