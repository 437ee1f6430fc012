#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "intentscape/text.hpp"

namespace intentscape::testing {

using nlohmann::json;

CandidateSpan span_at(const ContextDocument& ctx, const std::string& needle, int rank, std::size_t skip) {
  auto byte = ctx.text().find(needle);
  for (std::size_t i = 0; i < skip; ++i) byte = ctx.text().find(needle, byte + 1);
  const auto start = text::codepoint_length(std::string_view(ctx.text()).substr(0, byte));
  return CandidateSpan{ctx.dialogue_id(), rank, needle, 0.9 - 0.1 * rank, start,
                       start + text::codepoint_length(needle), false};
}

CandidateSpan impossible_span(const std::string& id, int rank) { return CandidateSpan{id, rank, "", 0.1, 0, 0, true}; }

Dialogue make_dialogue(const std::string& id, const std::vector<std::pair<Channel, std::string>>& turns) {
  Dialogue d{id, {}};
  for (std::size_t i = 0; i < turns.size(); ++i)
    d.utterances.push_back({id, static_cast<int>(i), turns[i].first, turns[i].second});
  return d;
}

void FunnelFixture::add(const Dialogue& d,
                        const std::function<std::vector<CandidateSpan>(const ContextDocument&)>& make) {
  const auto ctx = render_context(d);
  contexts.emplace(d.id, ctx);
  candidates.emplace(d.id, make(ctx));
}

FunnelFixture four_dialogue_funnel() {
  FunnelFixture f;
  f.add(make_dialogue("a", {{Channel::customer, "i want to change my seat"}}), [](const ContextDocument& c) {
    return std::vector<CandidateSpan>{span_at(c, "i want to change my seat", 0), impossible_span("a", 1)};
  });
  f.add(make_dialogue("b", {{Channel::customer, "refund"}, {Channel::customer, "seat"}}),
      [](const ContextDocument& c) {
        return std::vector<CandidateSpan>{span_at(c, "refund", 0), span_at(c, "seat", 1)};
      });
  f.add(make_dialogue("c", {{Channel::customer, "hi"}, {Channel::agent, "do you want to upgrade your plan"}}),
      [](const ContextDocument& c) {
        return std::vector<CandidateSpan>{span_at(c, "do you want to upgrade your plan", 0)};
      });
  f.add(make_dialogue("d", {{Channel::agent, "how can i help"}, {Channel::customer, "i need to reset my password"}}),
      [](const ContextDocument& c) {
        return std::vector<CandidateSpan>{span_at(c, "i need to reset my password", 0), span_at(c, "help", 1)};
      });
  return f;
}

FunnelFixture random_funnel_corpus(std::mt19937& rng) {
  static const std::vector<std::string> words{"i",    "want", "need", "refund", "seat",   "hello",
                                              "thanks", "my", "card", "book",   "flight", "the",
                                              "please", "cancel", "bill", "is", "help",   "you"};
  FunnelFixture f;
  const int n = 1 + static_cast<int>(rng() % 25);
  for (int i = 0; i < n; ++i) {
    const std::string id = "r" + std::to_string(i);
    std::vector<std::pair<Channel, std::string>> turns;
    const int t = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < t; ++k) {
      std::string u;
      const int len = 1 + static_cast<int>(rng() % 14);
      for (int w = 0; w < len; ++w) u += (w ? " " : "") + words[rng() % words.size()];
      turns.push_back({(k == 0 || rng() % 2) ? Channel::customer : Channel::agent, u});
    }
    f.add(make_dialogue(id, turns), [&](const ContextDocument& ctx) {
      std::vector<CandidateSpan> out;
      const int k = static_cast<int>(rng() % 5);
      for (int r = 0; r < k; ++r) {
        if (rng() % 12 == 0) {
          out.push_back(impossible_span(id, r));
          continue;
        }
        const std::size_t a = rng() % ctx.length();
        const std::size_t b = a + 1 + rng() % std::min<std::size_t>(40, ctx.length() - a);
        out.push_back(CandidateSpan{id, r, ctx.slice(a, b), 0.5, a, b, false});
      }
      return out;
    });
  }
  return f;
}

std::map<std::string, AppendixDomain> load_appendix(const std::string& path) {
  std::ifstream f(path);
  const json data = json::parse(f);
  std::map<std::string, AppendixDomain> out;
  for (const auto& [domain, body] : data.items()) {
    AppendixDomain d;
    std::map<int, std::string> reps;
    std::vector<MappingOp> ops;
    int id = 0;
    for (const auto& row : body["rows"]) {
      reps[id] = row["top_cluster"].get<std::string>();
      const auto intent = row["intent"].get<std::string>();
      ops.push_back(intent == kOtherIntent ? MappingOp::set_other(id) : MappingOp::rename(id, intent));
      if (intent == kOtherIntent) ++d.other_rows;
      for (int v = 0; v < row["volume"].get<int>(); ++v)
        d.assignments[domain + "-" + std::to_string(id) + "-" + std::to_string(v)] =
            Assignment{id, id, AssignmentSource::clustered, ""};
      ++id;
    }
    d.mapping = apply_mapping_ops(initial_mapping(reps), ops);
    d.scheme = body["scheme"].get<std::set<std::string>>();
    out.emplace(domain, std::move(d));
  }
  return out;
}

namespace {

Vector unit(Vector v) {
  double n = 0;
  for (double x : v) n += x * x;
  for (auto& x : v) x /= std::sqrt(n);
  return v;
}

}  // namespace

std::vector<Vector> random_sphere(std::mt19937& rng, std::size_t n, std::size_t d) {
  std::normal_distribution<double> g;
  std::vector<Vector> out;
  for (std::size_t i = 0; i < n; ++i) {
    Vector v(d);
    for (auto& x : v) x = g(rng);
    out.push_back(unit(v));
  }
  return out;
}

std::vector<Vector> planted_pairs(std::mt19937& rng, std::size_t d, std::size_t pairs, std::size_t noise,
                                  double spread) {
  std::normal_distribution<double> g;
  std::vector<Vector> out;
  for (const auto& anchor : random_sphere(rng, pairs, d)) {
    for (int k = 0; k < 2; ++k) {
      Vector v = anchor;
      for (auto& x : v) x += spread * g(rng);
      out.push_back(unit(v));
    }
  }
  for (auto& v : random_sphere(rng, noise, d)) out.push_back(v);
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

}  // namespace intentscape::testing
