#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "intentscape/corpus.hpp"
#include "intentscape/embedding.hpp"
#include "intentscape/extraction.hpp"
#include "intentscape/landscape.hpp"
#include "intentscape/mapping.hpp"

namespace intentscape::testing {

// Candidate covering the (skip+1)-th occurrence of `needle` in the context.
CandidateSpan span_at(const ContextDocument& ctx, const std::string& needle, int rank, std::size_t skip = 0);
CandidateSpan impossible_span(const std::string& dialogue_id, int rank);
Dialogue make_dialogue(const std::string& id, const std::vector<std::pair<Channel, std::string>>& turns);

struct FunnelFixture {
  std::map<std::string, std::vector<CandidateSpan>> candidates;
  std::map<std::string, ContextDocument> contexts;

  void add(const Dialogue& d, const std::function<std::vector<CandidateSpan>(const ContextDocument&)>& make);
};

// Four dialogues traced by hand: one with an impossible candidate, one with
// only one-word candidates, one whose span is on the agent side, one clean.
// Survivors per stage: 4, 3, 2, 2, 1.
FunnelFixture four_dialogue_funnel();

// Up to 25 dialogues of random words with random candidate spans, some
// impossible.
FunnelFixture random_funnel_corpus(std::mt19937& rng);

// Appendix mapping tables: each row becomes one top cluster with `volume`
// clustered dialogues.
struct AppendixDomain {
  IntentMapping mapping;
  Assignments assignments;
  std::set<std::string> scheme;
  std::size_t other_rows = 0;
};

std::map<std::string, AppendixDomain> load_appendix(const std::string& path);

// Random unit vectors.
std::vector<Vector> random_sphere(std::mt19937& rng, std::size_t n, std::size_t d);

// `pairs` tight pairs around random directions plus `noise` random points,
// shuffled.
std::vector<Vector> planted_pairs(std::mt19937& rng, std::size_t d, std::size_t pairs, std::size_t noise,
                                  double spread = 0.01);

}  // namespace intentscape::testing
