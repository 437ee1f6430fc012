// Acceptance suite: one PASS/FAIL/SKIP line per criterion, each timed
// against its runtime bound. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "e2e.hpp"
#include "fixtures.hpp"
#include "intentscape/artifacts.hpp"
#include "intentscape/clustering.hpp"
#include "intentscape/evaluation.hpp"
#include "intentscape/landscape.hpp"
#include "intentscape/linkage.hpp"
#include "intentscape/mapping.hpp"
#include "intentscape/pipeline.hpp"
#include "intentscape/validation.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace intentscape;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
  Status status = Status::pass;
  std::string detail;
};

// Collects failed expectations; the first few end up in the report line.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (failures_.size() < 3) failures_.push_back(what);
    ++count_;
  }
  Outcome outcome(const std::string& summary) const {
    if (count_ == 0) return {Status::pass, summary};
    std::string d = std::to_string(count_) + " failed check(s):";
    for (const auto& f : failures_) d += " [" + f + "]";
    return {Status::fail, d};
  }

 private:
  std::vector<std::string> failures_;
  std::size_t count_ = 0;
};

struct Criterion {
  std::string name;
  double bound_seconds;
  std::function<Outcome()> run;
};

json read_json(const fs::path& p) { return json::parse(artifacts::read_file(p)); }

Outcome hdbscan_oracle() {
  Check c;
  std::size_t cases = 0;
  auto compare = [&](const std::vector<Vector>& pts, int mcs, const std::string& tag) {
    const DensityParams p{mcs, std::nullopt, ClusterSelection::excess_of_mass};
    const auto got = hdbscan(pts, p);
    const int ms = std::min<int>(p.effective_min_samples(), static_cast<int>(pts.size()));
    c.expect(got.labels == oracle::canonical(oracle::hdbscan(pts, mcs, ms)), tag);
    ++cases;
  };
  std::mt19937 rng(20);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 20 + rng() % 41, d = 2 + rng() % 7;
    compare(testing::random_sphere(rng, n, d), 2, "random " + std::to_string(t));
  }
  for (int t = 0; t < 5; ++t) {
    const std::size_t d = 3 + t, pairs = 4 + 2 * t, noise = 5 + 3 * t;
    compare(testing::planted_pairs(rng, d, pairs, noise), 2, "planted " + std::to_string(t));
  }
  return c.outcome(std::to_string(cases) + " fixtures agree with the reference");
}

Outcome linkage_oracle() {
  Check c;
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::size_t cuts = 0;
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 2 + rng() % 14, d = 2 + rng() % 7;
    const auto centers = testing::random_sphere(rng, n, d);
    const auto got = average_link(centers);
    const auto want = oracle::average_link(centers);
    const std::string tag = "fixture " + std::to_string(t);
    c.expect(got.merges.size() == want.size(), tag + " merge count");
    if (got.merges.size() != want.size()) continue;
    for (std::size_t i = 0; i < want.size(); ++i) {
      const auto& g = got.merges[i];
      const bool same_pair = std::min(g.node_a, g.node_b) == want[i].a && std::max(g.node_a, g.node_b) == want[i].b;
      c.expect(same_pair && std::abs(g.distance - want[i].distance) <= 1e-9, tag + " merge " + std::to_string(i));
    }
    for (int k = 0; k < 100; ++k) {
      const double th = 0.001 + u(rng);
      c.expect(cut_dendrogram(got, th) == oracle::cut(n, want, th), tag + " cut " + std::to_string(th));
      ++cuts;
    }
  }
  return c.outcome("20 fixtures, " + std::to_string(cuts) + " cuts agree with the reference");
}

Outcome funnel_fixtures() {
  Check c;
  BaselineTagger tagger;
  const auto f = testing::four_dialogue_funnel();
  const auto r = run_funnel(f.candidates, f.contexts, tagger).report;
  c.expect(r.initial_dialogues == 4 && r.after_impossible == 3 && r.after_pos == 2 && r.after_sentence == 2 &&
               r.after_channel == 1,
           "stage counts 4,3,2,2,1");
  c.expect(r.percentages() == std::array<double, 4>{75.0, 50.0, 50.0, 25.0}, "percentages 75/50/50/25");
  std::mt19937 rng(22);
  for (int t = 0; t < 50; ++t) {
    const auto rf = testing::random_funnel_corpus(rng);
    const auto rr = run_funnel(rf.candidates, rf.contexts, tagger).report;
    c.expect(rr.initial_dialogues >= rr.after_impossible && rr.after_impossible >= rr.after_pos &&
                 rr.after_pos >= rr.after_sentence && rr.after_sentence >= rr.after_channel,
             "monotone corpus " + std::to_string(t));
  }
  return c.outcome("hand-traced fixture and 50 random corpora");
}

Outcome appendix_arithmetic() {
  Check c;
  const auto domains = testing::load_appendix(INTENTSCAPE_TEST_DATA "/appendix_mappings.json");
  const std::map<std::string, long> expected{
      {"airline", 100}, {"media", 83}, {"insurance", 100}, {"finance", 100}, {"software", 88}};
  c.expect(domains.size() == expected.size(), "five domains");
  double macro = 0;
  for (const auto& [name, d] : domains) {
    const double r = 100 * scheme_recall(d.mapping, d.scheme);
    c.expect(expected.count(name) && std::lround(r) == expected.at(name), name + " recall " + std::to_string(r));
    macro += r / static_cast<double>(domains.size());
  }
  c.expect(std::abs(macro - 94.3) <= 0.2, "macro recall " + std::to_string(macro));
  const auto& airline = domains.at("airline");
  const auto v = estimate_volumes(airline.assignments, airline.mapping);
  std::size_t total = 0;
  for (const auto& [intent, n] : v.volumes) total += n;
  c.expect(v.volumes.count("getboardingpass") && v.volumes.at("getboardingpass") == 117, "getboardingpass 117");
  c.expect(v.volumes.count("getseatinfo") && v.volumes.at("getseatinfo") == 165, "getseatinfo 165");
  c.expect(total == 461, "airline total 461");
  std::ostringstream s;
  s.precision(3);
  s << "macro recall " << macro;
  return c.outcome(s.str());
}

Outcome zero_shot_property() {
  Check c;
  std::mt19937 rng(23);
  std::normal_distribution<double> g;
  const EvalParams p;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t d = 2 + rng() % 6, k = 1 + rng() % 8;
    std::vector<LowLevelCluster> cs;
    for (std::size_t i = 0; i < k; ++i) {
      Vector v(d);
      for (auto& x : v) x = g(rng);
      cs.push_back(LowLevelCluster{static_cast<int>(i), {}, v});
    }
    if (k > 1 && t % 7 == 0) cs[k - 1].center = cs[0].center;
    Vector s(d);
    for (auto& x : s) x = g(rng);
    int want = -1;
    double best = -2;
    for (const auto& cl : cs) {
      const double sim = 1.0 - oracle::cosine_distance(s, cl.center);
      if (sim > best + 1e-12) {
        best = sim;
        want = cl.id;
      }
    }
    const auto got = zero_shot_classify(s, cs, p);
    const std::string tag = "case " + std::to_string(t);
    if (best < p.unlabeled_threshold - 1e-12)
      c.expect(!got.cluster, tag + " unlabeled");
    else if (best > p.unlabeled_threshold + 1e-12)
      c.expect(got.cluster == want && std::abs(got.similarity - best) <= 1e-9, tag + " argmax");

    Vector scaled = s;
    const double a = std::exp(std::uniform_real_distribution<double>(-5.0, 5.0)(rng));
    for (auto& x : scaled) x *= a;
    c.expect(zero_shot_classify(scaled, cs, p).cluster == got.cluster, tag + " rescaled");

    // A span sitting on a center lands on the first center with that direction.
    const auto& pick = cs[rng() % k];
    int first = pick.id;
    for (const auto& cl : cs)
      if (cl.center == pick.center) {
        first = cl.id;
        break;
      }
    const auto on = zero_shot_classify(pick.center, cs, p);
    c.expect(on.cluster == first && std::abs(on.similarity - 1.0) <= 1e-12, tag + " exact center");
  }
  return c.outcome("1000 cases match brute-force argmax, rescaling and exact centers");
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) out[e.path().filename().string()] = artifacts::read_file(e.path());
  return out;
}

Outcome synthetic_end_to_end() {
  Check c;
  const auto a = testing::run_synthetic_pipeline(INTENTSCAPE_CLI, testing::scratch_dir("acceptance-a"));
  if (!a.failed_step.empty())
    return {Status::fail, "step " + a.failed_step + " exited " + std::to_string(a.exit_code) + ", see " +
                              a.log.string()};
  const auto b = testing::run_synthetic_pipeline(INTENTSCAPE_CLI, testing::scratch_dir("acceptance-b"));
  if (!b.failed_step.empty())
    return {Status::fail, "second run: step " + b.failed_step + " exited " + std::to_string(b.exit_code)};
  c.expect(snapshot(a.workdir) == snapshot(b.workdir), "two runs bit-identical");

  std::set<std::string> scheme;
  for (const auto& i : testing::synthetic_intents()) scheme.insert(i.name);
  const auto mapping = mapping_from_json(read_json(a.workdir / pipeline::kMapping));
  const double recall = scheme_recall(mapping, scheme);
  c.expect(recall == 1.0, "scheme recall " + std::to_string(recall));
  const auto landscape = read_json(a.workdir / pipeline::kLandscape);
  std::map<std::string, std::size_t> expected;
  for (const auto& [d, intent] : testing::make_synthetic_corpus(200).intent_of) ++expected[intent];
  auto volumes = landscape["volumes"].get<std::map<std::string, std::size_t>>();
  volumes.erase(std::string(kOtherIntent));
  c.expect(volumes == expected, "volumes equal planted intent counts");
  c.expect(landscape["counts"]["unassigned"] == 0, "no unassigned dialogues");
  const auto report = read_json(a.workdir / pipeline::kReport);
  c.expect(report["rows"].size() == scheme.size(), "one report row per intent");
  for (const auto& row : report["rows"])
    c.expect(row["f1"].get<double>() == 1.0, row["intent"].get<std::string>() + " f1");
  return c.outcome("recall 100%, F1 1.0 and exact volumes for every intent, runs identical");
}

Outcome live_model() {
  const char* qa = std::getenv("INTENTSCAPE_QA_URL");
  const char* corpus = std::getenv("INTENTSCAPE_LIVE_CORPUS");
  if (!qa || !*qa || !corpus || !*corpus)
    return {Status::skip, "set INTENTSCAPE_QA_URL and INTENTSCAPE_LIVE_CORPUS to run"};
  const char* domain = std::getenv("INTENTSCAPE_LIVE_DOMAIN");
  const std::string dom = domain ? domain : "";
  // The 85% bound is not claimed for fast food.
  if (dom == "fastfood") return {Status::skip, "bound does not apply to the fastfood domain"};
  const auto root = testing::scratch_dir("acceptance-live");
  std::vector<std::string> global{"--workdir", (root / "work").string()};
  if (const char* t = std::getenv("INTENTSCAPE_TAGGER_URL"); t && *t) global.insert(global.end(), {"--tagger", "http"});
  if (find_preset(dom)) global.insert(global.end(), {"--preset", dom});
  if (!dom.empty()) global.insert(global.end(), {"--domain", dom});
  const auto log = root / "cli.log";
  for (const std::vector<std::string>& step : {std::vector<std::string>{"ingest", corpus},
                                                std::vector<std::string>{"extract"},
                                                std::vector<std::string>{"validate"}}) {
    auto args = global;
    args.insert(args.end(), step.begin(), step.end());
    if (const int rc = testing::run_cli(INTENTSCAPE_CLI, args, log); rc != 0)
      return {Status::fail, step[0] + " exited " + std::to_string(rc) + ", see " + log.string()};
  }
  const double final_pct = read_json(root / "work" / pipeline::kFunnel)["percentages"][3].get<double>();
  Check c;
  c.expect(final_pct > 85.0, "final funnel percentage " + std::to_string(final_pct) + " <= 85");
  return c.outcome("final funnel percentage " + std::to_string(final_pct));
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"hdbscan-matches-reference", 30.0, hdbscan_oracle},
      {"average-link-matches-reference", 10.0, linkage_oracle},
      {"funnel-fixtures", 5.0, funnel_fixtures},
      {"appendix-arithmetic", 2.0, appendix_arithmetic},
      {"zero-shot-argmax-property", 5.0, zero_shot_property},
      {"synthetic-end-to-end", 60.0, synthetic_end_to_end},
      {"live-model-funnel", 0.0, live_model},
  };
  bool failed = false;
  for (const auto& cr : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {Status::fail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.status == Status::pass && cr.bound_seconds > 0 && secs >= cr.bound_seconds)
      o = {Status::fail, "took " + std::to_string(secs) + " s, bound " + std::to_string(cr.bound_seconds) + " s"};
    const char* label = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "SKIP";
    failed = failed || o.status == Status::fail;
    std::cout << label << ' ' << cr.name << " (" << std::fixed;
    std::cout.precision(2);
    std::cout << secs << " s";
    if (cr.bound_seconds > 0) std::cout << " / " << cr.bound_seconds << " s";
    std::cout << "): " << o.detail << std::endl;
  }
  return failed ? 1 : 0;
}
