#include "intentscape/config.hpp"

#include <cstdlib>
#include <set>

#include <spdlog/spdlog.h>

#include "intentscape/error.hpp"
#include "intentscape/extraction.hpp"

namespace intentscape {

using nlohmann::json;

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "question",          "question_index",   "corrected_spelling", "top_k",
      "handle_impossible", "min_cluster_size", "min_samples",        "selection",
      "distance_threshold", "force_cluster_threshold", "unlabeled_threshold", "min_support",
      "endpoints",         "tagger_backend",   "embed_backend",      "mock_dim",
      "mock_perturbation", "mock_families",    "preset",             "domain",
      "seed",              "max_parallel"};
  return keys;
}

template <class T>
void take(const json& layer, const char* key, T& out) {
  if (!layer.contains(key) || layer.at(key).is_null()) return;
  try {
    out = layer.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void apply_layer(RunConfig& c, const json& layer, bool& question_set) {
  if (layer.is_null()) return;
  if (!layer.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : layer.items())
    if (!known_keys().count(key)) throw ConfigError("unknown config key '" + key + "'");

  if (layer.contains("question") && !layer.at("question").is_null()) question_set = true;
  take(layer, "question", c.question);
  if (layer.contains("question_index") || layer.contains("corrected_spelling")) question_set = false;
  take(layer, "question_index", c.question_index);
  take(layer, "corrected_spelling", c.corrected_spelling);
  take(layer, "top_k", c.top_k);
  take(layer, "handle_impossible", c.handle_impossible);
  take(layer, "min_cluster_size", c.min_cluster_size);
  if (layer.contains("min_samples")) {
    if (layer.at("min_samples").is_null()) c.min_samples.reset();
    else c.min_samples = layer.at("min_samples").get<int>();
  }
  if (layer.contains("selection")) {
    auto s = parse_cluster_selection(layer.at("selection").get<std::string>());
    if (!s) throw ConfigError("unknown cluster selection '" + layer.at("selection").get<std::string>() + "'");
    c.selection = *s;
  }
  take(layer, "distance_threshold", c.distance_threshold);
  take(layer, "force_cluster_threshold", c.force_cluster_threshold);
  take(layer, "unlabeled_threshold", c.unlabeled_threshold);
  take(layer, "min_support", c.min_support);
  if (layer.contains("endpoints")) {
    const auto& e = layer.at("endpoints");
    take(e, "qa", c.endpoints.qa);
    take(e, "tagger", c.endpoints.tagger);
    take(e, "embed", c.endpoints.embed);
  }
  take(layer, "tagger_backend", c.tagger_backend);
  take(layer, "embed_backend", c.embed_backend);
  take(layer, "mock_dim", c.mock_dim);
  take(layer, "mock_perturbation", c.mock_perturbation);
  if (layer.contains("mock_families")) {
    c.mock_families.clear();
    for (const auto& f : layer.at("mock_families"))
      c.mock_families.push_back({f.at("keyword").get<std::string>(), f.at("name").get<std::string>()});
  }
  take(layer, "domain", c.domain);
  take(layer, "seed", c.seed);
  take(layer, "max_parallel", c.max_parallel);
}

void apply_preset(RunConfig& c, const std::string& name) {
  auto p = find_preset(name);
  if (!p) throw ConfigError("unknown preset '" + name + "'");
  c.preset = name;
  c.domain = name;
  c.min_cluster_size = p->min_cluster_size;
  c.distance_threshold = p->distance_threshold;
  c.force_cluster_threshold = p->force_cluster_threshold;
}

std::optional<std::string> preset_of(const json& layer) {
  if (layer.is_object() && layer.contains("preset") && !layer.at("preset").is_null())
    return layer.at("preset").get<std::string>();
  return std::nullopt;
}

void apply_env(RunConfig& c) {
  auto env = [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
  };
  if (auto v = env("INTENTSCAPE_QA_URL")) c.endpoints.qa = *v;
  if (auto v = env("INTENTSCAPE_TAGGER_URL")) c.endpoints.tagger = *v;
  if (auto v = env("INTENTSCAPE_EMBED_URL")) c.endpoints.embed = *v;
}

}  // namespace

std::vector<std::string> check_config(const RunConfig& c) {
  if (c.top_k < 1) throw ConfigError("top_k must be at least 1");
  if (c.min_cluster_size < 2) throw ConfigError("min_cluster_size must be at least 2");
  if (c.min_samples && *c.min_samples < 1) throw ConfigError("min_samples must be at least 1");
  if (!(c.distance_threshold > 0 && c.distance_threshold < 2)) throw ConfigError("distance_threshold must be in (0, 2)");
  if (!(c.force_cluster_threshold > 0 && c.force_cluster_threshold < 2))
    throw ConfigError("force_cluster_threshold must be in (0, 2)");
  if (!(c.unlabeled_threshold > 0 && c.unlabeled_threshold < 1))
    throw ConfigError("unlabeled_threshold must be in (0, 1)");
  if (c.min_support < 1) throw ConfigError("min_support must be at least 1");
  if (c.question_index < 0 || c.question_index >= static_cast<int>(default_questions().size()))
    throw ConfigError("question_index out of range");
  if (c.tagger_backend != "baseline" && c.tagger_backend != "http")
    throw ConfigError("tagger_backend must be baseline or http");
  if (c.embed_backend != "mock" && c.embed_backend != "http" && c.embed_backend != "file")
    throw ConfigError("embed_backend must be mock, http or file");
  if (c.mock_dim < 2) throw ConfigError("mock_dim must be at least 2");
  if (c.max_parallel < 1) throw ConfigError("max_parallel must be at least 1");

  std::vector<std::string> warnings;
  if (c.distance_threshold < 0.2 || c.distance_threshold > 0.5)
    warnings.push_back("distance_threshold " + std::to_string(c.distance_threshold) +
                       " is outside the usual 0.2-0.5 band");
  if (c.force_cluster_threshold < 0.2 || c.force_cluster_threshold > 0.3)
    warnings.push_back("force_cluster_threshold " + std::to_string(c.force_cluster_threshold) +
                       " is outside the usual 0.2-0.3 band");
  for (const auto& w : warnings) spdlog::warn("{}", w);
  return warnings;
}

RunConfig resolve_config(const json& file, const json& cli) {
  RunConfig c;
  if (auto p = preset_of(cli)) apply_preset(c, *p);
  else if (auto pf = preset_of(file)) apply_preset(c, *pf);

  bool question_set = false;
  apply_layer(c, file, question_set);
  apply_env(c);
  apply_layer(c, cli, question_set);

  check_config(c);
  if (!question_set) {
    c.question = default_questions().at(static_cast<std::size_t>(c.question_index));
    if (c.question_index == 0 && c.corrected_spelling) c.question = corrected_q1();
  }
  if (c.question.empty()) throw ConfigError("question must not be empty");
  return c;
}

json config_to_json(const RunConfig& c) {
  json families = json::array();
  for (const auto& f : c.mock_families) families.push_back(json{{"keyword", f.keyword}, {"name", f.name}});
  return json{{"question", c.question},
              {"question_index", c.question_index},
              {"corrected_spelling", c.corrected_spelling},
              {"top_k", c.top_k},
              {"handle_impossible", c.handle_impossible},
              {"min_cluster_size", c.min_cluster_size},
              {"min_samples", c.min_samples ? json(*c.min_samples) : json(nullptr)},
              {"selection", to_string(c.selection)},
              {"distance_threshold", c.distance_threshold},
              {"force_cluster_threshold", c.force_cluster_threshold},
              {"unlabeled_threshold", c.unlabeled_threshold},
              {"min_support", c.min_support},
              {"endpoints", {{"qa", c.endpoints.qa}, {"tagger", c.endpoints.tagger}, {"embed", c.endpoints.embed}}},
              {"tagger_backend", c.tagger_backend},
              {"embed_backend", c.embed_backend},
              {"mock_dim", c.mock_dim},
              {"mock_perturbation", c.mock_perturbation},
              {"mock_families", families},
              {"preset", c.preset ? json(*c.preset) : json(nullptr)},
              {"domain", c.domain},
              {"seed", c.seed},
              {"max_parallel", c.max_parallel}};
}

}  // namespace intentscape
