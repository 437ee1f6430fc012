#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "intentscape/clustering.hpp"
#include "intentscape/embedding_backends.hpp"

namespace intentscape {

struct Endpoints {
  std::string qa;
  std::string tagger;
  std::string embed;
};

struct RunConfig {
  std::string question;             // resolved prompt text
  int question_index = 0;           // into default_questions()
  bool corrected_spelling = false;  // Q1 only
  int top_k = 10;
  bool handle_impossible = true;

  int min_cluster_size = 2;
  std::optional<int> min_samples;
  ClusterSelection selection = ClusterSelection::excess_of_mass;
  double distance_threshold = 0.4;
  double force_cluster_threshold = 0.3;
  double unlabeled_threshold = 0.4;
  int min_support = 10;

  Endpoints endpoints;
  std::string tagger_backend = "baseline";  // baseline | http
  std::string embed_backend = "mock";       // mock | http | file
  std::size_t mock_dim = 32;
  double mock_perturbation = 0.05;
  std::vector<MockEmbeddingBackend::Family> mock_families;

  std::optional<std::string> preset;
  std::string domain;
  std::uint64_t seed = 0;
  int max_parallel = 4;
};

// Builds the effective config. Later layers win: defaults, the preset named
// by `cli` or else by `file`, `file`, backend URL environment variables,
// then `cli`. Both layers are partial JSON objects keyed by RunConfig field
// names. Throws ConfigError on unknown keys or invalid values and warns when
// a threshold leaves its working band.
RunConfig resolve_config(const nlohmann::json& file, const nlohmann::json& cli);

nlohmann::json config_to_json(const RunConfig& c);

// Checks value ranges; returns the warnings emitted.
std::vector<std::string> check_config(const RunConfig& c);

}  // namespace intentscape
