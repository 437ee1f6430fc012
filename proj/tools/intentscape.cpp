// Command-line driver: one subcommand per pipeline stage.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "intentscape/artifacts.hpp"
#include "intentscape/embedding_backends.hpp"
#include "intentscape/error.hpp"
#include "intentscape/pipeline.hpp"
#include "intentscape/qa_backends.hpp"
#include "intentscape/tagger.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace intentscape;

namespace {

enum Exit { kOk = 0, kFailure = 1, kMissing = 2, kStale = 3, kDangling = 4 };

struct Flags {
  std::string config_file;
  std::string workdir = ".";
  bool force = false;
  bool verbose = false;

  std::optional<std::string> preset, question, selection, domain, qa_url, tagger_url, embed_url, tagger, embedder;
  std::optional<int> question_index, top_k, min_cluster_size, min_samples, min_support, max_parallel;
  std::optional<double> distance_threshold, force_cluster_threshold, unlabeled_threshold;
  std::optional<std::uint64_t> seed;
  bool corrected_spelling = false;
};

template <class T>
void put(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

RunConfig load_config(const Flags& f) {
  json file = json::object();
  if (!f.config_file.empty()) {
    try {
      file = json::parse(artifacts::read_file(f.config_file));
    } catch (const json::exception& e) {
      throw ConfigError("config file: " + std::string(e.what()));
    }
  }
  json cli = json::object();
  put(cli, "preset", f.preset);
  put(cli, "question", f.question);
  put(cli, "question_index", f.question_index);
  if (f.corrected_spelling) cli["corrected_spelling"] = true;
  put(cli, "top_k", f.top_k);
  put(cli, "min_cluster_size", f.min_cluster_size);
  put(cli, "min_samples", f.min_samples);
  put(cli, "selection", f.selection);
  put(cli, "distance_threshold", f.distance_threshold);
  put(cli, "force_cluster_threshold", f.force_cluster_threshold);
  put(cli, "unlabeled_threshold", f.unlabeled_threshold);
  put(cli, "min_support", f.min_support);
  put(cli, "domain", f.domain);
  put(cli, "seed", f.seed);
  put(cli, "max_parallel", f.max_parallel);
  put(cli, "tagger_backend", f.tagger);
  put(cli, "embed_backend", f.embedder);
  json endpoints = json::object();
  put(endpoints, "qa", f.qa_url);
  put(endpoints, "tagger", f.tagger_url);
  put(endpoints, "embed", f.embed_url);
  if (!endpoints.empty()) cli["endpoints"] = endpoints;
  return resolve_config(file, cli);
}

CorpusFormat format_for(const std::string& flag, const fs::path& path) {
  std::string name = flag.empty() ? path.extension().string().substr(path.has_extension() ? 1 : 0) : flag;
  auto f = parse_corpus_format(name);
  if (!f) throw ConfigError("cannot tell the format of " + path.string() + "; pass --format csv|jsonl");
  return *f;
}

std::unique_ptr<TaggerBackend> make_tagger(const RunConfig& cfg) {
  if (cfg.tagger_backend == "http") {
    if (cfg.endpoints.tagger.empty()) throw ConfigError("tagger_backend http needs a tagger endpoint");
    return std::make_unique<HttpTagger>(cfg.endpoints.tagger);
  }
  return std::make_unique<BaselineTagger>();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intent landscape engine: extract, validate, cluster and map intents in dialogue corpora"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags f;
  app.add_option("--config", f.config_file, "JSON config file with RunConfig fields");
  app.add_option("--workdir", f.workdir, "Artifact directory")->capture_default_str();
  app.add_flag("--force", f.force, "Proceed past stale upstream artifacts");
  app.add_flag("-v,--verbose", f.verbose, "Debug logging");
  app.add_option("--preset", f.preset, "Domain preset")
      ->check(CLI::IsMember({"airline", "media", "insurance", "finance", "software"}));
  app.add_option("--seed", f.seed, "Seed for the mock embedder");
  app.add_option("--question", f.question, "Prompt question text");
  app.add_option("--question-index", f.question_index, "Built-in question 0, 1 or 2");
  app.add_flag("--corrected-spelling", f.corrected_spelling, "Use the corrected spelling of question 0");
  app.add_option("--top-k", f.top_k, "Candidate spans kept per dialogue");
  app.add_option("--min-cluster-size", f.min_cluster_size, "HDBSCAN minimum cluster size");
  app.add_option("--min-samples", f.min_samples, "HDBSCAN core neighbourhood (default: min cluster size)");
  app.add_option("--selection", f.selection, "excess_of_mass or leaf");
  app.add_option("--distance-threshold", f.distance_threshold, "Cosine distance cut for top-level clusters");
  app.add_option("--force-cluster-threshold", f.force_cluster_threshold,
                 "Cosine distance under which noise dialogues join the nearest cluster");
  app.add_option("--unlabeled-threshold", f.unlabeled_threshold, "Similarity below which a span stays unlabeled");
  app.add_option("--min-support", f.min_support, "Intents need more gold spans than this to be reported");
  app.add_option("--domain", f.domain, "Domain name recorded in outputs");
  app.add_option("--max-parallel", f.max_parallel, "Concurrent backend requests");
  app.add_option("--qa-url", f.qa_url, "Extractive QA service URL");
  app.add_option("--tagger-url", f.tagger_url, "POS tagger service URL");
  app.add_option("--embed-url", f.embed_url, "Sentence embedding service URL");
  app.add_option("--tagger", f.tagger, "baseline or http");
  app.add_option("--embedder", f.embedder, "mock, http or file");

  std::string corpus, corpus_format;
  auto* ingest = app.add_subcommand("ingest", "Load a dialogue corpus (CSV or JSONL)");
  ingest->add_option("corpus", corpus)->required();
  ingest->add_option("--format", corpus_format, "csv or jsonl (default: from extension)");

  std::string replay;
  auto* extract = app.add_subcommand("extract", "Run extractive QA over every dialogue");
  extract->add_option("--replay", replay, "Candidate file to replay instead of calling a QA service");

  auto* validate = app.add_subcommand("validate", "Filter candidates through the validation funnel");

  std::string vectors, vector_refs, coords;
  auto* embed = app.add_subcommand("embed", "Embed valid spans and project them to 2D");
  embed->add_option("--vectors", vectors, "Vector file for the file embedder");
  embed->add_option("--vector-refs", vector_refs, "Refs sidecar of --vectors");
  embed->add_option("--coords", coords, "Precomputed 2D coordinates (JSONL)");

  auto* cluster = app.add_subcommand("cluster", "HDBSCAN low-level clusters and average-link taxonomy");
  auto* landscape = app.add_subcommand("landscape", "Attach dialogues to clusters");
  auto* export_review = app.add_subcommand("export-review", "Write review_export.json");

  std::string mapping;
  auto* import_mapping = app.add_subcommand("import-mapping", "Apply an analyst mapping and compute volumes");
  import_mapping->add_option("mapping", mapping)->required();

  std::string gold, gold_format;
  auto* evaluate = app.add_subcommand("evaluate", "Score zero-shot classification against gold labels");
  evaluate->add_option("gold", gold)->required();
  evaluate->add_option("--format", gold_format, "csv or jsonl (default: from extension)");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(f.verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    const auto cfg = load_config(f);
    const pipeline::Workspace ws(f.workdir, f.force);
    fs::create_directories(f.workdir);

    if (ingest->parsed()) {
      pipeline::ingest(ws, cfg, corpus, format_for(corpus_format, corpus));
    } else if (extract->parsed()) {
      if (!replay.empty()) {
        std::istringstream in(artifacts::read_file(replay));
        ReplayQaBackend backend(read_candidates(in), fs::path(replay).filename().string());
        pipeline::extract(ws, cfg, backend, fs::path(replay));
      } else {
        if (cfg.endpoints.qa.empty()) throw ConfigError("extract needs --qa-url, INTENTSCAPE_QA_URL or --replay");
        HttpQaBackend backend(cfg.endpoints.qa);
        pipeline::extract(ws, cfg, backend);
      }
    } else if (validate->parsed()) {
      auto tagger = make_tagger(cfg);
      pipeline::validate(ws, cfg, *tagger);
    } else if (embed->parsed()) {
      std::optional<fs::path> coord_path;
      if (!coords.empty()) coord_path = coords;
      if (cfg.embed_backend == "file") {
        if (vectors.empty() || vector_refs.empty()) throw ConfigError("the file embedder needs --vectors and --vector-refs");
        std::istringstream bin(artifacts::read_file(vectors)), refs(artifacts::read_file(vector_refs));
        VectorFileBackend backend(read_vectors(bin, refs), fs::path(vectors).filename().string());
        pipeline::embed(ws, cfg, backend, coord_path, {vectors, vector_refs});
      } else if (cfg.embed_backend == "http") {
        if (cfg.endpoints.embed.empty()) throw ConfigError("embed_backend http needs an embed endpoint");
        HttpEmbeddingBackend backend(cfg.endpoints.embed);
        pipeline::embed(ws, cfg, backend, coord_path);
      } else {
        MockEmbeddingBackend backend(cfg.mock_dim, cfg.seed, cfg.mock_families, cfg.mock_perturbation);
        pipeline::embed(ws, cfg, backend, coord_path);
      }
    } else if (cluster->parsed()) {
      pipeline::cluster(ws, cfg);
    } else if (landscape->parsed()) {
      pipeline::landscape(ws, cfg);
    } else if (export_review->parsed()) {
      pipeline::export_review(ws, cfg);
    } else if (import_mapping->parsed()) {
      pipeline::import_mapping(ws, cfg, mapping);
    } else if (evaluate->parsed()) {
      const auto report = pipeline::evaluate(ws, cfg, gold, format_for(gold_format, gold));
      for (const auto& row : report.rows)
        std::cout << row.intent << "\tP " << row.precision << "\tR " << row.recall << "\tF1 " << row.f1
                  << "\tsupport " << row.support << "\n";
    }
  } catch (const MissingArtifactError& e) {
    spdlog::error("{}", e.what());
    return kMissing;
  } catch (const StaleArtifactError& e) {
    spdlog::error("{}", e.what());
    return kStale;
  } catch (const MappingError& e) {
    spdlog::error("{}", e.what());
    return kDangling;
  } catch (const UnmappedClusterError& e) {
    spdlog::error("{}", e.what());
    return kDangling;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kFailure;
  }
  return kOk;
}
