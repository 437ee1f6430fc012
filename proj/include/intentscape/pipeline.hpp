#pragma once

#include <filesystem>
#include <optional>

#include "intentscape/artifacts.hpp"
#include "intentscape/config.hpp"
#include "intentscape/corpus.hpp"
#include "intentscape/embedding.hpp"
#include "intentscape/evaluation.hpp"
#include "intentscape/extraction.hpp"
#include "intentscape/tagger.hpp"

// Stage functions behind the CLI. Each reads its upstream artifacts from the
// workspace (verifying the hash chain) and writes its own outputs plus
// `<stage>.meta.json`.
namespace intentscape::pipeline {

using artifacts::Workspace;

// Artifact names.
inline constexpr const char* kDialogues = "dialogues.jsonl";
inline constexpr const char* kCandidates = "candidates.jsonl";
inline constexpr const char* kValidSpans = "valid_spans.jsonl";
inline constexpr const char* kFunnel = "funnel.json";
inline constexpr const char* kEmbeddings = "embeddings.bin";
inline constexpr const char* kEmbeddingRefs = "embeddings.refs.jsonl";
inline constexpr const char* kProjection = "projection.jsonl";
inline constexpr const char* kClusters = "clusters.json";
inline constexpr const char* kDendrogram = "dendrogram.json";
inline constexpr const char* kAssignments = "assignments.json";
inline constexpr const char* kLandscape = "landscape.json";
inline constexpr const char* kInitialMapping = "mapping.initial.json";
inline constexpr const char* kMapping = "mapping.json";
inline constexpr const char* kReviewExport = "review_export.json";
inline constexpr const char* kReport = "report.json";

void ingest(const Workspace& ws, const RunConfig& cfg, const std::filesystem::path& corpus, CorpusFormat format);

void extract(const Workspace& ws, const RunConfig& cfg, QaBackend& backend,
             const std::optional<std::filesystem::path>& replay_source = std::nullopt);

FunnelReport validate(const Workspace& ws, const RunConfig& cfg, TaggerBackend& tagger);

void embed(const Workspace& ws, const RunConfig& cfg, EmbeddingBackend& backend,
           const std::optional<std::filesystem::path>& coordinates = std::nullopt,
           const std::vector<std::filesystem::path>& external_inputs = {});

void cluster(const Workspace& ws, const RunConfig& cfg);

void landscape(const Workspace& ws, const RunConfig& cfg);

void export_review(const Workspace& ws, const RunConfig& cfg);

// Replays the file's merge log from the initial taxonomy, writes the
// canonical mapping.json, and recomputes landscape.json with volumes.
// Throws MappingError for dangling ids and UnmappedClusterError when live
// clusters lack an intent.
void import_mapping(const Workspace& ws, const RunConfig& cfg, const std::filesystem::path& mapping_file);

EvaluationReport evaluate(const Workspace& ws, const RunConfig& cfg, const std::filesystem::path& gold,
                          CorpusFormat format);

}  // namespace intentscape::pipeline
