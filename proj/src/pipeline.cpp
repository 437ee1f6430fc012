#include "intentscape/pipeline.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "intentscape/clustering.hpp"
#include "intentscape/error.hpp"
#include "intentscape/landscape.hpp"
#include "intentscape/linkage.hpp"
#include "intentscape/mapping.hpp"
#include "intentscape/validation.hpp"

namespace intentscape::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json stage_config(const RunConfig& cfg, json extra = json::object()) {
  json j = config_to_json(cfg);
  for (const auto& [k, v] : extra.items()) j[k] = v;
  return j;
}

json read_json(const Workspace& ws, const char* name) {
  const auto bytes = ws.read_verified(name);
  try {
    return json::parse(bytes);
  } catch (const json::exception& e) {
    throw Error(std::string(name) + ": " + e.what());
  }
}

std::vector<Dialogue> read_dialogues(const Workspace& ws) {
  std::istringstream in(ws.read_verified(kDialogues));
  return parse_corpus(in, CorpusFormat::jsonl);
}

std::vector<ValidatedSpan> read_spans(const Workspace& ws) {
  std::istringstream in(ws.read_verified(kValidSpans));
  return read_valid_spans(in);
}

std::vector<EmbeddedSpan> read_embeddings(const Workspace& ws) {
  std::istringstream bin(ws.read_verified(kEmbeddings));
  std::istringstream refs(ws.read_verified(kEmbeddingRefs));
  return read_vectors(bin, refs);
}

// Backend id recorded by the stage that wrote `artifact`.
std::string backend_of(const Workspace& ws, const char* artifact) {
  auto meta = ws.producer(artifact);
  if (!meta) return "unknown";
  return meta->config.value("backend_id", std::string("unknown"));
}

struct ClusterArtifact {
  LowLevelClustering clustering;
  std::vector<int> top_labels;
  double threshold = 0.0;
  Dendrogram dendrogram;
};

ClusterArtifact read_cluster_artifacts(const Workspace& ws) {
  ClusterArtifact a;
  const auto cj = read_json(ws, kClusters);
  a.clustering.labels = cj.at("labels").get<std::vector<int>>();
  for (const auto& c : cj.at("clusters"))
    a.clustering.clusters.push_back(LowLevelCluster{c.at("id").get<int>(),
                                                    c.at("members").get<std::vector<std::size_t>>(),
                                                    c.at("center").get<Vector>()});
  const auto dj = read_json(ws, kDendrogram);
  a.dendrogram = dendrogram_from_json(dj);
  a.top_labels = dj.at("top_labels").get<std::vector<int>>();
  a.threshold = dj.at("distance_threshold").get<double>();
  if (a.top_labels.size() != a.clustering.clusters.size())
    throw StaleArtifactError("dendrogram.json and clusters.json disagree on the number of clusters");
  return a;
}

std::vector<SpanRef> refs_of(const std::vector<EmbeddedSpan>& spans) {
  std::vector<SpanRef> refs;
  refs.reserve(spans.size());
  for (const auto& s : spans) refs.push_back(s.ref);
  return refs;
}

std::vector<Vector> vectors_of(const std::vector<EmbeddedSpan>& spans) {
  std::vector<Vector> v;
  v.reserve(spans.size());
  for (const auto& s : spans) v.push_back(s.vector);
  return v;
}

std::vector<std::string> texts_for(const std::vector<SpanRef>& refs, const std::vector<ValidatedSpan>& spans) {
  std::map<SpanRef, const std::string*> by_ref;
  for (const auto& s : spans) by_ref[SpanRef{s.candidate.dialogue_id, s.candidate.rank}] = &s.candidate.text;
  std::vector<std::string> out;
  out.reserve(refs.size());
  for (const auto& r : refs) {
    auto it = by_ref.find(r);
    if (it == by_ref.end()) throw StaleArtifactError("embedded span " + to_string(r) + " is not a valid span");
    out.push_back(*it->second);
  }
  return out;
}

}  // namespace

void ingest(const Workspace& ws, const RunConfig& cfg, const fs::path& corpus, CorpusFormat format) {
  std::istringstream in(artifacts::read_file(corpus));
  const auto dialogues = parse_corpus(in, format);
  std::ostringstream out;
  write_corpus_jsonl(out, dialogues);
  ws.write_stage("ingest", stage_config(cfg), {}, {Workspace::external_input(corpus)}, {{kDialogues, out.str()}});
  spdlog::info("ingested {} dialogues", dialogues.size());
}

void extract(const Workspace& ws, const RunConfig& cfg, QaBackend& backend,
             const std::optional<fs::path>& replay_source) {
  const auto dialogues = read_dialogues(ws);
  std::vector<ContextDocument> contexts;
  contexts.reserve(dialogues.size());
  for (const auto& d : dialogues) contexts.push_back(render_context(d));

  const ExtractionConfig ecfg{cfg.question, cfg.top_k, cfg.handle_impossible};
  ExtractionOptions opts;
  opts.max_parallel = cfg.max_parallel;
  const auto per_dialogue = extract_corpus(contexts, ecfg, backend, opts);
  std::vector<CandidateSpan> all;
  for (const auto& c : per_dialogue) all.insert(all.end(), c.begin(), c.end());

  std::ostringstream out;
  write_candidates(out, all);
  std::vector<artifacts::FileHash> external;
  if (replay_source) external.push_back(Workspace::external_input(*replay_source));
  ws.write_stage("extract", stage_config(cfg, {{"backend_id", backend.id()}}), {kDialogues}, external,
                 {{kCandidates, out.str()}});
  spdlog::info("extracted {} candidates with question \"{}\"", all.size(), cfg.question);
}

FunnelReport validate(const Workspace& ws, const RunConfig& cfg, TaggerBackend& tagger) {
  const auto dialogues = read_dialogues(ws);
  std::istringstream cin(ws.read_verified(kCandidates));
  const auto candidates = read_candidates(cin);

  std::map<std::string, std::vector<CandidateSpan>> by_dialogue;
  std::map<std::string, ContextDocument> contexts;
  for (const auto& d : dialogues) {
    by_dialogue[d.id];
    contexts.emplace(d.id, render_context(d));
  }
  for (const auto& c : candidates) {
    auto it = by_dialogue.find(c.dialogue_id);
    if (it == by_dialogue.end())
      throw StaleArtifactError("candidate for unknown dialogue " + c.dialogue_id + "; re-run extract");
    it->second.push_back(c);
  }

  const auto result = run_funnel(by_dialogue, contexts, tagger);

  // The question is the one extraction actually used.
  std::string question = cfg.question;
  if (auto meta = ws.producer(kCandidates)) {
    question = meta->config.value("question", cfg.question);
    if (question != cfg.question)
      spdlog::warn("candidates were extracted with a different question than the current config");
  }
  json funnel = funnel_to_json(result.report);
  funnel["question"] = question;
  funnel["qa_backend"] = backend_of(ws, kCandidates);
  funnel["tagger_backend"] = tagger.id();
  funnel["domain"] = cfg.domain;

  std::ostringstream spans;
  write_valid_spans(spans, result.valid_spans);
  ws.write_stage("validate", stage_config(cfg, {{"backend_id", tagger.id()}}), {kDialogues, kCandidates}, {},
                 {{kValidSpans, spans.str()}, {kFunnel, dump(funnel)}});
  const auto pct = result.report.percentages();
  spdlog::info("funnel: {} dialogues, {:.1f}% / {:.1f}% / {:.1f}% / {:.1f}%", result.report.initial_dialogues,
               pct[0], pct[1], pct[2], pct[3]);
  return result.report;
}

void embed(const Workspace& ws, const RunConfig& cfg, EmbeddingBackend& backend,
           const std::optional<fs::path>& coordinates, const std::vector<fs::path>& external_inputs) {
  const auto spans = read_spans(ws);
  std::vector<EmbedInput> inputs;
  inputs.reserve(spans.size());
  for (const auto& s : spans) inputs.push_back(EmbedInput{{s.candidate.dialogue_id, s.candidate.rank}, s.candidate.text});
  const auto embedded = embed_spans(inputs, backend);

  std::vector<Projection2D> projection;
  std::vector<artifacts::FileHash> external;
  for (const auto& p : external_inputs) external.push_back(Workspace::external_input(p));
  if (coordinates) {
    std::istringstream in(artifacts::read_file(*coordinates));
    std::map<SpanRef, Projection2D> given;
    for (auto& p : read_coordinates(in)) given[p.ref] = p;
    for (const auto& e : embedded) {
      auto it = given.find(e.ref);
      if (it == given.end()) throw ConfigError("coordinates file lacks span " + to_string(e.ref));
      projection.push_back(it->second);
    }
    external.push_back(Workspace::external_input(*coordinates));
  } else if (embedded.size() >= 2) {
    projection = project_spans(embedded);
  } else {
    spdlog::warn("fewer than two spans; projection left empty");
  }

  std::ostringstream bin, refs, proj;
  write_vectors(bin, refs, embedded);
  write_coordinates(proj, projection);
  ws.write_stage("embed", stage_config(cfg, {{"backend_id", backend.id()}}), {kValidSpans}, external,
                 {{kEmbeddings, bin.str()}, {kEmbeddingRefs, refs.str()}, {kProjection, proj.str()}});
  spdlog::info("embedded {} spans with {}", embedded.size(), backend.id());
}

void cluster(const Workspace& ws, const RunConfig& cfg) {
  const auto embedded = read_embeddings(ws);
  const auto vectors = vectors_of(embedded);
  if (vectors.empty()) throw DomainError("no embedded spans to cluster");

  DensityParams params;
  params.min_cluster_size = cfg.min_cluster_size;
  params.min_samples = cfg.min_samples;
  params.selection = cfg.selection;
  const auto clustering = hdbscan(vectors, params);

  std::vector<Vector> centers;
  for (const auto& c : clustering.clusters) centers.push_back(c.center);
  const auto dendrogram = average_link(centers);
  const auto top = cut_dendrogram(dendrogram, cfg.distance_threshold);

  json clusters = json::array();
  for (const auto& c : clustering.clusters)
    clusters.push_back(json{{"id", c.id}, {"members", c.members}, {"center", c.center}});
  const json cj{{"labels", clustering.labels}, {"clusters", clusters}};
  json dj = dendrogram_to_json(dendrogram);
  dj["distance_threshold"] = cfg.distance_threshold;
  dj["top_labels"] = top;

  ws.write_stage("cluster", stage_config(cfg), {kEmbeddings, kEmbeddingRefs}, {},
                 {{kClusters, dump(cj)}, {kDendrogram, dump(dj)}});
  const auto noise = std::count(clustering.labels.begin(), clustering.labels.end(), kNoise);
  const int tops = top.empty() ? 0 : *std::max_element(top.begin(), top.end()) + 1;
  spdlog::info("{} low-level clusters, {} noise points, {} top-level clusters", clustering.clusters.size(), noise,
               tops);
}

void landscape(const Workspace& ws, const RunConfig& cfg) {
  const auto dialogues = read_dialogues(ws);
  const auto spans = read_spans(ws);
  const auto embedded = read_embeddings(ws);
  const auto ca = read_cluster_artifacts(ws);
  const auto refs = refs_of(embedded);
  const auto vectors = vectors_of(embedded);
  if (ca.clustering.labels.size() != refs.size())
    throw StaleArtifactError("clusters.json does not cover the current embeddings");

  std::vector<std::string> ids;
  for (const auto& d : dialogues) ids.push_back(d.id);
  LandscapeResult result;
  result.assignments = attach_dialogues(ids, refs, ca.clustering.labels, ca.top_labels);
  const auto forced = force_assign(result.assignments, refs, vectors, ca.clustering, ca.top_labels,
                                   ForceParams{cfg.force_cluster_threshold});

  const auto reps = top_cluster_representatives(ca.clustering, ca.top_labels, vectors, texts_for(refs, spans));
  const auto initial = initial_mapping(reps);

  const auto counts = count_sources(result.assignments);
  const auto body = dump(landscape_to_json(result));
  ws.write_stage("landscape", stage_config(cfg),
                 {kDialogues, kValidSpans, kEmbeddings, kEmbeddingRefs, kClusters, kDendrogram}, {},
                 {{kAssignments, body}, {kLandscape, body}, {kInitialMapping, serialize_mapping(initial)}});
  spdlog::info("{} clustered, {} forced, {} unassigned; {} top-level clusters await mapping", counts.clustered, forced,
               counts.unassigned, initial.entries.size());
}

void export_review(const Workspace& ws, const RunConfig& cfg) {
  const auto spans = read_spans(ws);
  const auto embedded = read_embeddings(ws);
  const auto ca = read_cluster_artifacts(ws);
  const auto refs = refs_of(embedded);
  const auto texts = texts_for(refs, spans);

  std::vector<Projection2D> projection;
  std::vector<std::string> inputs{kValidSpans, kEmbeddings, kEmbeddingRefs, kClusters, kDendrogram};
  if (ws.exists(kProjection)) {
    std::istringstream in(ws.read_verified(kProjection));
    projection = read_coordinates(in);
    inputs.push_back(kProjection);
  }
  if (projection.size() != refs.size()) {
    spdlog::info("projection missing or incomplete; computing it now");
    projection = refs.size() >= 2 ? project_spans(embedded) : std::vector<Projection2D>{};
    for (std::size_t i = projection.size(); i < refs.size(); ++i) projection.push_back({refs[i], 0.0, 0.0});
  }

  const char* mapping_name = ws.exists(kMapping) ? kMapping : kInitialMapping;
  const auto mapping = mapping_from_json(read_json(ws, mapping_name));
  inputs.push_back(mapping_name);
  if (auto missing = mapping.unmapped(); !missing.empty()) {
    std::string list;
    for (int id : missing) list += " " + std::to_string(id);
    spdlog::warn("unmapped top-level clusters:{}", list);
  }

  json points = json::array();
  for (std::size_t i = 0; i < refs.size(); ++i)
    points.push_back(json{{"dialogue_id", refs[i].dialogue_id},
                          {"rank", refs[i].rank},
                          {"text", texts[i]},
                          {"x", projection[i].x},
                          {"y", projection[i].y},
                          {"low_cluster", ca.clustering.labels[i]}});
  json centers = json::array();
  for (const auto& c : ca.clustering.clusters) {
    double x = 0, y = 0;
    for (auto m : c.members) {
      x += projection[m].x;
      y += projection[m].y;
    }
    const double n = static_cast<double>(c.members.size());
    centers.push_back(json{{"id", c.id}, {"size", c.members.size()}, {"x", x / n}, {"y", y / n},
                           {"top_cluster", ca.top_labels[c.id]}});
  }
  const json out{{"points", points},
                 {"centers", centers},
                 {"dendrogram", dendrogram_to_json(ca.dendrogram)},
                 {"threshold", ca.threshold},
                 {"top_labels", ca.top_labels},
                 {"mapping", mapping_to_json(mapping)}};
  ws.write_stage("export-review", stage_config(cfg), inputs, {}, {{kReviewExport, dump(out)}});
  spdlog::info("exported {} points and {} centers", refs.size(), centers.size());
}

void import_mapping(const Workspace& ws, const RunConfig& cfg, const fs::path& mapping_file) {
  const auto bytes = artifacts::read_file(mapping_file);
  IntentMapping given;
  try {
    given = mapping_from_json(json::parse(bytes));
  } catch (const json::exception& e) {
    throw Error("mapping file: " + std::string(e.what()));
  }
  const auto initial = mapping_from_json(read_json(ws, kInitialMapping));
  const auto replayed = replay_mapping(initial, given.merge_log);

  std::vector<int> dangling;
  for (const auto& [id, e] : given.entries)
    if (!replayed.entries.count(id)) dangling.push_back(id);
  if (!dangling.empty()) {
    std::string list;
    for (int id : dangling) list += " " + std::to_string(id);
    throw MappingError(given.merge_log.size(), "entries name clusters that are not live:" + list);
  }
  for (const auto& [id, e] : replayed.entries) {
    auto it = given.entries.find(id);
    if (it == given.entries.end())
      throw MappingError(given.merge_log.size(), "live cluster " + std::to_string(id) + " has no entry");
    if (it->second.intent != e.intent)
      throw MappingError(given.merge_log.size(),
                         "entry for cluster " + std::to_string(id) + " disagrees with the replayed merge log");
  }

  const auto assignments = landscape_from_json(read_json(ws, kAssignments)).assignments;
  LandscapeResult result{assignments, estimate_volumes(assignments, replayed)};
  ws.write_stage("import-mapping", stage_config(cfg), {kAssignments, kInitialMapping},
                 {Workspace::external_input(mapping_file)},
                 {{kMapping, serialize_mapping(replayed)}, {kLandscape, dump(landscape_to_json(result))}});
  spdlog::info("mapping imported: {} live clusters, {} intents", replayed.entries.size(),
               result.volumes->volumes.size());
}

EvaluationReport evaluate(const Workspace& ws, const RunConfig& cfg, const fs::path& gold_path, CorpusFormat format) {
  const auto mapping_bytes = ws.read_verified(kMapping);
  const auto mapping = mapping_from_json(json::parse(mapping_bytes));
  const auto spans = read_spans(ws);
  const auto embedded = read_embeddings(ws);
  const auto ca = read_cluster_artifacts(ws);

  std::istringstream gin(artifacts::read_file(gold_path));
  const auto gold = load_gold(gin, format);
  const auto alignment = align_gold(spans, gold);

  std::map<SpanRef, const Vector*> vec;
  for (const auto& e : embedded) vec[e.ref] = &e.vector;
  const EvalParams params{cfg.unlabeled_threshold, cfg.min_support};
  std::vector<std::string> gold_intents;
  std::vector<Prediction> predictions;
  for (const auto& p : alignment.pairs) {
    const auto& c = spans[p.span_index].candidate;
    auto it = vec.find(SpanRef{c.dialogue_id, c.rank});
    if (it == vec.end()) throw StaleArtifactError("valid span " + c.dialogue_id + " has no embedding");
    gold_intents.push_back(p.intent);
    predictions.push_back(zero_shot_classify(*it->second, ca.clustering.clusters, params));
  }
  const auto report = classification_report(gold_intents, predictions, ca.top_labels, mapping, params);

  json j = report_to_json(report);
  j["metadata"] = json{{"unlabeled_threshold", params.unlabeled_threshold},
                       {"min_support", params.min_support},
                       {"mapping_sha256", artifacts::sha256_hex(mapping_bytes)},
                       {"qa_backend", backend_of(ws, kCandidates)},
                       {"tagger_backend", backend_of(ws, kValidSpans)},
                       {"embed_backend", backend_of(ws, kEmbeddings)},
                       {"centers", "raw mean"},
                       {"unit", "span"},
                       {"excluded_marker", alignment.excluded_marker},
                       {"excluded_unlabeled", alignment.excluded_unlabeled},
                       {"excluded_missing_dialogue", alignment.excluded_missing_dialogue}};
  ws.write_stage("evaluate", stage_config(cfg),
                 {kMapping, kValidSpans, kEmbeddings, kEmbeddingRefs, kClusters, kDendrogram},
                 {Workspace::external_input(gold_path)}, {{kReport, dump(j)}});
  spdlog::info("evaluated {} spans, {} unlabeled, {} report rows", report.evaluated, report.unlabeled_count,
               report.rows.size());
  return report;
}

}  // namespace intentscape::pipeline
