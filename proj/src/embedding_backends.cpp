#include "intentscape/embedding_backends.hpp"

#include <random>

#include "intentscape/error.hpp"
#include "intentscape/text.hpp"

namespace intentscape {

using nlohmann::json;

MockEmbeddingBackend::MockEmbeddingBackend(std::size_t dim, std::uint64_t seed, std::vector<Family> families,
                                           double perturbation)
    : dim_(dim), seed_(seed), families_(std::move(families)), perturbation_(perturbation) {
  if (dim_ == 0) throw ConfigError("mock embedding dimension must be positive");
  for (auto& f : families_) f.keyword = text::to_lower_ascii(f.keyword);
}

std::string MockEmbeddingBackend::id() const {
  return "mock:dim=" + std::to_string(dim_) + ",seed=" + std::to_string(seed_) +
         ",families=" + std::to_string(families_.size());
}

Vector MockEmbeddingBackend::gaussian(std::uint64_t key) const {
  std::mt19937_64 rng(key ^ (seed_ * 0x9E3779B97F4A7C15ULL));
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(dim_);
  for (auto& x : v) x = normal(rng);
  return v;
}

Vector MockEmbeddingBackend::embed_one(const std::string& input) const {
  const std::string lower = text::to_lower_ascii(input);
  for (const auto& f : families_) {
    if (lower.find(f.keyword) == std::string::npos) continue;
    Vector anchor = gaussian(text::fnv1a64("family:" + f.name));
    const double anchor_norm = norm(anchor);
    const Vector noise = gaussian(text::fnv1a64("text:" + input));
    const double noise_norm = norm(noise);
    for (std::size_t i = 0; i < dim_; ++i)
      anchor[i] = anchor[i] / anchor_norm + perturbation_ * noise[i] / noise_norm;
    return anchor;
  }
  return gaussian(text::fnv1a64("text:" + input));
}

std::vector<Vector> MockEmbeddingBackend::embed(const std::vector<std::string>& texts, const std::vector<SpanRef>&) {
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_one(t));
  return out;
}

HttpEmbeddingBackend::HttpEmbeddingBackend(const std::string& url) : url_(url), endpoint_(parse_endpoint(url)) {}

std::vector<Vector> HttpEmbeddingBackend::embed(const std::vector<std::string>& texts, const std::vector<SpanRef>&) {
  const json body = post_json(endpoint_, json{{"texts", texts}});
  try {
    return body.at("vectors").get<std::vector<Vector>>();
  } catch (const json::exception& e) {
    throw Error(std::string("malformed embedding response: ") + e.what());
  }
}

VectorFileBackend::VectorFileBackend(const std::vector<EmbeddedSpan>& spans, std::string source)
    : source_(std::move(source)) {
  for (const auto& s : spans) vectors_[s.ref] = s.vector;
}

std::vector<Vector> VectorFileBackend::embed(const std::vector<std::string>& texts, const std::vector<SpanRef>& refs) {
  std::vector<Vector> out;
  out.reserve(texts.size());
  std::string missing;
  for (const auto& r : refs) {
    auto it = vectors_.find(r);
    if (it == vectors_.end()) {
      missing += " " + to_string(r);
      continue;
    }
    out.push_back(it->second);
  }
  if (!missing.empty()) throw ConfigError("vector file " + source_ + " has no vectors for:" + missing);
  return out;
}

}  // namespace intentscape
