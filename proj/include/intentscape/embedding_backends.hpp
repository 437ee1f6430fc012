#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "intentscape/embedding.hpp"
#include "intentscape/http_client.hpp"

namespace intentscape {

// Deterministic stand-in for a sentence encoder. Text is hashed onto the
// unit sphere. Texts containing a family keyword land near that family's
// anchor instead: anchor + perturbation * hash_noise(text).
class MockEmbeddingBackend : public EmbeddingBackend {
 public:
  struct Family {
    std::string keyword;  // matched as a lowercase substring
    std::string name;
  };

  MockEmbeddingBackend(std::size_t dim, std::uint64_t seed, std::vector<Family> families = {},
                       double perturbation = 0.05);

  std::vector<Vector> embed(const std::vector<std::string>& texts, const std::vector<SpanRef>& refs) override;
  std::string id() const override;
  std::size_t batch_size() const override { return 0; }

  Vector embed_one(const std::string& text) const;

 private:
  Vector gaussian(std::uint64_t key) const;

  std::size_t dim_;
  std::uint64_t seed_;
  std::vector<Family> families_;
  double perturbation_;
};

// Embedding service: request {"texts": [...]}, response {"vectors": [[...]]}.
class HttpEmbeddingBackend : public EmbeddingBackend {
 public:
  explicit HttpEmbeddingBackend(const std::string& url);
  std::vector<Vector> embed(const std::vector<std::string>& texts, const std::vector<SpanRef>& refs) override;
  std::string id() const override { return "http:" + url_; }

 private:
  std::string url_;
  Endpoint endpoint_;
};

// Looks vectors up by span ref in a previously written vector file.
class VectorFileBackend : public EmbeddingBackend {
 public:
  VectorFileBackend(const std::vector<EmbeddedSpan>& spans, std::string source);
  std::vector<Vector> embed(const std::vector<std::string>& texts, const std::vector<SpanRef>& refs) override;
  std::string id() const override { return "file:" + source_; }
  std::size_t batch_size() const override { return 0; }

 private:
  std::map<SpanRef, Vector> vectors_;
  std::string source_;
};

}  // namespace intentscape
