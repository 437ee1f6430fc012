#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace intentscape {

using Vector = std::vector<double>;

// Identifies a span across artifacts.
struct SpanRef {
  std::string dialogue_id;
  int rank = 0;

  friend auto operator<=>(const SpanRef&, const SpanRef&) = default;
  friend bool operator==(const SpanRef&, const SpanRef&) = default;
};

std::string to_string(const SpanRef& ref);

// Vectors are stored at single precision (every component is exactly
// representable as a float) so that vector files round-trip bit-for-bit.
struct EmbeddedSpan {
  SpanRef ref;
  Vector vector;
  bool norm_flag = true;
};

struct Projection2D {
  SpanRef ref;
  double x = 0.0;
  double y = 0.0;
};

class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  virtual std::vector<Vector> embed(const std::vector<std::string>& texts, const std::vector<SpanRef>& refs) = 0;
  virtual std::string id() const = 0;
  // Requests per call; 0 sends everything at once.
  virtual std::size_t batch_size() const { return 64; }
};

struct EmbedInput {
  SpanRef ref;
  std::string text;
};

// One unit-normalized vector per input, in input order. Throws ConfigError
// if dimensions disagree and DomainError on a zero vector.
std::vector<EmbeddedSpan> embed_spans(const std::vector<EmbedInput>& spans, EmbeddingBackend& backend);

double norm(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);

// 1 - cos(a, b), clamped to [0, 2]. Throws DomainError on a zero vector.
double cosine_distance(std::span<const double> a, std::span<const double> b);
double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Unit-normalized copy rounded to single precision.
Vector normalize_to_float(std::span<const double> v);

struct ProjectionResult {
  std::vector<std::pair<double, double>> coordinates;
  bool degenerate = false;  // all points identical; coordinates are zero
};

// Mean-centered top-2 principal components. Each component's
// largest-magnitude loading is made positive. Requires >= 2 vectors.
ProjectionResult project_2d(const std::vector<Vector>& vectors);

std::vector<Projection2D> project_spans(const std::vector<EmbeddedSpan>& spans);

// Vector file: "ILEM", u32 count, u32 dim, then little-endian float32
// row-major. The refs sidecar is JSONL of {dialogue_id, rank} in row order.
void write_vectors(std::ostream& bin, std::ostream& refs, const std::vector<EmbeddedSpan>& spans);
std::vector<EmbeddedSpan> read_vectors(std::istream& bin, std::istream& refs);

// Coordinates file: JSONL of {dialogue_id, rank, x, y}.
void write_coordinates(std::ostream& out, const std::vector<Projection2D>& points);
std::vector<Projection2D> read_coordinates(std::istream& in);

}  // namespace intentscape
