#include "intentscape/embedding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "intentscape/error.hpp"
#include "intentscape/text.hpp"

namespace intentscape {

using nlohmann::json;

std::string to_string(const SpanRef& ref) { return ref.dialogue_id + "#" + std::to_string(ref.rank); }

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("cosine of vectors with different dimensions");
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) throw DomainError("cosine of a zero vector");
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

double cosine_distance(std::span<const double> a, std::span<const double> b) {
  return 1.0 - cosine_similarity(a, b);
}

Vector normalize_to_float(std::span<const double> v) {
  const double n = norm(v);
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("cannot normalize a zero or non-finite vector");
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<double>(static_cast<float>(v[i] / n));
  return out;
}

std::vector<EmbeddedSpan> embed_spans(const std::vector<EmbedInput>& spans, EmbeddingBackend& backend) {
  std::vector<EmbeddedSpan> out;
  out.reserve(spans.size());
  const std::size_t batch = backend.batch_size() == 0 ? std::max<std::size_t>(spans.size(), 1) : backend.batch_size();
  std::size_t dim = 0;
  for (std::size_t begin = 0; begin < spans.size(); begin += batch) {
    const std::size_t end = std::min(spans.size(), begin + batch);
    std::vector<std::string> texts;
    std::vector<SpanRef> refs;
    for (std::size_t i = begin; i < end; ++i) {
      texts.push_back(spans[i].text);
      refs.push_back(spans[i].ref);
    }
    auto vectors = backend.embed(texts, refs);
    if (vectors.size() != texts.size())
      throw ConfigError("embedding backend returned " + std::to_string(vectors.size()) + " vectors for " +
                        std::to_string(texts.size()) + " texts");
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      if (dim == 0) dim = vectors[i].size();
      if (vectors[i].size() != dim || dim == 0)
        throw ConfigError("embedding dimension mismatch: expected " + std::to_string(dim) + ", got " +
                          std::to_string(vectors[i].size()) + " for " + to_string(refs[i]));
      out.push_back(EmbeddedSpan{refs[i], normalize_to_float(vectors[i]), true});
    }
  }
  return out;
}

ProjectionResult project_2d(const std::vector<Vector>& vectors) {
  if (vectors.size() < 2) throw DomainError("projection needs at least 2 vectors");
  const auto n = static_cast<Eigen::Index>(vectors.size());
  const auto d = static_cast<Eigen::Index>(vectors.front().size());
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(vectors[static_cast<std::size_t>(i)].size()) != d)
      throw DomainError("projection input has mixed dimensions");
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = vectors[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  x.rowwise() -= x.colwise().mean();

  ProjectionResult result;
  result.coordinates.assign(vectors.size(), {0.0, 0.0});
  if (x.cwiseAbs().maxCoeff() == 0.0) {
    spdlog::warn("projection input points are all identical; returning zero coordinates");
    result.degenerate = true;
    return result;
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::MatrixXd& u = svd.matrixU();
  const Eigen::MatrixXd& v = svd.matrixV();
  const Eigen::VectorXd& s = svd.singularValues();
  const Eigen::Index components = std::min<Eigen::Index>(2, s.size());
  for (Eigen::Index c = 0; c < components; ++c) {
    Eigen::Index arg = 0;
    for (Eigen::Index j = 1; j < d; ++j)
      if (std::abs(v(j, c)) > std::abs(v(arg, c))) arg = j;
    const double sign = v(arg, c) < 0.0 ? -1.0 : 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double coord = sign * u(i, c) * s(c);
      auto& p = result.coordinates[static_cast<std::size_t>(i)];
      (c == 0 ? p.first : p.second) = coord;
    }
  }
  return result;
}

std::vector<Projection2D> project_spans(const std::vector<EmbeddedSpan>& spans) {
  std::vector<Vector> vectors;
  vectors.reserve(spans.size());
  for (const auto& s : spans) vectors.push_back(s.vector);
  std::vector<Projection2D> out;
  if (spans.size() < 2) {
    for (const auto& s : spans) out.push_back(Projection2D{s.ref, 0.0, 0.0});
    return out;
  }
  const auto proj = project_2d(vectors);
  for (std::size_t i = 0; i < spans.size(); ++i)
    out.push_back(Projection2D{spans[i].ref, proj.coordinates[i].first, proj.coordinates[i].second});
  return out;
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                         static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  out.write(bytes, 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) throw Error("vector file truncated");
  return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) | (static_cast<std::uint32_t>(bytes[3]) << 24);
}

}  // namespace

void write_vectors(std::ostream& bin, std::ostream& refs, const std::vector<EmbeddedSpan>& spans) {
  const std::size_t dim = spans.empty() ? 0 : spans.front().vector.size();
  bin.write("ILEM", 4);
  put_u32(bin, static_cast<std::uint32_t>(spans.size()));
  put_u32(bin, static_cast<std::uint32_t>(dim));
  for (const auto& s : spans) {
    if (s.vector.size() != dim) throw ConfigError("cannot write vectors of mixed dimension");
    for (double x : s.vector) put_u32(bin, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
    refs << json{{"dialogue_id", s.ref.dialogue_id}, {"rank", s.ref.rank}}.dump() << '\n';
  }
}

std::vector<EmbeddedSpan> read_vectors(std::istream& bin, std::istream& refs) {
  char magic[4];
  if (!bin.read(magic, 4) || std::string(magic, 4) != "ILEM") throw Error("not a vector file (bad magic)");
  const std::uint32_t count = get_u32(bin);
  const std::uint32_t dim = get_u32(bin);
  std::vector<EmbeddedSpan> out(count);
  for (auto& s : out) {
    s.vector.resize(dim);
    for (auto& x : s.vector) x = static_cast<double>(std::bit_cast<float>(get_u32(bin)));
    s.norm_flag = std::abs(norm(s.vector) - 1.0) <= 1e-6;
  }
  std::string line;
  std::size_t row = 0;
  while (std::getline(refs, line)) {
    if (text::trim(line).empty()) continue;
    if (row >= count) throw Error("vector refs file has more rows than the vector file");
    try {
      const json obj = json::parse(line);
      out[row].ref = SpanRef{obj.at("dialogue_id").get<std::string>(), obj.at("rank").get<int>()};
    } catch (const json::exception& e) {
      throw RecordError(row + 1, std::string("bad span ref: ") + e.what());
    }
    ++row;
  }
  if (row != count) throw Error("vector refs file has fewer rows than the vector file");
  return out;
}

void write_coordinates(std::ostream& out, const std::vector<Projection2D>& points) {
  for (const auto& p : points)
    out << json{{"dialogue_id", p.ref.dialogue_id}, {"rank", p.ref.rank}, {"x", p.x}, {"y", p.y}}.dump() << '\n';
}

std::vector<Projection2D> read_coordinates(std::istream& in) {
  std::vector<Projection2D> out;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (text::trim(line).empty()) continue;
    try {
      const json obj = json::parse(line);
      Projection2D p{SpanRef{obj.at("dialogue_id").get<std::string>(), obj.at("rank").get<int>()},
                     obj.at("x").get<double>(), obj.at("y").get<double>()};
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw RecordError(row, "non-finite coordinate");
      out.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw RecordError(row, std::string("bad coordinate row: ") + e.what());
    }
  }
  return out;
}

}  // namespace intentscape
