#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "intentscape/embedding.hpp"
#include "intentscape/embedding_backends.hpp"
#include "intentscape/error.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace intentscape;
using nlohmann::json;

namespace {

Vector random_vector(std::mt19937& rng, std::size_t d) {
  std::normal_distribution<double> g;
  Vector v(d);
  for (auto& x : v) x = g(rng);
  return v;
}

class FixedBackend : public EmbeddingBackend {
 public:
  explicit FixedBackend(std::vector<Vector> v) : v_(std::move(v)) {}
  std::vector<Vector> embed(const std::vector<std::string>& texts, const std::vector<SpanRef>&) override {
    std::vector<Vector> out;
    for (std::size_t i = 0; i < texts.size(); ++i) out.push_back(v_[(next_++) % v_.size()]);
    return out;
  }
  std::string id() const override { return "fixed"; }
  std::size_t batch_size() const override { return 2; }

 private:
  std::vector<Vector> v_;
  std::size_t next_ = 0;
};

std::vector<EmbedInput> inputs(std::initializer_list<const char*> texts) {
  std::vector<EmbedInput> out;
  int r = 0;
  for (const char* t : texts) out.push_back({SpanRef{"d", r++}, t});
  return out;
}

}  // namespace

TEST(CosineDistance, Examples) {
  EXPECT_NEAR(cosine_distance(Vector{1, 0}, Vector{1, 0}), 0.0, 1e-12);
  EXPECT_NEAR(cosine_distance(Vector{1, 0}, Vector{0, 1}), 1.0, 1e-12);
  EXPECT_NEAR(cosine_distance(Vector{1, 0}, Vector{-1, 0}), 2.0, 1e-12);
  EXPECT_THROW(cosine_distance(Vector{0, 0}, Vector{1, 0}), DomainError);
  EXPECT_THROW(cosine_distance(Vector{1, 0}, Vector{1, 0, 0}), DomainError);
}

TEST(CosineDistance, Properties) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int i = 0; i < 500; ++i) {
    const auto a = random_vector(rng, 6), b = random_vector(rng, 6);
    const double d = cosine_distance(a, b);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 2.0);
    EXPECT_NEAR(d, cosine_distance(b, a), 1e-15);
    EXPECT_NEAR(cosine_distance(a, a), 0.0, 1e-12);
    EXPECT_NEAR(d, oracle::cosine_distance(a, b), 1e-12);
    Vector sa = a, sb = b;
    const double alpha = scale(rng), beta = scale(rng);
    for (auto& x : sa) x *= alpha;
    for (auto& x : sb) x *= beta;
    EXPECT_NEAR(cosine_distance(sa, sb), d, 1e-12);

    const auto ua = normalize_to_float(a), ub = normalize_to_float(b);
    double sq = 0;
    for (std::size_t k = 0; k < ua.size(); ++k) sq += (ua[k] - ub[k]) * (ua[k] - ub[k]);
    // float rounding leaves the norm within ~1e-7 of one
    EXPECT_NEAR(cosine_distance(ua, ub), sq / 2, 1e-6);
  }
}

TEST(NormalizeToFloat, UnitAndFloatExact) {
  std::mt19937 rng(4);
  for (int i = 0; i < 100; ++i) {
    const auto v = normalize_to_float(random_vector(rng, 16));
    EXPECT_NEAR(norm(v), 1.0, 1e-6);
    for (double x : v) EXPECT_EQ(static_cast<double>(static_cast<float>(x)), x);
  }
  EXPECT_THROW(normalize_to_float(Vector{0, 0}), DomainError);
}

TEST(EmbedSpans, ShapeAndNorm) {
  MockEmbeddingBackend mock(24, 1);
  const auto out = embed_spans(inputs({"a b", "c d", "e f"}), mock);
  ASSERT_EQ(out.size(), 3u);
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_EQ(out[i].vector.size(), 24u);
    EXPECT_NEAR(norm(out[i].vector), 1.0, 1e-6);
    EXPECT_EQ(out[i].ref.rank, static_cast<int>(i));
    EXPECT_TRUE(out[i].norm_flag);
  }
}

TEST(EmbedSpans, DimensionMismatchIsConfigError) {
  FixedBackend b({Vector{1, 0, 0}, Vector{1, 0, 0}, Vector{0, 1}});
  EXPECT_THROW(embed_spans(inputs({"a", "b", "c"}), b), ConfigError);
}

TEST(EmbedSpans, ZeroVectorIsDomainError) {
  FixedBackend b({Vector{0, 0}});
  EXPECT_THROW(embed_spans(inputs({"a"}), b), DomainError);
}

TEST(MockBackend, DeterministicAndFamilyAware) {
  MockEmbeddingBackend a(32, 7, intentscape::testing::synthetic_families(), 0.05);
  MockEmbeddingBackend b(32, 7, intentscape::testing::synthetic_families(), 0.05);
  const auto x = a.embed_one("i need my boarding pass today");
  EXPECT_EQ(x, b.embed_one("i need my boarding pass today"));
  EXPECT_EQ(a.id(), b.id());
  MockEmbeddingBackend other_seed(32, 8, intentscape::testing::synthetic_families(), 0.05);
  EXPECT_NE(x, other_seed.embed_one("i need my boarding pass today"));

  const auto same_family = a.embed_one("please send the boarding pass");
  const auto other_family = a.embed_one("i want a refund");
  EXPECT_LT(cosine_distance(x, same_family), 0.1);
  EXPECT_GT(cosine_distance(x, other_family), 0.5);
  EXPECT_THROW(MockEmbeddingBackend(0, 1), ConfigError);
}

TEST(VectorFile, BitIdenticalRoundTrip) {
  MockEmbeddingBackend mock(16, 2);
  const auto spans = embed_spans(inputs({"one two", "three four", "five six", "seven"}), mock);
  std::stringstream bin, refs;
  write_vectors(bin, refs, spans);
  const std::string bytes = bin.str();
  EXPECT_EQ(bytes.substr(0, 4), "ILEM");
  EXPECT_EQ(bytes.size(), 12u + 4u * 16u * 4u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 4u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 16u);
  const auto back = read_vectors(bin, refs);
  ASSERT_EQ(back.size(), spans.size());
  for (std::size_t i = 0; i < spans.size(); ++i) {
    EXPECT_EQ(back[i].ref, spans[i].ref);
    EXPECT_EQ(std::memcmp(back[i].vector.data(), spans[i].vector.data(), 16 * sizeof(double)), 0);
  }
  std::stringstream bin2, refs2;
  write_vectors(bin2, refs2, back);
  EXPECT_EQ(bin2.str(), bytes);
}

TEST(VectorFile, BadMagicAndMissingRefs) {
  std::stringstream bin("XXXX"), refs;
  EXPECT_THROW(read_vectors(bin, refs), Error);

  MockEmbeddingBackend mock(8, 2);
  const auto spans = embed_spans(inputs({"a b", "c d"}), mock);
  VectorFileBackend file(spans, "vec.bin");
  std::vector<EmbedInput> asked{{SpanRef{"d", 0}, "a b"}, {SpanRef{"zz", 4}, "?"}};
  try {
    embed_spans(asked, file);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("zz"), std::string::npos);
  }
  const auto ok = embed_spans(inputs({"a b", "c d"}), file);
  EXPECT_EQ(ok[1].vector, spans[1].vector);
}

TEST(Projection, MatchesOracleAndEigenvalues) {
  std::mt19937 rng(99);
  oracle::Points pts;
  std::vector<Vector> vecs;
  std::normal_distribution<double> g;
  for (int i = 0; i < 100; ++i) {
    Vector v(8);
    for (std::size_t k = 0; k < 8; ++k) v[k] = g(rng) * (8.0 - static_cast<double>(k));
    pts.push_back(v);
    vecs.push_back(v);
  }
  const auto got = project_2d(vecs);
  EXPECT_FALSE(got.degenerate);
  const auto want = oracle::pca2(pts);
  double var = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_NEAR(got.coordinates[i].first, want[i].first, 1e-8);
    EXPECT_NEAR(got.coordinates[i].second, want[i].second, 1e-8);
    var += got.coordinates[i].first * got.coordinates[i].first + got.coordinates[i].second * got.coordinates[i].second;
  }
  const auto eig = oracle::scatter_eigenvalues(pts);
  EXPECT_NEAR(var, eig[0] + eig[1], 1e-9 * eig[0]);
}

TEST(Projection, CenteredPlanarInputIsRigid) {
  const std::vector<Vector> v{{2, 0}, {-2, 0}, {0, 1}, {0, -1}};
  const auto p = project_2d(v);
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_NEAR(std::hypot(p.coordinates[i].first, p.coordinates[i].second), std::hypot(v[i][0], v[i][1]), 1e-12);
  }
  EXPECT_NEAR(std::abs(p.coordinates[0].first), 2.0, 1e-12);
}

TEST(Projection, DegenerateAndErrors) {
  const auto p = project_2d({Vector{1, 2, 3}, Vector{1, 2, 3}, Vector{1, 2, 3}});
  EXPECT_TRUE(p.degenerate);
  for (const auto& [x, y] : p.coordinates) {
    EXPECT_EQ(x, 0.0);
    EXPECT_EQ(y, 0.0);
  }
  EXPECT_THROW(project_2d({Vector{1, 2}}), DomainError);
}

TEST(Projection, PermutationEquivariant) {
  std::mt19937 rng(12);
  std::vector<Vector> v;
  for (int i = 0; i < 30; ++i) v.push_back(random_vector(rng, 5));
  const auto base = project_2d(v);
  std::vector<std::size_t> perm(v.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Vector> pv;
  for (auto i : perm) pv.push_back(v[i]);
  const auto shuffled = project_2d(pv);
  for (std::size_t j = 0; j < perm.size(); ++j) {
    EXPECT_NEAR(shuffled.coordinates[j].first, base.coordinates[perm[j]].first, 1e-9);
    EXPECT_NEAR(shuffled.coordinates[j].second, base.coordinates[perm[j]].second, 1e-9);
  }
}

TEST(Coordinates, RoundTrip) {
  const std::vector<Projection2D> pts{{SpanRef{"a", 0}, 1.5, -2.25}, {SpanRef{"b", 3}, 0.1, 1e-17}};
  std::stringstream s;
  write_coordinates(s, pts);
  const auto back = read_coordinates(s);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].ref, pts[1].ref);
  EXPECT_EQ(back[0].y, -2.25);
  EXPECT_EQ(back[1].x, 0.1);
  std::stringstream bad(R"({"dialogue_id":"a","rank":0,"x":1})" "\n");
  EXPECT_THROW(read_coordinates(bad), RecordError);
}

TEST(HttpEmbedding, WireProtocol) {
  httplib::Server svr;
  const int port = svr.bind_to_any_port("127.0.0.1");
  json seen;
  svr.Post("/embed", [&](const httplib::Request& req, httplib::Response& res) {
    seen = json::parse(req.body);
    json vecs = json::array();
    for (std::size_t i = 0; i < seen["texts"].size(); ++i) vecs.push_back({3.0, 4.0 + static_cast<double>(i)});
    res.set_content(json{{"vectors", vecs}}.dump(), "application/json");
  });
  std::thread th([&] { svr.listen_after_bind(); });
  svr.wait_until_ready();
  HttpEmbeddingBackend backend("http://127.0.0.1:" + std::to_string(port) + "/embed");
  const auto out = embed_spans(inputs({"x y", "z w"}), backend);
  svr.stop();
  th.join();
  ASSERT_EQ(out.size(), 2u);
  EXPECT_NEAR(out[0].vector[0], 0.6, 1e-7);
  EXPECT_NEAR(out[0].vector[1], 0.8, 1e-7);
  EXPECT_EQ(seen["texts"].back(), "z w");
}
