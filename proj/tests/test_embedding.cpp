#include "support.hpp"

#include "outlook/embedding.hpp"
#include "outlook/exchange.hpp"
#include "outlook/io.hpp"
#include "outlook/pseudo_embedder.hpp"

#include <doctest.h>

#include <cstring>
#include <limits>

using namespace outlook;

namespace
{

EmbeddingStore two_by_four()
{
  EmbeddingMatrix v(2, 4);
  v << 1.0f, -2.5f, 3.25f, 0.1f, 1e-30f, 7.0f, -0.0f, 42.0f;
  return EmbeddingStore({11, 7}, v, false);
}

Article article(std::uint64_t id, outlook::Date d, const std::string& body = "text")
{
  Article a;
  a.id = id;
  a.date = d;
  a.body = body;
  return a;
}

}  // namespace

TEST_CASE("store round-trips bit-exactly")
{
  test::TempDir dir;
  const auto s = two_by_four();
  write_store(s, dir / "s.emb");
  const auto r = read_store(dir / "s.emb");
  CHECK(r.ids() == s.ids());
  CHECK(r.dimension() == 4);
  CHECK(std::memcmp(r.values().data(), s.values().data(), sizeof(float) * 8) == 0);
  CHECK(read_bytes(dir / "s.emb").size() == 28 + 2 * (8 + 16));
}

TEST_CASE("header layout follows the exchange format")
{
  const auto bytes = encode_store(two_by_four());
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "EMB1");
  CHECK(bytes[4] == 1);   // version
  CHECK(bytes[8] == 4);   // dimension
  CHECK(bytes[12] == 2);  // count
  CHECK(bytes[20] == 0);  // not normalized
  for (int i = 21; i < 28; ++i) CHECK(bytes[static_cast<std::size_t>(i)] == 0);
  CHECK(bytes[28] == 11);  // first id
}

TEST_CASE("writing the same store twice yields identical files")
{
  test::TempDir dir;
  write_store(two_by_four(), dir / "a.emb");
  write_store(two_by_four(), dir / "b.emb");
  CHECK(read_bytes(dir / "a.emb") == read_bytes(dir / "b.emb"));
}

TEST_CASE("empty store is a header-only file")
{
  test::TempDir dir;
  write_store(EmbeddingStore({}, EmbeddingMatrix(0, 4), true), dir / "e.emb");
  CHECK(read_bytes(dir / "e.emb").size() == 28);
  const auto r = read_store(dir / "e.emb");
  CHECK(r.size() == 0);
  CHECK(r.dimension() == 4);
}

TEST_CASE("reader rejects corrupt files with offsets")
{
  auto bytes = encode_store(two_by_four());

  auto magic = bytes;
  magic[0] = 'X';
  CHECK_THROWS_AS(decode_store(magic), FormatError);

  auto truncated = bytes;
  truncated.resize(truncated.size() - 3);
  CHECK_THROWS_AS(decode_store(truncated), FormatError);

  auto zero_dim = bytes;
  zero_dim[8] = 0;
  CHECK_THROWS_AS(decode_store(zero_dim), FormatError);

  auto nan = bytes;
  const float q = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(&nan[28 + (8 + 16) + 8 + 4], &q, 4);  // record 1, value 1
  try {
    decode_store(nan);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("non-finite value at record 1") != std::string::npos);
  }

  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_AS(decode_store(trailing), FormatError);
}

TEST_CASE("normalized flag is validated on read")
{
  auto bytes = encode_store(two_by_four());
  bytes[20] = 1;
  CHECK_THROWS_AS(decode_store(bytes), Error);
  const auto unit = normalized(two_by_four());
  CHECK(unit.normalized());
  CHECK_NOTHROW(decode_store(encode_store(unit)));
}

TEST_CASE("csv variant round-trips")
{
  test::TempDir dir;
  write_store_csv(two_by_four(), dir / "s.csv");
  const auto r = read_store_csv(dir / "s.csv");
  CHECK(r.ids() == two_by_four().ids());
  CHECK(r.values() == two_by_four().values());
  CHECK_FALSE(r.normalized());
}

TEST_CASE("l2_normalize")
{
  VectorX<double> v(2);
  v << 3, 4;
  const auto u = l2_normalize(v);
  CHECK(u(0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(u(1) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK((l2_normalize(u) - u).norm() < 1e-15);

  Rng rng(5);
  const VectorX<double> big = test::gaussian(1024, 1, rng);
  const auto n = l2_normalize(big);
  CHECK(std::abs(n.norm() - 1) < 1e-9);
  CHECK(std::abs(n.dot(big) / big.norm() - 1) < 1e-9);
  CHECK_THROWS_WITH_AS(l2_normalize(VectorX<double>::Zero(3)), doctest::Contains("degenerate embedding"), Error);
}

TEST_CASE("dot of unit vectors equals cosine")
{
  Rng rng(9);
  const VectorX<double> a = test::gaussian(64, 1, rng), b = test::gaussian(64, 1, rng);
  const double cosine = a.dot(b) / (a.norm() * b.norm());
  CHECK(std::abs(l2_normalize(a).dot(l2_normalize(b)) - cosine) < 1e-9);
}

TEST_CASE("join is an inner join ordered by date then id")
{
  EmbeddingMatrix v(3, 2);
  v << 1, 0, 0, 1, 1, 1;
  const EmbeddingStore store({5, 3, 99}, v, false);
  std::vector<Article> articles{article(5, test::date(2010, 2, 1)), article(3, test::date(2010, 2, 1)),
                                article(4, test::date(2010, 1, 1))};
  const auto j = join(articles, store);
  REQUIRE(j.size() == 2);
  CHECK(j.articles[0].id == 3);
  CHECK(j.articles[1].id == 5);
  CHECK(j.embeddings(0, 1) == 1.0);
  CHECK(j.unmatched_articles == 1);
  CHECK(j.unmatched_embeddings == 1);

  const auto none = join({article(1, test::date(2010, 1, 1))}, store);
  CHECK(none.size() == 0);
}

TEST_CASE("join of ten thousand pairs matches all")
{
  const std::size_t n = 10000;
  std::vector<std::uint64_t> ids;
  std::vector<Article> articles;
  EmbeddingMatrix v(static_cast<Eigen::Index>(n), 2);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t id = (i * 7919) % n + 1;
    ids.push_back(id);
    v(static_cast<Eigen::Index>(i), 0) = static_cast<float>(id);
    v(static_cast<Eigen::Index>(i), 1) = 0;
    articles.push_back(article(id, test::date(2010, 1 + static_cast<unsigned>(id % 12), 1 + static_cast<unsigned>(id % 28))));
  }
  const auto j = join(articles, EmbeddingStore(ids, v, false));
  REQUIRE(j.size() == n);
  for (std::size_t i = 0; i < n; ++i) CHECK(j.embeddings(static_cast<Eigen::Index>(i), 0) == static_cast<double>(j.articles[i].id));
  for (std::size_t i = 1; i < n; ++i) {
    const auto& a = j.articles[i - 1];
    const auto& b = j.articles[i];
    CHECK((a.date < b.date || (a.date == b.date && a.id < b.id)));
  }
}

TEST_CASE("pseudo embedder is deterministic and unit norm")
{
  const PseudoEmbedder e(32, 3);
  const auto a = e.embed("Zoll Handel Export");
  CHECK(a == e.embed("zoll handel export"));
  CHECK(std::abs(a.norm() - 1) < 1e-12);
  CHECK(a != PseudoEmbedder(32, 4).embed("zoll handel export"));
  CHECK_THROWS_AS(e.embed(" ,. "), Error);
  // Shared vocabulary means higher similarity.
  CHECK(e.embed("zoll handel export").dot(e.embed("zoll handel import")) >
        e.embed("zoll handel export").dot(e.embed("fussball tor spiel")));
}

TEST_CASE("embedding requests round-trip through the exchange file")
{
  test::TempDir dir;
  std::vector<Article> articles{article(1, test::date(2010, 1, 1), "eins"), article(2, test::date(2010, 1, 2), "deux")};
  articles[1].language = Language::fr;
  write_embed_requests(dir / "r.jsonl", embed_requests(articles));
  const auto back = read_embed_requests(dir / "r.jsonl");
  REQUIRE(back.size() == 2);
  CHECK(back[1].article_id == 2);
  CHECK(back[1].text == "deux");
  CHECK(back[1].language == Language::fr);

  articles[0].body.clear();
  CHECK_THROWS_AS(embed_requests(articles), Error);
  write_text(dir / "dup.jsonl", "{\"article_id\":1,\"text\":\"a\"}\n{\"article_id\":1,\"text\":\"b\"}\n");
  CHECK_THROWS_AS(read_embed_requests(dir / "dup.jsonl"), Error);
}
