#include "support.hpp"

#include "outlook/lexicon.hpp"
#include "outlook/stats.hpp"
#include "outlook/synthetic.hpp"

#include <doctest.h>

using namespace outlook;

namespace
{

const SentimentLexicon& demo()
{
  static const SentimentLexicon lex = parse_lexicon("# demo\ngut\tpositive\nhappy\t+1\nstark\tpositive\nschlecht\tnegative\nkrise\t-1\n", Language::de);
  return lex;
}

Article article(std::uint64_t id, YearMonth ym, const std::string& body, Language lang = Language::de)
{
  Article a;
  a.id = id;
  a.date = ym.first_day();
  a.language = lang;
  a.body = body;
  return a;
}

}  // namespace

TEST_CASE("normalized difference of hits")
{
  CHECK(lexicon_score("Gut, gut und stark, aber Krise", demo()) == 0.5);
  CHECK(lexicon_score("nichts davon", demo()) == 0.0);
  CHECK(lexicon_score("not happy", demo()) == 1.0);  // no negation handling
  CHECK(lexicon_score("gutes Wetter", demo()) == 0.0);  // whole words only
  CHECK(lexicon_score("SCHLECHT", demo()) == -1.0);
}

TEST_CASE("swapping the term sets negates every score")
{
  const auto world = make_synthetic_world();
  const auto lex = parse_lexicon(synthetic_lexicon_text(), Language::de);
  const auto neg = lex.swapped();
  for (const auto& a : world.articles) {
    const double s = lexicon_score(a.text(), lex);
    CHECK(s >= -1);
    CHECK(s <= 1);
    CHECK(lexicon_score(a.text(), neg) == -s);
  }
}

TEST_CASE("lexicon validation")
{
  CHECK_THROWS_AS(parse_lexicon("gut\tpositive\n", Language::de), Error);
  CHECK_THROWS_AS(parse_lexicon("gut\tpositive\ngut\tnegative\n", Language::de), Error);
  CHECK_THROWS_AS(parse_lexicon("gut\tmaybe\nschlecht\tnegative\n", Language::de), Error);
  CHECK(demo().positive.size() == 3);
  CHECK(demo().negative.size() == 2);
}

TEST_CASE("other languages are skipped and counted")
{
  std::vector<Article> articles{article(1, {2010, 1}, "gut"), article(2, {2010, 1}, "bon", Language::fr)};
  const auto s = lexicon_scores(articles, demo());
  CHECK(s.scored.size() == 1);
  CHECK(s.skipped_language == 1);
}

TEST_CASE("lexicon indicator")
{
  std::vector<Article> neutral{article(1, {2010, 1}, "nichts"), article(2, {2010, 2}, "leer")};
  for (const auto& p : lexicon_indicator(neutral, demo()).points) CHECK(p.value == 0.0);

  std::vector<Article> single{article(1, {2010, 1}, "gut gut krise"), article(2, {2010, 2}, "krise"),
                              article(3, {2010, 3}, "stark")};
  const auto s = lexicon_indicator(single, demo());
  REQUIRE(s.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(s.points[i].value == lexicon_score(single[i].text(), demo()));
}

TEST_CASE("indicator tracks the planted monthly polarity")
{
  SyntheticOptions o;
  o.articles = 2400;
  o.months = 24;
  const auto world = make_synthetic_world(o);
  std::vector<Article> econ;
  for (std::size_t i = 0; i < world.articles.size(); ++i)
    if (world.economic[i]) econ.push_back(world.articles[i]);
  const auto ind = lexicon_indicator(econ, parse_lexicon(synthetic_lexicon_text(), Language::de));
  REQUIRE(ind.size() == 24);
  int agree = 0, strong = 0;
  for (std::size_t t = 0; t < 24; ++t) {
    if (std::abs(world.outlook[t]) < 0.5) continue;
    ++strong;
    agree += (ind.points[t].value > 0) == (world.outlook[t] > 0);
  }
  REQUIRE(strong > 5);
  CHECK(agree == strong);
  CHECK(*pearson(ind.values(), Eigen::Map<const VectorX<double>>(world.outlook.data(), 24)) > 0.8);
}
