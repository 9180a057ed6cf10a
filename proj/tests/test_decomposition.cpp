#include "support.hpp"

#include "outlook/decomposition.hpp"
#include "outlook/io.hpp"

#include <doctest.h>

#include <map>

using namespace outlook;

namespace
{

Article text_article(std::uint64_t id, const std::string& body, Language lang = Language::de)
{
  Article a;
  a.id = id;
  a.date = test::date(2012, 1, 1);
  a.language = lang;
  a.body = body;
  return a;
}

std::vector<ScoredArticle> random_scores(std::size_t n, int months, std::uint64_t seed)
{
  Rng rng(seed);
  std::vector<ScoredArticle> out;
  for (std::size_t i = 0; i < n; ++i) {
    const YearMonth ym = YearMonth{2015, 1}.next(static_cast<int>(i % static_cast<std::size_t>(months)));
    out.push_back({i + 1, test::date(ym.year, ym.month, 1 + static_cast<unsigned>(uniform_index(rng, 28))), 0.01 + 0.98 * uniform_real(rng)});
  }
  return out;
}

TopicAssignments random_assignments(const std::vector<ScoredArticle>& scored, Eigen::Index topics, std::uint64_t seed)
{
  Rng rng(seed);
  TopicAssignments a;
  for (Eigen::Index j = 0; j < topics; ++j) a.topics.push_back("t" + std::to_string(j));
  a.weights.resize(static_cast<Eigen::Index>(scored.size()), topics);
  for (std::size_t i = 0; i < scored.size(); ++i) {
    a.article_ids.push_back(scored[i].article_id);
    VectorX<double> p(topics);
    for (Eigen::Index j = 0; j < topics; ++j) p(j) = uniform_real(rng);
    a.weights.row(static_cast<Eigen::Index>(i)) = truncate_topic_probabilities(p / p.sum()).transpose();
  }
  return a;
}

TopicAssignments one_hot(const std::vector<ScoredArticle>& scored, const std::vector<int>& topic,
                         std::vector<std::string> names)
{
  TopicAssignments a;
  a.topics = std::move(names);
  a.weights = MatrixX<double>::Zero(static_cast<Eigen::Index>(scored.size()), static_cast<Eigen::Index>(a.topics.size()));
  for (std::size_t i = 0; i < scored.size(); ++i) {
    a.article_ids.push_back(scored[i].article_id);
    a.weights(static_cast<Eigen::Index>(i), topic[i]) = 1;
  }
  return a;
}

}  // namespace

TEST_CASE("keyword assignment with language variants and priority")
{
  const auto topics = parse_keyword_topics("# comment\nTariffs = tariff, zoll, droits de douane\nTrade = export*, zoll\n");
  REQUIRE(topics.size() == 2);
  std::vector<Article> articles{text_article(1, "Der Zoll steigt"), text_article(2, "Nichts hier"),
                                text_article(3, "les droits de douane", Language::fr), text_article(4, "Exporteure jubeln")};
  const auto a = assign_keyword(articles, topics);
  CHECK(a.topics == std::vector<std::string>{"Tariffs", "Trade", "Other"});
  CHECK(a.weights(0, 0) == 1);
  CHECK(a.weights(1, 2) == 1);
  CHECK(a.weights(2, 0) == 1);
  CHECK(a.weights(3, 1) == 1);
  a.validate();
  CHECK_THROWS_AS(parse_keyword_topics("Empty =\n"), Error);
}

TEST_CASE("truncation keeps the smallest prefix above the mass, capped at three")
{
  VectorX<double> p(8);
  p << 0.8, 0.1, 0.1, 0, 0, 0, 0, 0;
  VectorX<double> t = truncate_topic_probabilities(p);
  CHECK(t(0) == 1.0);
  CHECK(t.tail(7).isZero());

  VectorX<double> q(4);
  q << 0.4, 0.35, 0.15, 0.1;
  t = truncate_topic_probabilities(q);
  CHECK(t(0) == doctest::Approx(0.4 / 0.75).epsilon(1e-15));
  CHECK(t(1) == doctest::Approx(0.35 / 0.75).epsilon(1e-15));
  CHECK(t(2) == 0);
  CHECK(t(3) == 0);

  const VectorX<double> u = VectorX<double>::Constant(8, 0.125);
  t = truncate_topic_probabilities(u);
  for (int j = 0; j < 3; ++j) CHECK(t(j) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(t.tail(5).isZero());

  // Exactly 0.7 does not satisfy the rule.
  VectorX<double> edge(3);
  edge << 0.7, 0.2, 0.1;
  CHECK((truncate_topic_probabilities(edge).array() > 0).count() == 2);
}

TEST_CASE("assign_classified rows are probability vectors")
{
  TopicModel m;
  m.classes = {"a", "b", "c", "d"};
  Rng rng(2);
  m.weights = test::gaussian(5, 4, rng);
  m.weights.col(0).setZero();
  m.biases = VectorX<double>::Zero(4);
  const MatrixX<double> X = test::gaussian(30, 5, rng);
  std::vector<std::uint64_t> ids(30);
  std::iota(ids.begin(), ids.end(), 1);
  const auto a = assign_classified(m, X, ids);
  a.validate();
  for (Eigen::Index i = 0; i < 30; ++i) CHECK((a.weights.row(i).array() > 0).count() <= 3);
}

TEST_CASE("k-means recovers two separated blobs and is deterministic")
{
  Rng rng(3);
  MatrixX<double> X = test::gaussian(200, 10, rng) * 0.1;
  for (Eigen::Index i = 0; i < 100; ++i) X(i, 0) += 5;
  const auto a = kmeans(X, 2, 7);
  CHECK(a.converged);
  int agree = 0;
  for (Eigen::Index i = 0; i < 200; ++i) agree += (a.labels[static_cast<std::size_t>(i)] == a.labels[0]) == (i < 100);
  CHECK(agree >= 198);
  const auto b = kmeans(X, 2, 7);
  CHECK(a.centroids == b.centroids);
  CHECK_THROWS_AS(kmeans(X.topRows(2), 3, 1), Error);
}

TEST_CASE("nearest centroid ties go to the lower index")
{
  MatrixX<double> c(2, 1);
  c << -1, 1;
  CHECK(nearest_centroid(c, VectorX<double>::Zero(1)) == 0);
  CHECK(nearest_centroid(c, VectorX<double>::Constant(1, 0.5)) == 1);
}

TEST_CASE("duplicate points leave a cluster empty and warn")
{
  const MatrixX<double> X = MatrixX<double>::Ones(6, 2);
  const auto r = kmeans(X, 3, 1);
  CHECK_FALSE(r.warnings.empty());
  CHECK(r.centroids.allFinite());
}

TEST_CASE("cluster model fits one month and maps history consistently")
{
  Rng rng(4);
  MatrixX<double> fit = test::gaussian(120, 16, rng);
  for (Eigen::Index i = 0; i < 60; ++i) fit(i, 3) += 6;
  const auto m = fit_clusters(fit, 2, 4, 11, {2020, 6});
  CHECK(m.k() == 2);
  CHECK(m.reducer->output_dimension() == 4);
  MatrixX<double> history = test::gaussian(300, 16, rng);
  std::vector<std::uint64_t> ids(300);
  std::iota(ids.begin(), ids.end(), 1);
  const auto a = assign_clusters(m, history, ids);
  const auto b = assign_clusters(m, history, ids);
  CHECK(a.weights == b.weights);
  a.validate();

  test::TempDir dir;
  save_cluster_model(m, dir / "c.clus");
  const auto back = load_cluster_model(dir / "c.clus");
  CHECK(back.centroids == m.centroids);
  CHECK(back.fit_month == m.fit_month);
  CHECK(assign_clusters(back, history, ids).weights == a.weights);
  const auto again = fit_clusters(fit, 2, 4, 11, {2020, 6});
  CHECK(again.centroids == m.centroids);

  const auto single = fit_clusters(fit, 1, 4, 11, {2020, 6});
  CHECK((assign_clusters(single, history, ids).weights.col(0).array() == 1).all());
  CHECK_THROWS_AS(fit_clusters(fit.topRows(3), 4, 2, 1, {2020, 6}), Error);
}

TEST_CASE("pca axes are orthonormal and sign-fixed")
{
  Rng rng(5);
  MatrixX<double> X = test::gaussian(100, 6, rng);
  X.col(2) *= 10;
  PcaReducer r(3);
  r.fit(X, 0);
  const MatrixX<double> C = r.components();
  CHECK((C.transpose() * C - MatrixX<double>::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
  for (Eigen::Index k = 0; k < 3; ++k) {
    Eigen::Index arg;
    C.col(k).cwiseAbs().maxCoeff(&arg);
    CHECK(C(arg, k) > 0);
  }
  Eigen::Index top;
  C.col(0).cwiseAbs().maxCoeff(&top);
  CHECK(top == 2);
}

TEST_CASE("contributions by hand")
{
  std::vector<ScoredArticle> s{{1, test::date(2012, 3, 1), 0.6}, {2, test::date(2012, 3, 2), 0.4}};
  const auto c = contributions(one_hot(s, {0, 1}, {"A", "B"}), s);
  REQUIRE(c.periods.size() == 1);
  CHECK(c.values(0, 0) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(c.values(0, 1) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(c.totals(0) == doctest::Approx(0.5).epsilon(1e-15));

  const auto scored = random_scores(90, 6, 1);
  const auto single = contributions(one_hot(scored, std::vector<int>(90, 0), {"all"}), scored);
  const auto monthly = aggregate(scored, Frequency::monthly);
  for (std::size_t t = 0; t < 6; ++t) CHECK(single.values(static_cast<Eigen::Index>(t), 0) == doctest::Approx(monthly.points[t].value).epsilon(1e-14));
}

TEST_CASE("contributions add up, raw and standardized")
{
  const auto scored = random_scores(600, 12, 2);
  const auto assignments = random_assignments(scored, 6, 3);
  const auto monthly = aggregate(scored, Frequency::monthly);
  const auto z = standardize(monthly);

  const auto raw = contributions(assignments, scored);
  const auto st = contributions(assignments, scored, z.standardization);
  CHECK(st.standardized);
  for (Eigen::Index t = 0; t < 12; ++t) {
    CHECK(std::abs(raw.values.row(t).sum() - monthly.points[static_cast<std::size_t>(t)].value) <= 1e-9);
    CHECK(std::abs(st.values.row(t).sum() - z.points[static_cast<std::size_t>(t)].value) <= 1e-9);
  }

  const double threshold = 0.5 * st.values.cwiseAbs().maxCoeff();
  std::vector<std::string> kept;
  for (Eigen::Index j = 0; j < st.values.cols(); ++j)
    if (st.values.col(j).cwiseAbs().maxCoeff() > threshold) kept.push_back(st.topics[static_cast<std::size_t>(j)]);
  REQUIRE(kept.size() < st.topics.size());
  kept.push_back(kOtherTopic);
  const auto folded = fold_minor_topics(st, threshold);
  CHECK(folded.topics == kept);
  for (Eigen::Index t = 0; t < 12; ++t) CHECK(std::abs(folded.values.row(t).sum() - st.values.row(t).sum()) <= 1e-12);

  auto missing = assignments;
  missing.article_ids.pop_back();
  missing.weights.conservativeResize(missing.weights.rows() - 1, Eigen::NoChange);
  try {
    contributions(missing, scored);
    FAIL("expected missing assignment");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find(std::to_string(scored.back().article_id)) != std::string::npos);
  }
}

TEST_CASE("top articles match a brute-force sort")
{
  auto scored = random_scores(20, 1, 4);
  scored[3].prob = scored[7].prob;  // a tie
  std::vector<int> topic(20);
  for (int i = 0; i < 20; ++i) topic[static_cast<std::size_t>(i)] = i % 2;
  const auto a = one_hot(scored, topic, {"A", "B"});
  const YearMonth ym{2015, 1};

  std::vector<ScoredArticle> in_a;
  for (std::size_t i = 0; i < 20; ++i)
    if (topic[i] == 0) in_a.push_back(scored[i]);
  auto expect = [&](auto key) {
    auto v = in_a;
    std::sort(v.begin(), v.end(), [&](const auto& x, const auto& y) {
      return key(x) != key(y) ? key(x) > key(y) : x.article_id < y.article_id;
    });
    std::vector<std::uint64_t> ids;
    for (const auto& x : v) ids.push_back(x.article_id);
    return ids;
  };
  CHECK(top_articles(scored, a, "A", ym, RankingMode::most_positive, 10) == expect([](const auto& x) { return x.prob; }));
  CHECK(top_articles(scored, a, "A", ym, RankingMode::most_negative, 10) == expect([](const auto& x) { return -x.prob; }));
  CHECK(top_articles(scored, a, "A", ym, RankingMode::most_positive, 1).front() == expect([](const auto& x) { return x.prob; }).front());

  const Standardization st{0.5, 0.2};
  const double n = 20;
  const auto by_contribution = top_articles(scored, a, "A", ym, RankingMode::largest_abs_contribution, 10, st);
  CHECK(by_contribution == expect([&](const auto& x) { return std::abs((x.prob / n - st.mean / n) / st.stdev); }));
  CHECK(top_articles(scored, a, "A", {2016, 1}, RankingMode::most_positive, 3).empty());
  CHECK(parse_ranking_mode("largest_abs_contribution") == RankingMode::largest_abs_contribution);
}

TEST_CASE("term frequencies")
{
  const std::vector<std::string> texts{"zoll zoll handel"};
  const auto f = term_frequencies(texts, {}, 10);
  REQUIRE(f.size() == 2);
  CHECK(f[0] == std::make_pair(std::string("zoll"), std::size_t{2}));
  CHECK(f[1] == std::make_pair(std::string("handel"), std::size_t{1}));
  CHECK(term_frequencies(std::vector<std::string>{"der die das"}, {"der", "die", "das"}, 10).empty());
  const auto folded = term_frequencies(std::vector<std::string>{"Zoll ZOLL zoll Alpha beta"}, {}, 2);
  REQUIRE(folded.size() == 2);
  CHECK(folded[0].second == 3);
  CHECK(folded[1].first == "alpha");

  std::vector<Article> articles{text_article(1, "le zoll"), text_article(2, "le zoll", Language::fr)};
  std::map<Language, std::set<std::string>> stop{{Language::fr, {"le"}}};
  const auto mixed = term_frequencies(articles, stop, 5);
  REQUIRE(mixed.size() == 2);
  CHECK(mixed[0].first == "zoll");
  CHECK(mixed[1] == std::make_pair(std::string("le"), std::size_t{1}));

  test::TempDir dir;
  write_text(dir / "s.txt", "# stop\nder die\ndas\n");
  CHECK(read_stopwords(dir / "s.txt") == std::set<std::string>{"der", "die", "das"});
}

TEST_CASE("csv exports")
{
  const auto scored = random_scores(30, 2, 6);
  const auto a = random_assignments(scored, 3, 7);
  test::TempDir dir;
  write_assignments_csv(a, dir / "a.csv");
  write_contributions_csv(contributions(a, scored), dir / "c.csv");
  const auto at = read_csv(dir / "a.csv");
  CHECK(at.header == std::vector<std::string>{"article_id", "topic", "weight"});
  const auto ct = read_csv(dir / "c.csv");
  CHECK(ct.header == std::vector<std::string>{"period", "topic", "contribution"});
  CHECK(ct.rows.size() == 6);
}
