#include "support.hpp"

#include "outlook/indicator.hpp"

#include <doctest.h>

#include <map>

using namespace outlook;

namespace
{

ScoredArticle scored(std::uint64_t id, int y, unsigned m, unsigned d, double p) { return {id, test::date(y, m, d), p}; }

IndicatorSeries series(std::initializer_list<double> values)
{
  IndicatorSeries s;
  YearMonth ym{2010, 1};
  for (double v : values) {
    s.points.push_back({ym.first_day(), v, 1});
    ym = ym.next();
  }
  return s;
}

std::vector<ScoredArticle> random_scores(std::size_t n, int months, std::uint64_t seed)
{
  Rng rng(seed);
  std::vector<ScoredArticle> out;
  for (std::size_t i = 0; i < n; ++i) {
    const YearMonth ym = YearMonth{2011, 1}.next(static_cast<int>(uniform_index(rng, static_cast<std::size_t>(months))));
    const auto day = static_cast<unsigned>(1 + uniform_index(rng, ym.days()));
    out.push_back(scored(i + 1, ym.year, ym.month, day, 0.01 + 0.98 * uniform_real(rng)));
  }
  return out;
}

}  // namespace

TEST_CASE("constant scores give a constant month")
{
  std::vector<ScoredArticle> s{scored(1, 2010, 3, 1, 0.5), scored(2, 2010, 3, 15, 0.5), scored(3, 2010, 3, 31, 0.5)};
  const auto m = aggregate(s, Frequency::monthly);
  REQUIRE(m.size() == 1);
  CHECK(m.points[0].value == 0.5);
  CHECK(m.points[0].n_articles == 3);
  CHECK(m.points[0].period == test::date(2010, 3, 1));
}

TEST_CASE("articles in the first week give equal variants")
{
  std::vector<ScoredArticle> s{scored(1, 2010, 3, 1, 0.1), scored(2, 2010, 3, 4, 0.6), scored(3, 2010, 3, 7, 0.9)};
  const double monthly = aggregate(s, Frequency::monthly).points[0].value;
  for (auto f : {Frequency::first7, Frequency::first14, Frequency::first21})
    CHECK(aggregate(s, f).points[0].value == monthly);
}

TEST_CASE("hand-computed partial-month values")
{
  std::vector<ScoredArticle> s{scored(1, 2010, 5, 3, 0.2), scored(2, 2010, 5, 10, 0.8), scored(3, 2010, 5, 20, 0.5)};
  CHECK(aggregate(s, Frequency::first7).points[0].value == doctest::Approx(0.2));
  CHECK(aggregate(s, Frequency::first14).points[0].value == doctest::Approx(0.5));
  CHECK(aggregate(s, Frequency::first21).points[0].value == doctest::Approx(0.5));
  CHECK(aggregate(s, Frequency::monthly).points[0].value == doctest::Approx(0.5));
  CHECK(aggregate_window(s, 10).points[0].value == doctest::Approx(0.5));
  CHECK(window_days(Frequency::first14) == 14);
  CHECK_FALSE(window_days(Frequency::monthly));
}

TEST_CASE("empty months are omitted and reported")
{
  std::vector<ScoredArticle> s{scored(1, 2010, 1, 5, 0.3), scored(2, 2010, 4, 5, 0.7)};
  const auto m = aggregate(s, Frequency::monthly);
  REQUIRE(m.size() == 2);
  CHECK(m.omitted_months == std::vector<YearMonth>{{2010, 2}, {2010, 3}});
  CHECK(m.at({2010, 4}) == 0.7);
  CHECK_FALSE(m.at({2010, 2}));
  // A month whose articles all fall after day 7 vanishes from first7 only.
  std::vector<ScoredArticle> late{scored(1, 2010, 1, 5, 0.3), scored(2, 2010, 2, 20, 0.7)};
  CHECK(aggregate(late, Frequency::first7).size() == 1);
}

TEST_CASE("aggregation is order free and bounded by the month's scores")
{
  auto s = random_scores(400, 6, 2);
  const auto a = aggregate(s, Frequency::monthly);
  Rng rng(3);
  seeded_shuffle(s, rng);
  const auto b = aggregate(s, Frequency::monthly);
  REQUIRE(a.size() == b.size());
  std::map<YearMonth, std::pair<double, double>> range;
  for (const auto& x : s) {
    auto [it, fresh] = range.emplace(YearMonth::of(x.date), std::make_pair(x.prob, x.prob));
    it->second.first = std::min(it->second.first, x.prob);
    it->second.second = std::max(it->second.second, x.prob);
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.points[i].value == b.points[i].value);
    const auto [lo, hi] = range.at(YearMonth::of(a.points[i].period));
    CHECK(a.points[i].value >= lo);
    CHECK(a.points[i].value <= hi);
    if (i) CHECK(a.points[i - 1].period < a.points[i].period);
  }
}

TEST_CASE("partial-month counts are non-decreasing")
{
  const auto s = random_scores(300, 4, 5);
  const auto f7 = aggregate(s, Frequency::first7), f14 = aggregate(s, Frequency::first14),
             f21 = aggregate(s, Frequency::first21), m = aggregate(s, Frequency::monthly);
  REQUIRE(m.size() == 4);
  REQUIRE(f7.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(f7.points[i].n_articles <= f14.points[i].n_articles);
    CHECK(f14.points[i].n_articles <= f21.points[i].n_articles);
    CHECK(f21.points[i].n_articles <= m.points[i].n_articles);
  }
}

TEST_CASE("per-article terms sum to the monthly mean")
{
  const auto s = random_scores(50, 1, 6);
  const double monthly = aggregate(s, Frequency::monthly).points[0].value;
  std::vector<double> terms;
  for (const auto& x : s) terms.push_back(x.prob / static_cast<double>(s.size()));
  std::sort(terms.begin(), terms.end());
  double sum = 0;
  for (double t : terms) sum += t;
  CHECK(sum == doctest::Approx(monthly).epsilon(1e-14));
}

TEST_CASE("month-to-date series")
{
  std::vector<ScoredArticle> one{scored(1, 2010, 6, 1, 0.7)};
  const auto flat = daily_month_to_date(one, {2010, 6});
  CHECK(flat.size() == 30);
  for (const auto& p : flat.points) CHECK(p.value == 0.7);

  const auto s = random_scores(30, 1, 8);
  const YearMonth ym{2011, 1};
  const auto mtd = daily_month_to_date(s, ym);
  for (const auto& p : mtd.points) {
    double sum = 0;
    std::size_t n = 0;
    for (const auto& x : s)
      if (x.date <= p.period) {
        sum += x.prob;
        ++n;
      }
    REQUIRE(n > 0);
    CHECK(std::abs(p.value - sum / static_cast<double>(n)) <= 1e-12);
    CHECK(p.n_articles == n);
  }
  CHECK(mtd.points.back().value == doctest::Approx(aggregate(s, Frequency::monthly).points[0].value).epsilon(1e-14));
  CHECK(mtd.points.back().period == test::date(2011, 1, 31));
  CHECK_THROWS_AS(daily_month_to_date(s, {2011, 2}), Error);

  const auto all = aggregate(random_scores(60, 2, 9), Frequency::daily_mtd);
  for (std::size_t i = 1; i < all.size(); ++i) CHECK(all.points[i - 1].period < all.points[i].period);
}

TEST_CASE("standardization")
{
  const auto z = standardize(series({0, 1}));
  CHECK(z.points[0].value == -1.0);
  CHECK(z.points[1].value == 1.0);
  REQUIRE(z.standardization);
  CHECK(z.standardization->mean == 0.5);
  CHECK(z.standardization->stdev == 0.5);

  const auto s = aggregate(random_scores(200, 10, 10), Frequency::monthly);
  const auto once = standardize(s);
  const VectorX<double> v = once.values();
  CHECK(std::abs(v.mean()) <= 1e-12);
  CHECK(std::sqrt(v.array().square().mean()) == doctest::Approx(1.0).epsilon(1e-12));
  const auto twice = standardize(destandardize(once));
  CHECK((twice.values() - v).cwiseAbs().maxCoeff() <= 1e-12);
  auto plain = once;
  plain.standardization.reset();
  CHECK((standardize(plain).values() - v).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((destandardize(once).values() - s.values()).cwiseAbs().maxCoeff() <= 1e-12);

  CHECK_THROWS_AS(standardize(series({0.4, 0.4, 0.4})), Error);
  CHECK_THROWS_AS(standardize(series({0.4})), Error);
}

TEST_CASE("expanding standardization only uses the past")
{
  const auto s = series({0.1, 0.3, 0.2, 0.8, 0.5});
  const auto e = standardize_expanding(s);
  REQUIRE(e.size() == 4);
  for (std::size_t i = 0; i < e.size(); ++i) {
    const VectorX<double> past = s.values().head(static_cast<Eigen::Index>(i + 2));
    const double mu = past.mean();
    const double sd = std::sqrt((past.array() - mu).square().mean());
    CHECK(e.points[i].value == doctest::Approx((past(past.size() - 1) - mu) / sd).epsilon(1e-12));
  }
}

TEST_CASE("labeling sample draws k per quantile band")
{
  const auto s = random_scores(2000, 12, 12);
  const std::vector<QuantileBand> bands{{0, 0.05}, {0.45, 0.55}, {0.95, 1.0}};
  const auto rows = export_labeling_sample(s, bands, 50, 4);
  CHECK(rows.size() == 150);
  std::vector<double> probs;
  for (const auto& x : s) probs.push_back(x.prob);
  std::sort(probs.begin(), probs.end());
  for (const auto& r : rows) {
    CHECK(r.article.prob >= quantile_sorted(probs, bands[r.band].lo));
    CHECK(r.article.prob <= quantile_sorted(probs, bands[r.band].hi));
  }
  const auto again = export_labeling_sample(s, bands, 50, 4);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].article.article_id == again[i].article.article_id);

  CHECK(export_labeling_sample(s, bands, 0, 4).empty());
  CHECK_THROWS_AS(export_labeling_sample(s, bands, 200, 4), Error);
  auto flat = s;
  for (auto& x : flat) x.prob = 0.5;
  CHECK_THROWS_AS(export_labeling_sample(flat, bands, 5, 4), Error);
}

TEST_CASE("quantiles interpolate linearly")
{
  const std::vector<double> v{1, 2, 3, 4, 5};
  CHECK(quantile_sorted(v, 0) == 1);
  CHECK(quantile_sorted(v, 1) == 5);
  CHECK(quantile_sorted(v, 0.5) == 3);
  CHECK(quantile_sorted(v, 0.1) == doctest::Approx(1.4));
}

TEST_CASE("csv files and sidecars round-trip")
{
  test::TempDir dir;
  const auto s = random_scores(100, 5, 13);
  write_scores_csv(s, dir / "scores.csv");
  const auto back = read_scores_csv(dir / "scores.csv");
  REQUIRE(back.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(back[i].article_id == s[i].article_id);
    CHECK(back[i].date == s[i].date);
    CHECK(back[i].prob == s[i].prob);
  }

  const auto m = aggregate(s, Frequency::monthly);
  write_indicator_csv(m, dir / "m.csv");
  const auto mb = read_indicator_csv(dir / "m.csv");
  CHECK(mb.values() == m.values());
  CHECK(format_period(m, m.points[0]) == "2011-01");

  write_standardization_sidecar({0.25, 0.125}, dir / "m.std");
  const auto st = read_standardization_sidecar(dir / "m.std");
  CHECK(st.mean == 0.25);
  CHECK(st.stdev == 0.125);

  CHECK(parse_frequency("daily-mtd") == Frequency::daily_mtd);
  CHECK_THROWS_AS(parse_frequency("weekly"), Error);
}
