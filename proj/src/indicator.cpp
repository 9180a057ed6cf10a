#include "outlook/indicator.hpp"

#include "outlook/io.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace outlook
{

Frequency parse_frequency(std::string_view s)
{
  if (s == "monthly") return Frequency::monthly;
  if (s == "first7") return Frequency::first7;
  if (s == "first14") return Frequency::first14;
  if (s == "first21") return Frequency::first21;
  if (s == "daily-mtd" || s == "daily_mtd") return Frequency::daily_mtd;
  throw Error("unknown frequency '" + std::string(s) + "'");
}

std::string to_string(Frequency f)
{
  switch (f) {
    case Frequency::monthly: return "monthly";
    case Frequency::first7: return "first7";
    case Frequency::first14: return "first14";
    case Frequency::first21: return "first21";
    case Frequency::daily_mtd: return "daily-mtd";
  }
  return "monthly";
}

std::optional<int> window_days(Frequency f)
{
  switch (f) {
    case Frequency::first7: return 7;
    case Frequency::first14: return 14;
    case Frequency::first21: return 21;
    default: return std::nullopt;
  }
}

VectorX<double> IndicatorSeries::values() const
{
  VectorX<double> v(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) v(static_cast<Eigen::Index>(i)) = points[i].value;
  return v;
}

std::optional<double> IndicatorSeries::at(const YearMonth& ym) const
{
  for (const auto& p : points)
    if (YearMonth::of(p.period) == ym) return p.value;
  return std::nullopt;
}

double order_free_mean(std::vector<double> values)
{
  if (values.empty()) throw Error("mean of empty set");
  std::sort(values.begin(), values.end());
  // offsets from the minimum: equal values average to themselves exactly
  const double base = values.front();
  double s = 0;
  for (double v : values) s += v - base;
  return base + s / static_cast<double>(values.size());
}

namespace
{

IndicatorSeries aggregate_days(std::span<const ScoredArticle> scored, unsigned max_day, Frequency tag)
{
  std::map<YearMonth, std::vector<double>> by_month;
  std::optional<YearMonth> first, last;
  for (const auto& s : scored) {
    const YearMonth ym = YearMonth::of(s.date);
    if (!first || ym < *first) first = ym;
    if (!last || *last < ym) last = ym;
    if (day_of_month(s.date) <= max_day) by_month[ym].push_back(s.prob);
  }
  IndicatorSeries out;
  out.frequency = tag;
  if (!first) return out;
  for (YearMonth ym = *first; !(*last < ym); ym = ym.next()) {
    auto it = by_month.find(ym);
    if (it == by_month.end()) {
      out.omitted_months.push_back(ym);
      continue;
    }
    out.points.push_back({ym.first_day(), order_free_mean(it->second), it->second.size()});
  }
  return out;
}

}  // namespace

IndicatorSeries aggregate_window(std::span<const ScoredArticle> scored, int days)
{
  if (days < 1 || days > 31) throw Error("window_days must be in 1..31");
  Frequency tag = Frequency::monthly;
  if (days == 7) tag = Frequency::first7;
  if (days == 14) tag = Frequency::first14;
  if (days == 21) tag = Frequency::first21;
  return aggregate_days(scored, static_cast<unsigned>(days), tag);
}

IndicatorSeries aggregate(std::span<const ScoredArticle> scored, Frequency frequency)
{
  if (frequency == Frequency::monthly) return aggregate_days(scored, 31, Frequency::monthly);
  if (auto w = window_days(frequency)) return aggregate_days(scored, static_cast<unsigned>(*w), frequency);

  std::vector<YearMonth> months;
  for (const auto& s : scored) months.push_back(YearMonth::of(s.date));
  std::sort(months.begin(), months.end());
  months.erase(std::unique(months.begin(), months.end()), months.end());
  IndicatorSeries out;
  out.frequency = Frequency::daily_mtd;
  for (const auto& ym : months) {
    auto m = daily_month_to_date(scored, ym);
    out.points.insert(out.points.end(), m.points.begin(), m.points.end());
  }
  if (!months.empty())
    for (YearMonth ym = months.front(); !(months.back() < ym); ym = ym.next())
      if (!std::binary_search(months.begin(), months.end(), ym)) out.omitted_months.push_back(ym);
  return out;
}

IndicatorSeries daily_month_to_date(std::span<const ScoredArticle> scored, const YearMonth& month)
{
  std::vector<std::pair<unsigned, double>> in_month;
  for (const auto& s : scored)
    if (YearMonth::of(s.date) == month) in_month.emplace_back(day_of_month(s.date), s.prob);
  if (in_month.empty()) throw Error("no articles in " + format_year_month(month));
  unsigned first_day = 31;
  for (const auto& [d, p] : in_month) first_day = std::min(first_day, d);

  IndicatorSeries out;
  out.frequency = Frequency::daily_mtd;
  for (unsigned day = first_day; day <= month.days(); ++day) {
    std::vector<double> upto;
    for (const auto& [d, p] : in_month)
      if (d <= day) upto.push_back(p);
    const Date date = std::chrono::year{month.year} / std::chrono::month{month.month} / std::chrono::day{day};
    out.points.push_back({date, order_free_mean(upto), upto.size()});
  }
  return out;
}

IndicatorSeries standardize(const IndicatorSeries& series)
{
  if (series.points.size() < 2) throw Error("standardize needs at least two points");
  const VectorX<double> v = series.values();
  if (v.minCoeff() == v.maxCoeff()) throw Error("cannot standardize a constant series");
  const double mu = v.mean();
  const double sigma = std::sqrt((v.array() - mu).square().mean());
  IndicatorSeries out = series;
  for (auto& p : out.points) p.value = (p.value - mu) / sigma;
  if (series.standardization) {
    const auto& s = *series.standardization;
    out.standardization = Standardization{s.mean + s.stdev * mu, s.stdev * sigma};
  } else {
    out.standardization = Standardization{mu, sigma};
  }
  return out;
}

IndicatorSeries destandardize(const IndicatorSeries& series)
{
  if (!series.standardization) return series;
  IndicatorSeries out = series;
  const auto s = *series.standardization;
  for (auto& p : out.points) p.value = p.value * s.stdev + s.mean;
  out.standardization.reset();
  return out;
}

IndicatorSeries standardize_expanding(const IndicatorSeries& series, std::size_t min_periods)
{
  if (min_periods < 2) throw Error("expanding standardization needs min_periods >= 2");
  IndicatorSeries out = series;
  out.points.clear();
  out.standardization.reset();
  const VectorX<double> v = series.values();
  for (std::size_t i = min_periods - 1; i < series.points.size(); ++i) {
    const auto head = v.head(static_cast<Eigen::Index>(i + 1));
    if (head.minCoeff() == head.maxCoeff()) continue;
    const double mu = head.mean();
    const double sigma = std::sqrt((head.array() - mu).square().mean());
    IndicatorPoint p = series.points[i];
    p.value = (p.value - mu) / sigma;
    out.points.push_back(p);
  }
  return out;
}

double quantile_sorted(const std::vector<double>& sorted, double q)
{
  if (sorted.empty()) throw Error("quantile of empty set");
  if (q <= 0) return sorted.front();
  if (q >= 1) return sorted.back();
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<LabelingSampleRow> export_labeling_sample(std::span<const ScoredArticle> scored,
                                                      std::span<const QuantileBand> bands, std::size_t k,
                                                      std::uint64_t seed)
{
  if (k == 0) return {};
  for (std::size_t b = 0; b < bands.size(); ++b) {
    if (bands[b].lo < 0 || bands[b].hi > 1 || bands[b].lo >= bands[b].hi)
      throw Error("quantile band " + std::to_string(b) + " must satisfy 0 <= lo < hi <= 1");
    for (std::size_t c = 0; c < b; ++c)
      if (bands[b].lo < bands[c].hi && bands[c].lo < bands[b].hi) throw Error("quantile bands overlap");
  }
  std::vector<double> sorted;
  for (const auto& s : scored) sorted.push_back(s.prob);
  std::sort(sorted.begin(), sorted.end());

  std::vector<std::vector<std::size_t>> members(bands.size());
  for (std::size_t b = 0; b < bands.size(); ++b) {
    const double lo = quantile_sorted(sorted, bands[b].lo);
    const double hi = quantile_sorted(sorted, bands[b].hi);
    if (!(lo < hi)) throw Error("quantile band " + std::to_string(b) + " is degenerate (all scores equal within it)");
    for (std::size_t i = 0; i < scored.size(); ++i)
      if (scored[i].prob >= lo && scored[i].prob <= hi) members[b].push_back(i);
  }
  std::vector<std::size_t> owner(scored.size(), bands.size());
  for (std::size_t b = 0; b < bands.size(); ++b)
    for (auto i : members[b]) {
      if (owner[i] != bands.size()) throw Error("quantile bands overlap in score value");
      owner[i] = b;
    }

  std::vector<LabelingSampleRow> rows;
  for (std::size_t b = 0; b < bands.size(); ++b) {
    auto& m = members[b];
    if (m.size() < k)
      throw Error("quantile band " + std::to_string(b) + " holds " + std::to_string(m.size()) + " articles, " +
                  std::to_string(k) + " requested");
    std::sort(m.begin(), m.end(), [&](std::size_t x, std::size_t y) { return scored[x].article_id < scored[y].article_id; });
    Rng rng(mix_seed(seed, b));
    for (auto idx : sample_indices(m.size(), k, rng)) rows.push_back({b, scored[m[idx]]});
  }
  return rows;
}

void write_scores_csv(std::span<const ScoredArticle> scored, const std::filesystem::path& path)
{
  std::string out = "article_id,date,prob\n";
  for (const auto& s : scored)
    out += std::to_string(s.article_id) + "," + format_date(s.date) + "," + format_double(s.prob) + "\n";
  write_text(path, out);
}

std::vector<ScoredArticle> read_scores_csv(const std::filesystem::path& path)
{
  const CsvTable t = read_csv(path);
  const auto id = t.column("article_id"), date = t.column("date"), prob = t.column("prob");
  std::vector<ScoredArticle> out;
  for (const auto& row : t.rows) out.push_back({parse_u64(row[id]), parse_date(row[date]), parse_double(row[prob])});
  return out;
}

std::string format_period(const IndicatorSeries& series, const IndicatorPoint& p)
{
  return series.frequency == Frequency::daily_mtd ? format_date(p.period) : format_year_month(YearMonth::of(p.period));
}

void write_indicator_csv(const IndicatorSeries& series, const std::filesystem::path& path)
{
  std::string out = "period,value,n_articles\n";
  for (const auto& p : series.points)
    out += format_period(series, p) + "," + format_double(p.value) + "," + std::to_string(p.n_articles) + "\n";
  write_text(path, out);
}

IndicatorSeries read_indicator_csv(const std::filesystem::path& path, Frequency frequency)
{
  const CsvTable t = read_csv(path);
  const auto period = t.column("period"), value = t.column("value");
  std::optional<std::size_t> count;
  for (std::size_t c = 0; c < t.header.size(); ++c)
    if (t.header[c] == "n_articles") count = c;
  IndicatorSeries s;
  s.frequency = frequency;
  for (const auto& row : t.rows) {
    IndicatorPoint p;
    p.period = row[period].size() == 7 ? parse_year_month(row[period]).first_day() : parse_date(row[period]);
    p.value = parse_double(row[value]);
    p.n_articles = count ? static_cast<std::size_t>(parse_u64(row[*count])) : 1;
    if (!s.points.empty() && !(s.points.back().period < p.period))
      throw Error("indicator periods must be strictly increasing in '" + path.string() + "'");
    s.points.push_back(p);
  }
  return s;
}

void write_standardization_sidecar(const Standardization& s, const std::filesystem::path& path)
{
  write_text(path, "mean=" + format_double(s.mean) + "\nstdev=" + format_double(s.stdev) + "\n");
}

Standardization read_standardization_sidecar(const std::filesystem::path& path)
{
  Standardization s;
  bool has_mean = false, has_sd = false;
  for (const auto& line : split(read_text(path), '\n')) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("malformed standardization sidecar line '" + line + "'");
    const auto key = trim(line.substr(0, eq));
    if (key == "mean") {
      s.mean = parse_double(line.substr(eq + 1));
      has_mean = true;
    } else if (key == "stdev") {
      s.stdev = parse_double(line.substr(eq + 1));
      has_sd = true;
    }
  }
  if (!has_mean || !has_sd) throw Error("standardization sidecar needs mean and stdev");
  return s;
}

}  // namespace outlook
