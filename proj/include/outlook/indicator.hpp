#ifndef OUTLOOK_INDICATOR_HPP_
#define OUTLOOK_INDICATOR_HPP_

#include "outlook/calendar.hpp"
#include "outlook/common.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace outlook
{

/// One article's score. Sentiment probabilities lie in (0, 1); the same record carries
/// lexicon scores in [-1, 1].
struct ScoredArticle
{
  std::uint64_t article_id = 0;
  Date date{};
  double prob = 0;
};

enum class Frequency { monthly, first7, first14, first21, daily_mtd };

Frequency parse_frequency(std::string_view s);
std::string to_string(Frequency f);
/// 7, 14, 21 for the partial-month variants.
std::optional<int> window_days(Frequency f);

struct IndicatorPoint
{
  Date period{};  // first day of month for monthly variants
  double value = 0;
  std::size_t n_articles = 0;
};

struct Standardization
{
  double mean = 0;
  double stdev = 1;
};

struct IndicatorSeries
{
  Frequency frequency = Frequency::monthly;
  std::vector<IndicatorPoint> points;
  std::optional<Standardization> standardization;
  std::vector<YearMonth> omitted_months;  // months inside the span without articles

  std::size_t size() const { return points.size(); }
  VectorX<double> values() const;
  std::optional<double> at(const YearMonth& ym) const;
};

/// Mean of the values, summed in ascending order so the result does not depend on input order.
double order_free_mean(std::vector<double> values);

/// Per-month mean score (first-k variants restrict to calendar days 1..k; daily_mtd
/// concatenates the month-to-date series of every month).
IndicatorSeries aggregate(std::span<const ScoredArticle> scored, Frequency frequency);

/// Per-month mean over calendar days 1..window_days.
IndicatorSeries aggregate_window(std::span<const ScoredArticle> scored, int window_days);

/// For each day of `month` from the first article onward, the mean of all scores dated up to
/// that day; runs through the month's last calendar day. Throws for a month without articles.
IndicatorSeries daily_month_to_date(std::span<const ScoredArticle> scored, const YearMonth& month);

/// Zero mean, unit population standard deviation; records (mean, stdev).
IndicatorSeries standardize(const IndicatorSeries& series);
IndicatorSeries destandardize(const IndicatorSeries& series);
/// Real-time variant: each point uses the mean and stdev of the points up to and including
/// itself. The first min_periods - 1 points are dropped.
IndicatorSeries standardize_expanding(const IndicatorSeries& series, std::size_t min_periods = 2);

/// Quantile band [lo, hi] on the 0..1 scale.
struct QuantileBand
{
  double lo = 0;
  double hi = 1;
};

struct LabelingSampleRow
{
  std::size_t band = 0;
  ScoredArticle article;
};

/// Linear-interpolation empirical quantile of sorted data.
double quantile_sorted(const std::vector<double>& sorted, double q);

/// Seeded uniform sample of k articles from each quantile band of the score distribution.
std::vector<LabelingSampleRow> export_labeling_sample(std::span<const ScoredArticle> scored,
                                                      std::span<const QuantileBand> bands, std::size_t k,
                                                      std::uint64_t seed);

void write_scores_csv(std::span<const ScoredArticle> scored, const std::filesystem::path& path);
std::vector<ScoredArticle> read_scores_csv(const std::filesystem::path& path);

/// period,value,n_articles
void write_indicator_csv(const IndicatorSeries& series, const std::filesystem::path& path);
IndicatorSeries read_indicator_csv(const std::filesystem::path& path, Frequency frequency = Frequency::monthly);
/// mean=..., stdev=... sidecar next to a standardized series.
void write_standardization_sidecar(const Standardization& s, const std::filesystem::path& path);
Standardization read_standardization_sidecar(const std::filesystem::path& path);

std::string format_period(const IndicatorSeries& series, const IndicatorPoint& p);

}  // namespace outlook

#endif  // OUTLOOK_INDICATOR_HPP_
