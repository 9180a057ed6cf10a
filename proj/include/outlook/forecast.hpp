#ifndef OUTLOOK_FORECAST_HPP_
#define OUTLOOK_FORECAST_HPP_

#include "outlook/calendar.hpp"
#include "outlook/indicator.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace outlook
{

enum class SeriesKind { gdp_yoy, gdp_qoq, indicator_quarterly };

struct QuarterlySeries
{
  SeriesKind kind = SeriesKind::indicator_quarterly;
  std::vector<Quarter> quarters;  // strictly increasing
  std::vector<double> values;
  std::vector<bool> partial;      // mean mode: fewer than three months available

  std::size_t size() const { return quarters.size(); }
  std::optional<double> at(const Quarter& q) const;
  void push(const Quarter& q, double v, bool is_partial = false);
};

enum class QuarterlyMode { month_m, three_month_mean };

QuarterlyMode parse_quarterly_mode(std::string_view s);

/// month_m takes month m (1..3) of each quarter and omits quarters without it;
/// three_month_mean averages the available months and flags incomplete quarters.
QuarterlySeries monthly_to_quarterly(const IndicatorSeries& monthly, QuarterlyMode mode, int m = 2);

struct GdpSeries
{
  QuarterlySeries yoy;
  QuarterlySeries qoq;
};

/// Columns quarter, yoy_growth, qoq_growth; an empty cell omits that quarter from the series.
GdpSeries read_gdp_csv(const std::filesystem::path& path);
void write_gdp_csv(const GdpSeries& gdp, const std::filesystem::path& path);

/// Indicator already at quarterly frequency: columns quarter, value.
QuarterlySeries read_quarterly_csv(const std::filesystem::path& path);

struct OlsFit
{
  VectorX<double> coefficients;
  VectorX<double> residuals;
};

/// Least squares; throws when rows < columns or the design is rank deficient.
OlsFit ols_fit(const VectorX<double>& y, const MatrixX<double>& X);

struct ForecastConfig
{
  std::vector<int> horizons{0, 1, 2};
  int month = 2;
  QuarterlyMode mode = QuarterlyMode::month_m;
  int initial_window = 8;  // quarters of GDP history before the first origin
  int hac_lag = 0;         // 0: max(h, 1)
  bool small_sample = false;
};

/// Forecast of y[t + h] made at origin t from GDP known through t - 1 and the indicator
/// through t. Regresses y[s + h] on (1, y[s - 1], x[s]) over rows with s + h <= t - 1; without
/// an indicator the x column is dropped. Returns nullopt when the origin is not usable.
std::optional<double> forecast_at(const QuarterlySeries& gdp, const QuarterlySeries* indicator, int h, const Quarter& origin,
                                  int initial_window = 8);

struct QuarterForecast
{
  Quarter origin;
  Quarter target;
  double actual = 0;
  double model = 0;
  double benchmark = 0;

  double model_error() const { return actual - model; }
  double benchmark_error() const { return actual - benchmark; }
};

/// Pseudo-out-of-sample direct forecasts at every usable origin, with the AR(1) benchmark fit
/// on the same rows.
std::vector<QuarterForecast> expanding_forecast(const QuarterlySeries& gdp, const QuarterlySeries& indicator, int h,
                                                int initial_window = 8);

double rmse(const VectorX<double>& errors);
/// RMSE(model) / RMSE(benchmark); +inf when only the benchmark is perfect, 1 when both are.
double rmse_ratio(const VectorX<double>& model_errors, const VectorX<double>& benchmark_errors);

struct DmResult
{
  double statistic = 0;
  double p_value = 1;            // two-sided
  double p_value_one_sided = 0.5;  // alternative: first forecast more accurate
  int lag = 1;
  std::size_t n = 0;
  bool degenerate = false;
  std::string warning;
};

/// Loss differential d = e1^2 - e2^2 with a Bartlett HAC long-run variance. Normal reference
/// by default; `small_sample` applies the Harvey-Leybourne-Newbold factor with Student t.
DmResult dm_test(const VectorX<double>& e1, const VectorX<double>& e2, int h, int lag = 0, bool small_sample = false);

struct LagCorrelations
{
  std::vector<std::optional<double>> by_lag;  // index = lag
  std::optional<double> average_short;        // lags 0, 1
  std::optional<double> average_all;          // all lags
};

/// Pearson correlation of y[t] with x[t - lag]; absent below three overlapping quarters.
LagCorrelations lag_correlations(const QuarterlySeries& gdp, const QuarterlySeries& indicator, int max_lag = 4);

/// Running sum of e_model^2 - e_benchmark^2.
std::vector<std::pair<Quarter, double>> crisis_diagnostic(const VectorX<double>& model_errors,
                                                          const VectorX<double>& benchmark_errors,
                                                          const std::vector<Quarter>& quarters);

struct HorizonReport
{
  int h = 0;
  std::size_t n = 0;
  double rmse_model = 0;
  double rmse_benchmark = 0;
  double ratio = 0;
  std::optional<DmResult> dm;  // absent below eight forecasts
  std::vector<QuarterForecast> forecasts;
};

std::vector<HorizonReport> evaluate_forecasts(const QuarterlySeries& gdp, const QuarterlySeries& indicator,
                                              const ForecastConfig& config);

/// h,n,rmse_model,rmse_ar1,ratio,dm_stat,dm_p,dm_p_one_sided
void write_forecast_report_csv(const std::vector<HorizonReport>& report, const std::filesystem::path& path);
/// h,origin,target,actual,model,ar1
void write_forecasts_csv(const std::vector<HorizonReport>& report, const std::filesystem::path& path);
/// lag,correlation plus avg_0_1 and avg_0_4 rows
void write_correlations_csv(const LagCorrelations& c, const std::filesystem::path& path);
/// h,quarter,cumulative
void write_crisis_csv(const std::vector<HorizonReport>& report, const std::filesystem::path& path);

}  // namespace outlook

#endif  // OUTLOOK_FORECAST_HPP_
