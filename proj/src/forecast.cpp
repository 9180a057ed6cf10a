#include "outlook/forecast.hpp"

#include "outlook/io.hpp"
#include "outlook/stats.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace outlook
{

std::optional<double> QuarterlySeries::at(const Quarter& q) const
{
  const auto it = std::lower_bound(quarters.begin(), quarters.end(), q);
  if (it == quarters.end() || *it != q) return std::nullopt;
  return values[static_cast<std::size_t>(it - quarters.begin())];
}

void QuarterlySeries::push(const Quarter& q, double v, bool is_partial)
{
  if (!quarters.empty() && !(quarters.back() < q)) throw Error("quarters must be strictly increasing");
  if (!std::isfinite(v)) throw Error("non-finite value for " + format_quarter(q));
  quarters.push_back(q);
  values.push_back(v);
  partial.push_back(is_partial);
}

QuarterlyMode parse_quarterly_mode(std::string_view s)
{
  if (s == "month_m" || s == "month") return QuarterlyMode::month_m;
  if (s == "three_month_mean" || s == "mean") return QuarterlyMode::three_month_mean;
  throw Error("unknown quarterly mode '" + std::string(s) + "'");
}

QuarterlySeries monthly_to_quarterly(const IndicatorSeries& monthly, QuarterlyMode mode, int m)
{
  if (monthly.frequency == Frequency::daily_mtd) throw Error("quarterly conversion needs a monthly series");
  if (mode == QuarterlyMode::month_m) {
    if (m < 1 || m > 3) throw Error("month-in-quarter must be 1, 2 or 3");
    if (m == 3 && !window_days(monthly.frequency))
      throw Error("month 3 of the quarter is only available for partial-month variants");
  }
  std::map<Quarter, std::vector<std::pair<int, double>>> by_quarter;
  for (const auto& p : monthly.points) {
    const YearMonth ym = YearMonth::of(p.period);
    const Quarter q = Quarter::of(ym);
    by_quarter[q].emplace_back(static_cast<int>(ym.month - q.month(1).month) + 1, p.value);
  }
  QuarterlySeries out;
  out.kind = SeriesKind::indicator_quarterly;
  for (const auto& [q, months] : by_quarter) {
    if (mode == QuarterlyMode::month_m) {
      for (const auto& [pos, v] : months)
        if (pos == m) out.push(q, v);
    } else {
      std::vector<double> vals;
      for (const auto& mv : months) vals.push_back(mv.second);
      out.push(q, order_free_mean(vals), vals.size() < 3);
    }
  }
  return out;
}

GdpSeries read_gdp_csv(const std::filesystem::path& path)
{
  const CsvTable t = read_csv(path);
  const auto cq = t.column("quarter"), cy = t.column("yoy_growth"), cg = t.column("qoq_growth");
  GdpSeries g;
  g.yoy.kind = SeriesKind::gdp_yoy;
  g.qoq.kind = SeriesKind::gdp_qoq;
  for (const auto& row : t.rows) {
    const Quarter q = parse_quarter(row[cq]);
    if (!trim(row[cy]).empty()) g.yoy.push(q, parse_double(row[cy]));
    if (!trim(row[cg]).empty()) g.qoq.push(q, parse_double(row[cg]));
  }
  return g;
}

void write_gdp_csv(const GdpSeries& gdp, const std::filesystem::path& path)
{
  std::map<Quarter, std::pair<std::string, std::string>> rows;
  for (std::size_t i = 0; i < gdp.yoy.size(); ++i) rows[gdp.yoy.quarters[i]].first = format_double(gdp.yoy.values[i]);
  for (std::size_t i = 0; i < gdp.qoq.size(); ++i) rows[gdp.qoq.quarters[i]].second = format_double(gdp.qoq.values[i]);
  std::string out = "quarter,yoy_growth,qoq_growth\n";
  for (const auto& [q, v] : rows) out += format_quarter(q) + "," + v.first + "," + v.second + "\n";
  write_text(path, out);
}

QuarterlySeries read_quarterly_csv(const std::filesystem::path& path)
{
  const CsvTable t = read_csv(path);
  const auto cq = t.column("quarter"), cv = t.column("value");
  QuarterlySeries s;
  for (const auto& row : t.rows) s.push(parse_quarter(row[cq]), parse_double(row[cv]));
  return s;
}

OlsFit ols_fit(const VectorX<double>& y, const MatrixX<double>& X)
{
  if (y.size() != X.rows()) throw DimensionError("ols: response/design length mismatch");
  if (X.rows() < X.cols())
    throw Error("ols: " + std::to_string(X.rows()) + " observations for " + std::to_string(X.cols()) + " coefficients");
  Eigen::ColPivHouseholderQR<MatrixX<double>> qr(X);
  if (qr.rank() < X.cols()) throw Error("ols: design matrix is rank deficient");
  OlsFit f;
  f.coefficients = qr.solve(y);
  f.residuals = y - X * f.coefficients;
  return f;
}

namespace
{

// Series laid out on a dense quarter grid.
struct Grid
{
  int base = 0;
  std::vector<std::optional<double>> y, x;

  std::optional<double> get(const std::vector<std::optional<double>>& v, int idx) const
  {
    const int k = idx - base;
    if (k < 0 || k >= static_cast<int>(v.size())) return std::nullopt;
    return v[static_cast<std::size_t>(k)];
  }
  std::optional<double> Y(int idx) const { return get(y, idx); }
  std::optional<double> X(int idx) const { return get(x, idx); }
};

Grid make_grid(const QuarterlySeries& gdp, const QuarterlySeries* indicator)
{
  Grid g;
  if (gdp.quarters.empty()) return g;
  int lo = gdp.quarters.front().index(), hi = gdp.quarters.back().index();
  if (indicator && !indicator->quarters.empty()) {
    lo = std::min(lo, indicator->quarters.front().index());
    hi = std::max(hi, indicator->quarters.back().index());
  }
  g.base = lo;
  g.y.resize(static_cast<std::size_t>(hi - lo + 1));
  g.x.resize(g.y.size());
  for (std::size_t i = 0; i < gdp.size(); ++i) g.y[static_cast<std::size_t>(gdp.quarters[i].index() - lo)] = gdp.values[i];
  if (indicator)
    for (std::size_t i = 0; i < indicator->size(); ++i)
      g.x[static_cast<std::size_t>(indicator->quarters[i].index() - lo)] = indicator->values[i];
  return g;
}

// Direct forecast at origin t. Rows need x when `require_x`; the x column enters when `use_x`.
std::optional<double> direct_forecast(const Grid& g, int first_gdp, int h, int t, int initial_window, bool require_x,
                                      bool use_x)
{
  if (t - first_gdp < initial_window) return std::nullopt;
  const auto y_last = g.Y(t - 1);
  const auto x_now = g.X(t);
  if (!y_last || (require_x && !x_now)) return std::nullopt;

  std::vector<int> rows;
  for (int s = first_gdp + 1; s + h <= t - 1; ++s)
    if (g.Y(s + h) && g.Y(s - 1) && (!require_x || g.X(s))) rows.push_back(s);
  const Eigen::Index p = use_x ? 3 : 2;
  if (static_cast<Eigen::Index>(rows.size()) < p) return std::nullopt;

  MatrixX<double> X(static_cast<Eigen::Index>(rows.size()), p);
  VectorX<double> y(X.rows());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto i = static_cast<Eigen::Index>(r);
    const int s = rows[r];
    y(i) = *g.Y(s + h);
    X(i, 0) = 1.0;
    X(i, 1) = *g.Y(s - 1);
    if (use_x) X(i, 2) = *g.X(s);
  }
  const VectorX<double> b = ols_fit(y, X).coefficients;
  double f = b(0) + b(1) * *y_last;
  if (use_x) f += b(2) * *x_now;
  return f;
}

}  // namespace

std::optional<double> forecast_at(const QuarterlySeries& gdp, const QuarterlySeries* indicator, int h, const Quarter& origin,
                                  int initial_window)
{
  if (h < 0) throw Error("horizon must be non-negative");
  if (gdp.quarters.empty()) return std::nullopt;
  const Grid g = make_grid(gdp, indicator);
  const bool with_x = indicator != nullptr;
  return direct_forecast(g, gdp.quarters.front().index(), h, origin.index(), initial_window, with_x, with_x);
}

std::vector<QuarterForecast> expanding_forecast(const QuarterlySeries& gdp, const QuarterlySeries& indicator, int h,
                                                int initial_window)
{
  if (h < 0) throw Error("horizon must be non-negative");
  if (initial_window < 1) throw Error("initial window must be positive");
  std::vector<QuarterForecast> out;
  if (gdp.quarters.empty()) throw Error("empty GDP series");
  const Grid g = make_grid(gdp, &indicator);
  const int first = gdp.quarters.front().index();
  const int last = gdp.quarters.back().index();
  for (int t = first + initial_window; t + h <= last; ++t) {
    const auto actual = g.Y(t + h);
    if (!actual) continue;
    const auto model = direct_forecast(g, first, h, t, initial_window, true, true);
    const auto bench = direct_forecast(g, first, h, t, initial_window, true, false);
    if (!model || !bench) continue;
    out.push_back({Quarter::from_index(t), Quarter::from_index(t + h), *actual, *model, *bench});
  }
  if (out.empty())
    throw Error("insufficient history for h=" + std::to_string(h) + ": no origin has " + std::to_string(initial_window) +
                " quarters of usable data");
  return out;
}

double rmse(const VectorX<double>& errors)
{
  if (errors.size() == 0) throw Error("rmse of empty error vector");
  return std::sqrt(errors.squaredNorm() / static_cast<double>(errors.size()));
}

double rmse_ratio(const VectorX<double>& model_errors, const VectorX<double>& benchmark_errors)
{
  if (model_errors.size() != benchmark_errors.size()) throw DimensionError("rmse_ratio: length mismatch");
  const double a = rmse(model_errors), b = rmse(benchmark_errors);
  if (b == 0) return a == 0 ? 1.0 : std::numeric_limits<double>::infinity();
  return a / b;
}

DmResult dm_test(const VectorX<double>& e1, const VectorX<double>& e2, int h, int lag, bool small_sample)
{
  if (e1.size() != e2.size()) throw DimensionError("dm_test: length mismatch");
  const auto n = static_cast<std::size_t>(e1.size());
  if (n < 8) throw Error("dm_test needs at least 8 paired errors, got " + std::to_string(n));
  DmResult r;
  r.n = n;
  r.lag = lag > 0 ? lag : std::max(h, 1);
  const VectorX<double> d = e1.array().square() - e2.array().square();
  const double nd = static_cast<double>(n);
  const double mean = d.mean();
  const VectorX<double> c = d.array() - mean;
  double v = c.squaredNorm() / nd;
  for (int k = 1; k <= r.lag && k < static_cast<int>(n); ++k) {
    const double gamma = c.head(static_cast<Eigen::Index>(n) - k).dot(c.tail(static_cast<Eigen::Index>(n) - k)) / nd;
    v += 2.0 * (1.0 - static_cast<double>(k) / (r.lag + 1.0)) * gamma;
  }
  if (!(v > 0) || d.maxCoeff() == d.minCoeff()) {
    r.degenerate = true;
    if (mean == 0) {
      r.statistic = 0;
      r.p_value = 1;
      r.p_value_one_sided = 0.5;
    } else {
      r.statistic = mean < 0 ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
      r.p_value = 0;
      r.p_value_one_sided = mean < 0 ? 0 : 1;
      r.warning = "loss differential has zero variance but non-zero mean";
    }
    return r;
  }
  r.statistic = mean / std::sqrt(v / nd);
  if (small_sample) {
    const double hh = static_cast<double>(std::max(h, 1));
    r.statistic *= std::sqrt((nd + 1 - 2 * hh + hh * (hh - 1) / nd) / nd);
    const double lower = student_t_cdf(r.statistic, nd - 1);
    r.p_value_one_sided = lower;
    r.p_value = 2 * std::min(lower, 1 - lower);
  } else {
    r.p_value_one_sided = normal_cdf(r.statistic);
    r.p_value = 2 * normal_cdf(-std::abs(r.statistic));
  }
  r.p_value = std::clamp(r.p_value, 0.0, 1.0);
  return r;
}

LagCorrelations lag_correlations(const QuarterlySeries& gdp, const QuarterlySeries& indicator, int max_lag)
{
  if (max_lag < 0) throw Error("max lag must be non-negative");
  LagCorrelations out;
  for (int lag = 0; lag <= max_lag; ++lag) {
    std::vector<double> a, b;
    for (std::size_t i = 0; i < gdp.size(); ++i) {
      const auto x = indicator.at(Quarter::from_index(gdp.quarters[i].index() - lag));
      if (!x) continue;
      a.push_back(gdp.values[i]);
      b.push_back(*x);
    }
    if (a.size() < 3) {
      out.by_lag.emplace_back(std::nullopt);
      continue;
    }
    out.by_lag.push_back(pearson(Eigen::Map<VectorX<double>>(a.data(), static_cast<Eigen::Index>(a.size())),
                                 Eigen::Map<VectorX<double>>(b.data(), static_cast<Eigen::Index>(b.size()))));
  }
  auto average = [&](int upto) -> std::optional<double> {
    if (upto > max_lag) return std::nullopt;
    double s = 0;
    for (int lag = 0; lag <= upto; ++lag) {
      if (!out.by_lag[static_cast<std::size_t>(lag)]) return std::nullopt;
      s += *out.by_lag[static_cast<std::size_t>(lag)];
    }
    return s / (upto + 1);
  };
  out.average_short = average(1);
  out.average_all = average(max_lag);
  return out;
}

std::vector<std::pair<Quarter, double>> crisis_diagnostic(const VectorX<double>& model_errors,
                                                          const VectorX<double>& benchmark_errors,
                                                          const std::vector<Quarter>& quarters)
{
  if (model_errors.size() != benchmark_errors.size() || static_cast<std::size_t>(model_errors.size()) != quarters.size())
    throw DimensionError("crisis_diagnostic: length mismatch");
  std::vector<std::pair<Quarter, double>> out;
  double acc = 0;
  for (std::size_t i = 0; i < quarters.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    acc += model_errors(k) * model_errors(k) - benchmark_errors(k) * benchmark_errors(k);
    out.emplace_back(quarters[i], acc);
  }
  return out;
}

std::vector<HorizonReport> evaluate_forecasts(const QuarterlySeries& gdp, const QuarterlySeries& indicator,
                                              const ForecastConfig& config)
{
  std::vector<HorizonReport> out;
  for (int h : config.horizons) {
    HorizonReport r;
    r.h = h;
    r.forecasts = expanding_forecast(gdp, indicator, h, config.initial_window);
    if (r.forecasts.empty())
      throw Error("insufficient history for horizon " + std::to_string(h) + ": no usable forecast origin");
    r.n = r.forecasts.size();
    VectorX<double> em(static_cast<Eigen::Index>(r.n)), eb(static_cast<Eigen::Index>(r.n));
    for (std::size_t i = 0; i < r.n; ++i) {
      em(static_cast<Eigen::Index>(i)) = r.forecasts[i].model_error();
      eb(static_cast<Eigen::Index>(i)) = r.forecasts[i].benchmark_error();
    }
    r.rmse_model = rmse(em);
    r.rmse_benchmark = rmse(eb);
    r.ratio = rmse_ratio(em, eb);
    if (r.n >= 8) r.dm = dm_test(em, eb, h, config.hac_lag, config.small_sample);
    out.push_back(std::move(r));
  }
  return out;
}

void write_forecast_report_csv(const std::vector<HorizonReport>& report, const std::filesystem::path& path)
{
  std::string out = "h,n,rmse_model,rmse_ar1,ratio,dm_stat,dm_p,dm_p_one_sided\n";
  for (const auto& r : report) {
    out += std::to_string(r.h) + "," + std::to_string(r.n) + "," + format_double(r.rmse_model) + "," +
           format_double(r.rmse_benchmark) + "," + format_double(r.ratio) + ",";
    if (r.dm)
      out += format_double(r.dm->statistic) + "," + format_double(r.dm->p_value) + "," + format_double(r.dm->p_value_one_sided);
    else
      out += ",,";
    out += "\n";
  }
  write_text(path, out);
}

void write_forecasts_csv(const std::vector<HorizonReport>& report, const std::filesystem::path& path)
{
  std::string out = "h,origin,target,actual,model,ar1\n";
  for (const auto& r : report)
    for (const auto& f : r.forecasts)
      out += std::to_string(r.h) + "," + format_quarter(f.origin) + "," + format_quarter(f.target) + "," +
             format_double(f.actual) + "," + format_double(f.model) + "," + format_double(f.benchmark) + "\n";
  write_text(path, out);
}

void write_correlations_csv(const LagCorrelations& c, const std::filesystem::path& path)
{
  auto cell = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  std::string out = "lag,correlation\n";
  for (std::size_t lag = 0; lag < c.by_lag.size(); ++lag) out += std::to_string(lag) + "," + cell(c.by_lag[lag]) + "\n";
  out += "avg_0_1," + cell(c.average_short) + "\n";
  out += "avg_0_" + std::to_string(c.by_lag.empty() ? 0 : c.by_lag.size() - 1) + "," + cell(c.average_all) + "\n";
  write_text(path, out);
}

void write_crisis_csv(const std::vector<HorizonReport>& report, const std::filesystem::path& path)
{
  std::string out = "h,quarter,cumulative\n";
  for (const auto& r : report) {
    VectorX<double> em(static_cast<Eigen::Index>(r.n)), eb(static_cast<Eigen::Index>(r.n));
    std::vector<Quarter> qs;
    for (std::size_t i = 0; i < r.n; ++i) {
      em(static_cast<Eigen::Index>(i)) = r.forecasts[i].model_error();
      eb(static_cast<Eigen::Index>(i)) = r.forecasts[i].benchmark_error();
      qs.push_back(r.forecasts[i].target);
    }
    for (const auto& [q, v] : crisis_diagnostic(em, eb, qs))
      out += std::to_string(r.h) + "," + format_quarter(q) + "," + format_double(v) + "\n";
  }
  write_text(path, out);
}

}  // namespace outlook
