#include "outlook/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace outlook
{

std::optional<double> pearson(const VectorX<double>& a, const VectorX<double>& b)
{
  if (a.size() != b.size()) throw DimensionError("pearson: length mismatch");
  if (a.size() < 2) return std::nullopt;
  const VectorX<double> ca = a.array() - a.mean();
  const VectorX<double> cb = b.array() - b.mean();
  const double den = ca.norm() * cb.norm();
  if (!(den > 0)) return std::nullopt;
  return std::clamp(ca.dot(cb) / den, -1.0, 1.0);
}

VectorX<double> ranks(const VectorX<double>& v)
{
  const auto n = static_cast<std::size_t>(v.size());
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return v(i) < v(j); });
  VectorX<double> r(v.size());
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v(order[j + 1]) == v(order[i])) ++j;
    const double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) r(order[k]) = mid;
    i = j + 1;
  }
  return r;
}

std::optional<double> spearman(const VectorX<double>& a, const VectorX<double>& b)
{
  if (a.size() != b.size()) throw DimensionError("spearman: length mismatch");
  return pearson(ranks(a), ranks(b));
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

namespace
{

// Continued fraction for the incomplete beta (modified Lentz).
double beta_continued_fraction(double a, double b, double x)
{
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-15;
  const double qab = a + b, qap = a + 1, qam = a - 1;
  double c = 1, d = 1 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x)
{
  if (x <= 0) return 0;
  if (x >= 1) return 1;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1) / (a + b + 2)) return front * beta_continued_fraction(a, b, x) / a;
  return 1 - front * beta_continued_fraction(b, a, 1 - x) / b;
}

double student_t_cdf(double t, double dof)
{
  if (!(dof > 0)) throw Error("student t: degrees of freedom must be positive");
  const double x = dof / (dof + t * t);
  const double tail = 0.5 * incomplete_beta(dof / 2, 0.5, x);
  return t > 0 ? 1 - tail : tail;
}

}  // namespace outlook
