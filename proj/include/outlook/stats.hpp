#ifndef OUTLOOK_STATS_HPP_
#define OUTLOOK_STATS_HPP_

#include "outlook/common.hpp"

#include <optional>

namespace outlook
{

/// Pearson correlation; nullopt for fewer than two points or zero variance.
std::optional<double> pearson(const VectorX<double>& a, const VectorX<double>& b);

/// Mid-ranks (1-based, ties averaged).
VectorX<double> ranks(const VectorX<double>& v);

/// Spearman rank correlation (Pearson over mid-ranks).
std::optional<double> spearman(const VectorX<double>& a, const VectorX<double>& b);

double normal_cdf(double z);

/// Student t distribution CDF with `dof` degrees of freedom.
double student_t_cdf(double t, double dof);

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

}  // namespace outlook

#endif  // OUTLOOK_STATS_HPP_
