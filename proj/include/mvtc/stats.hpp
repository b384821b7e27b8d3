#pragma once

#include <cstddef>
#include <vector>

namespace mvtc::stats {

/// CDF of Student's t with df degrees of freedom. df may be fractional.
double student_t_cdf(double t, double df);

/// Quantile (inverse CDF) of Student's t.
double student_t_quantile(double p, double df);

/// Two-sided p-value for a t statistic with df degrees of freedom.
double two_sided_t_pvalue(double t, double df);

/// Survival function Q(lambda) = P(K > lambda) of the asymptotic
/// Kolmogorov distribution, accurate to better than 1e-8.
double kolmogorov_survival(double lambda);

/// Linear-interpolation sample quantile (type 7) of sorted values.
double sorted_quantile(const std::vector<double>& sorted, double p);

}  // namespace mvtc::stats
