#include "mvtc/stats.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "mvtc/errors.hpp"

namespace mvtc::stats {

double student_t_cdf(double t, double df) {
  if (df <= 0) throw DegreesOfFreedomError("Student-t df must be positive");
  boost::math::students_t dist(df);
  return boost::math::cdf(dist, t);
}

double student_t_quantile(double p, double df) {
  if (df <= 0) throw DegreesOfFreedomError("Student-t df must be positive");
  if (p <= 0.0 || p >= 1.0)
    throw DegenerateError("quantile probability must lie in (0,1)");
  boost::math::students_t dist(df);
  return boost::math::quantile(dist, p);
}

double two_sided_t_pvalue(double t, double df) {
  if (df <= 0) throw DegreesOfFreedomError("Student-t df must be positive");
  boost::math::students_t dist(df);
  double tail = boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  return std::min(1.0, 2.0 * tail);
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.755) {
    // dual theta series, fast for small lambda
    double s = 0.0;
    const double f = M_PI * M_PI / (8.0 * lambda * lambda);
    for (int k = 1; k <= 20; k += 2) {
      double term = std::exp(-f * k * k);
      if (term < 1e-18) break;
      s += term;
    }
    return 1.0 - std::sqrt(2.0 * M_PI) / lambda * s;
  }
  double s = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    double term = std::exp(-2.0 * k * k * lambda * lambda);
    if (term < 1e-18) break;
    s += sign * term;
    sign = -sign;
  }
  double q = 2.0 * s;
  return std::min(1.0, std::max(0.0, q));
}

double sorted_quantile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw DegenerateError("quantile of empty sample");
  if (p <= 0.0) return sorted.front();
  if (p >= 1.0) return sorted.back();
  const double h = p * (static_cast<double>(sorted.size()) - 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double w = h - static_cast<double>(lo);
  return (1.0 - w) * sorted[lo] + w * sorted[hi];
}

}  // namespace mvtc::stats
