#include "fourvol/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

namespace fourvol {

double normal_cdf(double x) { return boost::math::cdf(boost::math::normal(), x); }

double normal_quantile(double p) { return boost::math::quantile(boost::math::normal(), p); }

double kolmogorov_tail(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test_normal(std::vector<double> x) {
  KsResult r;
  if (x.empty()) return r;
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double D = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = normal_cdf(x[i]);
    D = std::max({D, (i + 1) / n - F, F - i / n});
  }
  r.statistic = D;
  const double sn = std::sqrt(n);
  r.p_value = kolmogorov_tail((sn + 0.12 + 0.11 / sn) * D);
  return r;
}

KsResult ks_test_two_sample(std::vector<double> x, std::vector<double> y) {
  KsResult r;
  if (x.empty() || y.empty()) return r;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double D = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    D = std::max(D, std::fabs(i / nx - j / ny));
  }
  r.statistic = D;
  const double ne = std::sqrt(nx * ny / (nx + ny));
  r.p_value = kolmogorov_tail((ne + 0.12 + 0.11 / ne) * D);
  return r;
}

SampleSummary summarize(const std::vector<double>& x) {
  SampleSummary s;
  s.count = x.size();
  if (x.empty()) return s;
  const double n = static_cast<double>(x.size());
  for (double v : x) s.mean += v;
  s.mean /= n;
  double m2 = 0.0, m3 = 0.0;
  for (double v : x) {
    const double e = v - s.mean;
    m2 += e * e;
    m3 += e * e * e;
  }
  s.sd = x.size() > 1 ? std::sqrt(m2 / (n - 1.0)) : 0.0;
  const double pop = m2 / n;
  s.skew = pop > 0.0 ? (m3 / n) / std::pow(pop, 1.5) : 0.0;
  return s;
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace fourvol
