#pragma once

#include <vector>

namespace fourvol {

double normal_cdf(double x);
double normal_quantile(double p);

/// Asymptotic Kolmogorov tail P(K > lambda).
double kolmogorov_tail(double lambda);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample test against N(0, 1).
KsResult ks_test_normal(std::vector<double> x);
KsResult ks_test_two_sample(std::vector<double> x, std::vector<double> y);

struct SampleSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;
  double skew = 0.0;
};

SampleSummary summarize(const std::vector<double>& x);

/// Least-squares slope of y on x.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace fourvol
