#pragma once

#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace testsupport {

// Two-sided one-sample Kolmogorov-Smirnov: statistic and asymptotic p-value.
struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

inline double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

inline KsResult ks_test(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  const double sn = std::sqrt(n);
  return {d, kolmogorov_q((sn + 0.12 + 0.11 / sn) * d)};
}

// Effective sample size from non-overlapping batch means.
inline double batch_means_ess(const std::vector<double>& x) {
  const std::size_t n = x.size();
  const std::size_t b = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(n))));
  const std::size_t a = n / b;
  double mean = 0.0;
  for (std::size_t i = 0; i < a * b; ++i) mean += x[i];
  mean /= static_cast<double>(a * b);
  double var = 0.0;
  for (std::size_t i = 0; i < a * b; ++i) var += (x[i] - mean) * (x[i] - mean);
  var /= static_cast<double>(a * b - 1);
  double bm = 0.0;
  for (std::size_t k = 0; k < a; ++k) {
    double m = 0.0;
    for (std::size_t i = 0; i < b; ++i) m += x[k * b + i];
    m /= static_cast<double>(b);
    bm += (m - mean) * (m - mean);
  }
  bm = bm / static_cast<double>(a - 1) * static_cast<double>(b);
  if (!(bm > 0.0) || !(var > 0.0)) return static_cast<double>(n);
  return std::min(static_cast<double>(n), static_cast<double>(n) * var / bm);
}

// Monte-Carlo standard error of a chain mean.
inline double mcse(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= n - 1.0;
  return std::sqrt(var / batch_means_ess(x));
}

inline double mean_of(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<>(), p);
}

inline double correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::ArrayXd x = a.array() - a.mean();
  const Eigen::ArrayXd y = b.array() - b.mean();
  return (x * y).sum() / std::sqrt((x * x).sum() * (y * y).sum());
}

}  // namespace testsupport
