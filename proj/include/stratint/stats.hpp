#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace stratint {

inline double mean(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("mean: empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

// Unbiased sample variance (n - 1 in the denominator).
inline double sample_variance(const std::vector<double>& xs) {
  if (xs.size() < 2) throw std::invalid_argument("sample_variance: needs n >= 2");
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

inline double central_moment(const std::vector<double>& xs, int k) {
  if (xs.empty()) throw std::invalid_argument("central_moment: empty sample");
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += std::pow(x - m, k);
  return s / static_cast<double>(xs.size());
}

// Standard error of the sample variance, sqrt((m4 - s^4) / n), from the
// empirical fourth central moment.
inline double variance_standard_error(const std::vector<double>& xs) {
  const double s2 = sample_variance(xs);
  const double m4 = central_moment(xs, 4);
  return std::sqrt(std::max(0.0, m4 - s2 * s2) / static_cast<double>(xs.size()));
}

inline double median(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("median: empty sample");
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  if (n % 2 == 1) return xs[n / 2];
  return 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RateFit {
  double slope = 0.0;  // d log(err) / d log(m)
  int used = 0;
  int excluded = 0;  // non-positive errors cannot enter the log-log fit
};

// Least-squares slope of log(err) against log(m). Points with err <= 0 are
// excluded; fewer than 3 usable points is an error.
inline RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
  std::vector<double> lx, ly;
  int excluded = 0;
  for (const auto& [m, err] : points) {
    if (!(m > 0.0)) throw std::invalid_argument("fit_rate: m must be positive");
    if (err > 0.0) {
      lx.push_back(std::log(m));
      ly.push_back(std::log(err));
    } else {
      ++excluded;
    }
  }
  if (lx.size() < 3)
    throw FitError("fit_rate: fewer than 3 usable (m, err) points");
  const double mx = mean(lx);
  const double my = mean(ly);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw FitError("fit_rate: degenerate abscissae");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.used = static_cast<int>(lx.size());
  fit.excluded = excluded;
  return fit;
}

}  // namespace stratint
