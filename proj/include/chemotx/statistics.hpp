// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "chemotx/detection.hpp"

namespace chemotx::stats {

/// Sample moments about the mean, with the standard error of the variance.
struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;     ///< unbiased (n - 1)
  double m4 = 0.0;           ///< fourth central moment
  double variance_se = 0.0;  ///< sqrt((m4 - var^2) / n)
  double mean_se = 0.0;
};

inline Moments moments(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("moments: need at least two samples");
  Moments m;
  m.n = xs.size();
  const auto n = static_cast<double>(m.n);
  // two-pass: mean first, then central sums
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / n;
  double s2 = 0.0, s4 = 0.0;
  for (double x : xs) {
    const double d = x - m.mean;
    const double d2 = d * d;
    s2 += d2;
    s4 += d2 * d2;
  }
  const double var_pop = s2 / n;
  m.variance = s2 / (n - 1.0);
  m.m4 = s4 / n;
  m.variance_se = std::sqrt(std::max(m.m4 - var_pop * var_pop, 0.0) / n);
  m.mean_se = std::sqrt(m.variance / n);
  return m;
}

/// One-sample Kolmogorov-Smirnov distance between `xs` and N(mean, sd^2).
inline double ks_distance_normal(std::span<const double> xs, double mean, double sd) {
  if (xs.empty()) throw std::invalid_argument("ks_distance_normal: empty sample");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double dmax = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = normal_cdf((sorted[i] - mean) / sd);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    dmax = std::max({dmax, hi - f, f - lo});
  }
  return dmax;
}

/// Asymptotic 1% critical value of the one-sample KS statistic.
inline double ks_critical_1pct(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  [[nodiscard]] bool contains(double v) const { return lo <= v && v <= hi; }
};

inline constexpr double kZ95 = 1.959963984540054;

/// Wilson score interval for a binomial proportion.
inline Interval wilson_interval(std::size_t successes, std::size_t n, double z = kZ95) {
  if (n == 0) throw std::invalid_argument("wilson_interval: n = 0");
  const auto nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {successes == 0 ? 0.0 : std::max(0.0, centre - half), successes == n ? 1.0 : std::min(1.0, centre + half)};
}

/// Ordinary least squares y = intercept + slope x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: bad sizes");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

/// Fixed-width density histogram over [lo, hi].
struct Histogram {
  std::vector<double> edges;
  std::vector<double> density;

  [[nodiscard]] double centre(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
};

inline Histogram density_histogram(std::span<const double> xs, double lo, double hi,
                                   std::size_t bins) {
  if (bins == 0 || !(hi > lo)) throw std::invalid_argument("density_histogram: bad range");
  Histogram h;
  h.edges.resize(bins + 1);
  h.density.assign(bins, 0.0);
  const double w = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + w * static_cast<double>(i);
  for (double x : xs) {
    if (x < lo || x > hi) continue;
    auto i = static_cast<std::size_t>((x - lo) / w);
    if (i == bins) --i;
    h.density[i] += 1.0;
  }
  const double norm = static_cast<double>(xs.size()) * w;
  for (double& v : h.density) v /= norm;
  return h;
}

/// Number of strict interior local maxima of a sampled curve.
inline std::size_t count_local_maxima(std::span<const double> ys) {
  std::size_t count = 0;
  for (std::size_t i = 1; i + 1 < ys.size(); ++i) {
    if (ys[i] > ys[i - 1] && ys[i] >= ys[i + 1]) ++count;
  }
  return count;
}

/// `n` log-spaced points over [lo, hi], endpoints included.
inline std::vector<double> geomspace(double lo, double hi, std::size_t n) {
  if (n < 2 || !(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("geomspace: bad range");
  std::vector<double> v(n);
  const double r = std::log(hi / lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo * std::exp(r * static_cast<double>(i));
  v.back() = hi;
  return v;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n < 2 || !(hi > lo)) throw std::invalid_argument("linspace: bad range");
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

}  // namespace chemotx::stats
