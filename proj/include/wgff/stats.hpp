#pragma once

// Sample statistics and goodness-of-fit tests used by the samplers' checks and the acceptance suite.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "wgff/error.hpp"

namespace wgff {

/// Welford accumulator; mergeable so per-worker partial results can be reduced in a fixed order.
class Moments {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / n_;
    m2_ += d * (x - mean_);
  }

  void merge(const Moments& o) {
    if (o.n_ == 0) return;
    const double n = n_ + o.n_;
    const double d = o.mean_ - mean_;
    mean_ += d * o.n_ / n;
    m2_ += o.m2_ + d * d * n_ * o.n_ / n;
    n_ += o.n_;
  }

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / (n_ - 1) : 0.0; }
  double stddev() const { return std::sqrt(variance()); }
  double se() const { return n_ > 0 ? std::sqrt(variance() / n_) : 0.0; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0;
  double m2_ = 0;
};

inline double mean_of(const std::vector<double>& x) {
  require(!x.empty(), "empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / x.size();
}

inline double variance_of(const std::vector<double>& x) {
  require(x.size() > 1, "need at least two samples");
  const double m = mean_of(x);
  double s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return s / (x.size() - 1);
}

struct Estimate {
  double value = 0;
  double se = 0;
};

/// Delete-one jackknife for a statistic of the full sample (given as row indices into the caller's data).
/// `stat` receives the index of the left-out row, or -1 for the full sample.
inline Estimate jackknife(std::size_t n, const std::function<double(long)>& stat) {
  require(n >= 2, "jackknife needs at least two samples");
  const double full = stat(-1);
  std::vector<double> loo(n);
  for (std::size_t i = 0; i < n; ++i) loo[i] = stat(static_cast<long>(i));
  const double m = mean_of(loo);
  double s = 0;
  for (double v : loo) s += (v - m) * (v - m);
  return {full, std::sqrt((n - 1.0) / n * s)};
}

/// Jackknife of a statistic that is a smooth function of sample means of per-row features.
/// Leave-one-out means are obtained in O(1) from the totals, so the cost is O(n * features).
inline Estimate jackknife_means(const std::vector<std::vector<double>>& rows,
                                const std::function<double(const std::vector<double>&)>& f) {
  const std::size_t n = rows.size();
  require(n >= 2, "jackknife needs at least two samples");
  const std::size_t k = rows[0].size();
  std::vector<double> total(k, 0.0);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < k; ++j) total[j] += r[j];
  std::vector<double> m(k);
  for (std::size_t j = 0; j < k; ++j) m[j] = total[j] / n;
  const double full = f(m);
  std::vector<double> loo(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) m[j] = (total[j] - rows[i][j]) / (n - 1.0);
    loo[i] = f(m);
  }
  const double lm = mean_of(loo);
  double s = 0;
  for (double v : loo) s += (v - lm) * (v - lm);
  return {full, std::sqrt((n - 1.0) / n * s)};
}

/// Jackknife SE of the unbiased sample variance.
inline Estimate variance_jackknife(const std::vector<double>& x) {
  std::vector<std::vector<double>> rows;
  rows.reserve(x.size());
  for (double v : x) rows.push_back({v, v * v});
  const double n = static_cast<double>(x.size());
  return jackknife_means(rows, [n](const std::vector<double>& m) { return (m[1] - m[0] * m[0]) * n / (n - 1); });
}

/// Jackknife SE of the sample covariance.
inline Estimate covariance_jackknife(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), "covariance needs paired samples");
  std::vector<std::vector<double>> rows;
  rows.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) rows.push_back({x[i], y[i], x[i] * y[i]});
  const double n = static_cast<double>(x.size());
  return jackknife_means(rows, [n](const std::vector<double>& m) { return (m[2] - m[0] * m[1]) * n / (n - 1); });
}

struct TestResult {
  double statistic = 0;
  double p_value = 1;
  int dof = 0;
};

/// Pearson chi-square goodness of fit; cells with expected count below `min_expected` are pooled.
inline TestResult chi_square_gof(const std::vector<double>& observed, const std::vector<double>& probs,
                                 double min_expected = 5.0) {
  require(observed.size() == probs.size() && !observed.empty(), "observed and expected sizes differ");
  const double n = std::accumulate(observed.begin(), observed.end(), 0.0);
  const double ptot = std::accumulate(probs.begin(), probs.end(), 0.0);
  std::vector<std::size_t> idx(observed.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });
  std::vector<std::pair<double, double>> cells;  // (observed, expected)
  double po = 0, pe = 0;
  for (std::size_t i : idx) {
    const double e = n * probs[i] / ptot;
    if (e >= min_expected) {
      cells.emplace_back(observed[i], e);
    } else {
      po += observed[i];
      pe += e;
      if (pe >= min_expected) cells.emplace_back(po, pe), po = pe = 0;
    }
  }
  if (pe > 0) {
    if (cells.empty()) cells.emplace_back(po, pe);
    else cells.back().first += po, cells.back().second += pe;
  }
  TestResult r;
  for (auto [o, e] : cells) r.statistic += (o - e) * (o - e) / e;
  r.dof = static_cast<int>(cells.size()) - 1;
  if (r.dof < 1) return r;
  r.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(r.dof), r.statistic));
  return r;
}

/// Two-sample chi-square homogeneity test on category counts; sparse categories are pooled.
inline TestResult chi_square_two_sample(const std::vector<double>& a, const std::vector<double>& b,
                                        double min_expected = 5.0) {
  require(a.size() == b.size() && !a.empty(), "count vectors differ in size");
  const double na = std::accumulate(a.begin(), a.end(), 0.0), nb = std::accumulate(b.begin(), b.end(), 0.0);
  const double n = na + nb;
  std::vector<std::size_t> idx(a.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return a[i] + b[i] > a[j] + b[j]; });
  std::vector<std::pair<double, double>> cells;
  double pa = 0, pb = 0;
  for (std::size_t i : idx) {
    const double tot = a[i] + b[i];
    if (std::min(na, nb) * tot / n >= min_expected) {
      cells.emplace_back(a[i], b[i]);
    } else {
      pa += a[i];
      pb += b[i];
      if (std::min(na, nb) * (pa + pb) / n >= min_expected) cells.emplace_back(pa, pb), pa = pb = 0;
    }
  }
  if (pa + pb > 0) {
    if (cells.empty()) cells.emplace_back(pa, pb);
    else cells.back().first += pa, cells.back().second += pb;
  }
  TestResult r;
  for (auto [x, y] : cells) {
    const double tot = x + y;
    if (tot == 0) continue;
    const double ex = na * tot / n, ey = nb * tot / n;
    r.statistic += (x - ex) * (x - ex) / ex + (y - ey) * (y - ey) / ey;
  }
  r.dof = static_cast<int>(cells.size()) - 1;
  if (r.dof < 1) return r;
  r.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(r.dof), r.statistic));
  return r;
}

/// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
inline double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? 2 : -2) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

/// Two-sample Kolmogorov-Smirnov test (asymptotic p-value with the Stephens small-sample correction).
inline TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), "empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  const double ne = double(a.size()) * b.size() / (a.size() + b.size());
  const double sq = std::sqrt(ne);
  TestResult r;
  r.statistic = d;
  r.p_value = kolmogorov_q((sq + 0.12 + 0.11 / sq) * d);
  return r;
}

/// Anderson-Darling normality test with mean and variance estimated from the sample
/// (modified statistic A*^2 and the D'Agostino-Stephens p-value approximation).
inline TestResult anderson_darling_normal(std::vector<double> x) {
  const std::size_t n = x.size();
  require(n >= 8, "Anderson-Darling needs at least 8 samples");
  const double m = mean_of(x), s = std::sqrt(variance_of(x));
  require(s > 0, "sample has zero variance");
  std::sort(x.begin(), x.end());
  const boost::math::normal nd;
  double a2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double zi = (x[i] - m) / s, zj = (x[n - 1 - i] - m) / s;
    const double lf = std::log(std::max(boost::math::cdf(nd, zi), 1e-300));
    const double ls = std::log(std::max(boost::math::cdf(boost::math::complement(nd, zj)), 1e-300));
    a2 += (2.0 * (i + 1) - 1) * (lf + ls);
  }
  a2 = -double(n) - a2 / n;
  const double as = a2 * (1 + 0.75 / n + 2.25 / (double(n) * n));
  double p;
  if (as >= 0.6) p = std::exp(1.2937 - 5.709 * as + 0.0186 * as * as);
  else if (as >= 0.34) p = std::exp(0.9177 - 4.279 * as - 1.38 * as * as);
  else if (as >= 0.2) p = 1 - std::exp(-8.318 + 42.796 * as - 59.938 * as * as);
  else p = 1 - std::exp(-13.436 + 101.14 * as - 223.73 * as * as);
  TestResult r;
  r.statistic = as;
  r.p_value = std::clamp(p, 0.0, 1.0);
  return r;
}

/// Counts occurrences of hashable keys; used to build empirical distributions over discrete objects.
template <class Key>
class Histogram {
 public:
  void add(const Key& k) { ++counts_[k]; ++total_; }
  double count(const Key& k) const {
    auto it = counts_.find(k);
    return it == counts_.end() ? 0.0 : double(it->second);
  }
  std::size_t total() const { return total_; }
  std::size_t distinct() const { return counts_.size(); }
  const std::map<Key, std::size_t>& counts() const { return counts_; }

 private:
  std::map<Key, std::size_t> counts_;
  std::size_t total_ = 0;
};

}  // namespace wgff
