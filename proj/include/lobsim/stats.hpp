#pragma once
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "lobsim/types.hpp"

namespace lobsim::stats {

struct ReturnSeries {
  std::vector<double> values;
  Step delta_t{60};
};

// Streaming central moments up to fourth order, mergeable across series
// (pairwise combination), population convention throughout.
class Moments {
 public:
  Moments() = default;
  explicit Moments(std::span<const double> values) {
    for (double v : values) add(v);
  }

  void add(double x) noexcept;
  void merge(const Moments& other) noexcept;

  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return n_ ? m2_ / static_cast<double>(n_) : 0.0; }
  double std() const noexcept;
  // mu_4 / sigma^4 - 3. Throws std::domain_error when sigma = 0 or count < 4.
  double excess_kurtosis() const;

 private:
  std::size_t n_{0};
  double mean_{0.0};
  double m2_{0.0};
  double m3_{0.0};
  double m4_{0.0};
};

// r = (s(t+dt) - s(t)) / s(t) over non-overlapping windows of a per-step
// price series: s(0)->s(dt), s(dt)->s(2dt), ... Throws std::invalid_argument
// on a non-positive price or a series no longer than delta_t.
ReturnSeries returns(std::span<const double> prices, Step delta_t);

// g = (r - mean) / std. Throws std::domain_error on a degenerate series.
ReturnSeries normalize(const ReturnSeries& rs);

double mean(std::span<const double> values);
// Population standard deviation, two-pass.
double stddev(std::span<const double> values);
double excess_kurtosis(std::span<const double> values);

// Standard deviation of each window of `window_steps / delta_t` consecutive
// returns, sliding by one return. Empty when the window exceeds the series.
std::vector<double> moving_volatility(const ReturnSeries& rs, Step window_steps);

struct Histogram {
  std::vector<double> centers;
  std::vector<double> density;
  double bin_width{0.0};
};

// Freedman-Diaconis bin count, at least one bin.
std::size_t freedman_diaconis_bins(std::span<const double> values);
// Density-normalised histogram. bins = 0 selects Freedman-Diaconis.
Histogram estimate_pdf(std::span<const double> values, std::size_t bins = 0);

// (x, 1 - P(x)) for each distinct x in ascending order, with P the empirical
// CDF counting values <= x.
std::vector<std::pair<double, double>> estimate_ccdf(std::span<const double> values);

struct LogNormalFit {
  double location{0.0};  // mean of log
  double scale{0.0};     // population std. dev. of log
};

LogNormalFit lognormal_reference(std::span<const double> sigmas);
double lognormal_cdf(double x, const LogNormalFit& fit);
double normal_cdf(double x);

// sup |F_n - F| for a continuous reference CDF.
double ks_distance(std::span<const double> values, const std::function<double(double)>& cdf);

struct KsTwoSample {
  double statistic{0.0};
  double p_value{1.0};
};

// Two-sample Kolmogorov-Smirnov with the asymptotic p-value.
KsTwoSample ks_two_sample(std::span<const double> a, std::span<const double> b);

double spearman(std::span<const double> x, std::span<const double> y);

// Linear-interpolation (type 7) empirical quantile; q in [0, 1].
double quantile(std::span<const double> values, double q);

}  // namespace lobsim::stats
