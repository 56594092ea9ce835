#include "lobsim/stats.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lobsim::stats {

void Moments::add(double x) noexcept {
  const auto n1 = static_cast<double>(n_);
  ++n_;
  const auto n = static_cast<double>(n_);
  const double delta = x - mean_;
  const double delta_n = delta / n;
  const double delta_n2 = delta_n * delta_n;
  const double term1 = delta * delta_n * n1;
  mean_ += delta_n;
  m4_ += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2_ - 4.0 * delta_n * m3_;
  m3_ += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2_;
  m2_ += term1;
}

void Moments::merge(const Moments& other) noexcept {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const auto na = static_cast<double>(n_);
  const auto nb = static_cast<double>(other.n_);
  const double n = na + nb;
  const double d = other.mean_ - mean_;
  const double d2 = d * d;
  const double d3 = d2 * d;
  const double d4 = d2 * d2;

  const double m2 = m2_ + other.m2_ + d2 * na * nb / n;
  const double m3 = m3_ + other.m3_ + d3 * na * nb * (na - nb) / (n * n) +
                    3.0 * d * (na * other.m2_ - nb * m2_) / n;
  const double m4 = m4_ + other.m4_ + d4 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                    6.0 * d2 * (na * na * other.m2_ + nb * nb * m2_) / (n * n) +
                    4.0 * d * (na * other.m3_ - nb * m3_) / n;

  n_ += other.n_;
  mean_ += d * nb / n;
  m2_ = m2;
  m3_ = m3;
  m4_ = m4;
}

double Moments::std() const noexcept { return std::sqrt(variance()); }

double Moments::excess_kurtosis() const {
  if (n_ < 4) throw std::domain_error("excess_kurtosis: need at least 4 values");
  if (!(m2_ > 0.0)) throw std::domain_error("excess_kurtosis: zero variance");
  return static_cast<double>(n_) * m4_ / (m2_ * m2_) - 3.0;
}

ReturnSeries returns(std::span<const double> prices, Step delta_t) {
  if (delta_t < 1) throw std::invalid_argument("returns: delta_t must be >= 1");
  if (prices.size() <= static_cast<std::size_t>(delta_t)) throw std::invalid_argument("returns: series too short");
  const auto dt = static_cast<std::size_t>(delta_t);
  ReturnSeries rs;
  rs.delta_t = delta_t;
  rs.values.reserve(prices.size() / dt);
  for (std::size_t i = 0; i + dt < prices.size(); i += dt) {
    const double s0 = prices[i];
    const double s1 = prices[i + dt];
    if (!(s0 > 0.0) || !(s1 > 0.0)) throw std::invalid_argument("returns: non-positive price in series");
    rs.values.push_back((s1 - s0) / s0);
  }
  return rs;
}

double mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean of empty series");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double stddev(std::span<const double> values) {
  if (std::adjacent_find(values.begin(), values.end(), std::not_equal_to<>()) == values.end()) return 0.0;
  const double mu = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mu) * (v - mu);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

ReturnSeries normalize(const ReturnSeries& rs) {
  if (rs.values.size() < 2) throw std::domain_error("normalize: need at least 2 values");
  const double mu = mean(rs.values);
  const double sigma = stddev(rs.values);
  if (!(sigma > 0.0)) throw std::domain_error("normalize: zero standard deviation");
  ReturnSeries g;
  g.delta_t = rs.delta_t;
  g.values.reserve(rs.values.size());
  for (double r : rs.values) g.values.push_back((r - mu) / sigma);
  return g;
}

double excess_kurtosis(std::span<const double> values) {
  if (values.size() < 4) throw std::domain_error("excess_kurtosis: need at least 4 values");
  const double mu = mean(values);
  double m2 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d2 = (v - mu) * (v - mu);
    m2 += d2;
    m4 += d2 * d2;
  }
  const auto n = static_cast<double>(values.size());
  m2 /= n;
  m4 /= n;
  if (!(m2 > 0.0)) throw std::domain_error("excess_kurtosis: zero variance");
  return m4 / (m2 * m2) - 3.0;
}

std::vector<double> moving_volatility(const ReturnSeries& rs, Step window_steps) {
  const Step w = window_steps / std::max<Step>(rs.delta_t, 1);
  if (w < 2) throw std::invalid_argument("moving_volatility: window must span at least 2 returns");
  const auto width = static_cast<std::size_t>(w);
  std::vector<double> out;
  if (width > rs.values.size()) return out;
  out.reserve(rs.values.size() - width + 1);
  const std::span<const double> all(rs.values);
  for (std::size_t i = 0; i + width <= all.size(); ++i) out.push_back(stddev(all.subspan(i, width)));
  return out;
}

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of empty series");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q outside [0, 1]");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::size_t freedman_diaconis_bins(std::span<const double> values) {
  if (values.size() < 2) return 1;
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  const double range = *mx - *mn;
  if (!(range > 0.0)) return 1;
  const double iqr = quantile(values, 0.75) - quantile(values, 0.25);
  double bins;
  if (iqr > 0.0) {
    const double h = 2.0 * iqr * std::cbrt(1.0 / static_cast<double>(values.size()));
    bins = std::ceil(range / h);
  } else {
    bins = std::ceil(std::log2(static_cast<double>(values.size()))) + 1.0;  // Sturges
  }
  return static_cast<std::size_t>(std::clamp(bins, 1.0, 10000.0));
}

Histogram estimate_pdf(std::span<const double> values, std::size_t bins) {
  if (values.empty()) throw std::invalid_argument("estimate_pdf: empty sample");
  const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
  const double mn = *mn_it, mx = *mx_it;
  Histogram h;
  if (!(mx > mn)) {
    h.bin_width = 1.0;
    h.centers = {mn};
    h.density = {1.0};
    return h;
  }
  if (bins == 0) bins = freedman_diaconis_bins(values);
  h.bin_width = (mx - mn) / static_cast<double>(bins);
  std::vector<std::size_t> counts(bins, 0);
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - mn) / h.bin_width);
    ++counts[std::min(b, bins - 1)];
  }
  const double norm = static_cast<double>(values.size()) * h.bin_width;
  h.centers.reserve(bins);
  h.density.reserve(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    h.centers.push_back(mn + (static_cast<double>(b) + 0.5) * h.bin_width);
    h.density.push_back(static_cast<double>(counts[b]) / norm);
  }
  return h;
}

std::vector<std::pair<double, double>> estimate_ccdf(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("estimate_ccdf: empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const auto n = static_cast<double>(v.size());
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i + 1 < v.size() && v[i + 1] == v[i]) continue;
    out.emplace_back(v[i], 1.0 - static_cast<double>(i + 1) / n);
  }
  return out;
}

LogNormalFit lognormal_reference(std::span<const double> sigmas) {
  if (sigmas.empty()) throw std::invalid_argument("lognormal_reference: empty sample");
  std::vector<double> logs;
  logs.reserve(sigmas.size());
  for (double s : sigmas) {
    if (!(s > 0.0)) throw std::invalid_argument("lognormal_reference: non-positive volatility");
    logs.push_back(std::log(s));
  }
  return {mean(logs), stddev(logs)};
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double lognormal_cdf(double x, const LogNormalFit& fit) {
  if (!(x > 0.0)) return 0.0;
  const double z = std::log(x) - fit.location;
  if (fit.scale == 0.0) return z >= 0.0 ? 1.0 : 0.0;
  return normal_cdf(z / fit.scale);
}

double ks_distance(std::span<const double> values, const std::function<double(double)>& cdf) {
  if (values.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const auto n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = cdf(v[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

namespace {

// Q_KS(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2)
double kolmogorov_survival(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0, sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

KsTwoSample ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const auto na = static_cast<double>(x.size());
  const auto nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == t) ++i;
    while (j < y.size() && y[j] == t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d)};
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman: need equal-length samples, n >= 2");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double mx = mean(rx), my = mean(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw std::domain_error("spearman: constant sample");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace lobsim::stats
