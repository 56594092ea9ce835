#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "lobsim/simulator.hpp"
#include "lobsim/stats.hpp"

using namespace lobsim;
using namespace lobsim::stats;

namespace {

std::vector<double> normal_sample(std::size_t n, std::uint64_t seed, double mu = 0.0, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(mu, sd);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

std::vector<double> laplace_sample(std::size_t n, std::uint64_t seed) {
  // difference of two iid exponentials is Laplace(0, 1)
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> e(1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = e(rng) - e(rng);
  return v;
}

// Naive two-pass central moments, written independently of Moments.
struct TwoPass {
  double mean, m2, m3, m4;
  explicit TwoPass(const std::vector<double>& v) {
    long double s = 0;
    for (double x : v) s += x;
    mean = static_cast<double>(s / v.size());
    long double a2 = 0, a3 = 0, a4 = 0;
    for (double x : v) {
      const long double d = x - mean;
      a2 += d * d;
      a3 += d * d * d;
      a4 += d * d * d * d;
    }
    m2 = static_cast<double>(a2 / v.size());
    m3 = static_cast<double>(a3 / v.size());
    m4 = static_cast<double>(a4 / v.size());
  }
};

}  // namespace

TEST(Returns, ConstantAndSingleWindow) {
  std::vector<double> flat(301, 100.0);
  const auto r = returns(flat, 60);
  ASSERT_EQ(r.values.size(), 5u);
  for (double x : r.values) EXPECT_EQ(x, 0.0);
  EXPECT_EQ(r.delta_t, 60);

  std::vector<double> up(61, 100.0);
  up[60] = 101.0;
  const auto one = returns(up, 60);
  ASSERT_EQ(one.values.size(), 1u);
  EXPECT_DOUBLE_EQ(one.values[0], 0.01);
}

TEST(Returns, MatchesIndependentReference) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> step(-0.3, 0.3);
  std::vector<double> prices(10'000);
  double p = 100.0;
  for (auto& x : prices) x = (p += step(rng));

  const Step dt = 7;
  std::vector<double> ref;
  std::vector<double> sampled;
  for (std::size_t i = 0; i < prices.size(); i += dt) sampled.push_back(prices[i]);
  for (std::size_t k = 1; k < sampled.size(); ++k) ref.push_back((sampled[k] - sampled[k - 1]) / sampled[k - 1]);

  EXPECT_EQ(returns(prices, dt).values, ref);
}

TEST(Returns, Errors) {
  std::vector<double> bad{100.0, 0.0, 101.0};
  EXPECT_THROW(returns(bad, 1), std::invalid_argument);
  std::vector<double> shorty{100.0, 101.0};
  EXPECT_THROW(returns(shorty, 2), std::invalid_argument);
}

TEST(Normalize, ZeroMeanUnitStd) {
  ReturnSeries rs{normal_sample(10'000, 1, 0.002, 0.0007), 60};
  const auto g = normalize(rs);
  EXPECT_LT(std::abs(mean(g.values)), 1e-9);
  EXPECT_LT(std::abs(stddev(g.values) - 1.0), 1e-9);
}

TEST(Normalize, AffineInvariantAndIdempotent) {
  ReturnSeries rs{laplace_sample(5'000, 2), 60};
  ReturnSeries shifted = rs;
  for (auto& x : shifted.values) x = 3.5 * x - 0.25;
  const auto g = normalize(rs);
  const auto h = normalize(shifted);
  const auto gg = normalize(g);
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    EXPECT_NEAR(g.values[i], h.values[i], 1e-9);
    EXPECT_NEAR(g.values[i], gg.values[i], 1e-12);
  }
}

TEST(Normalize, DegenerateSeriesThrows) {
  ReturnSeries rs{std::vector<double>(10, 0.5), 60};
  EXPECT_THROW(normalize(rs), std::domain_error);
}

TEST(Normalize, HalvesOfStationaryRunAgree) {
  SimConfig cfg;
  cfg.trader_specs = {TraderSpec{TraderKind::Random, 300, 1.0, 1200.0, 0.8}};
  cfg.c = 7.0;
  cfg.horizon = 100'000;
  std::vector<double> first, second;
  for (std::uint64_t s = 0; s < 20; ++s) {
    cfg.seed = derive_seed(314, s);
    const auto out = run(cfg);
    const std::span<const double> p(out.price_series);
    const auto g = normalize(returns(p.subspan(static_cast<std::size_t>(out.warmup)), 60)).values;
    const auto half = g.size() / 2;
    first.insert(first.end(), g.begin(), g.begin() + static_cast<std::ptrdiff_t>(half));
    second.insert(second.end(), g.begin() + static_cast<std::ptrdiff_t>(half), g.end());
  }
  EXPECT_LT(ks_two_sample(first, second).statistic, 0.05);
}

TEST(Kurtosis, NormalLaplaceAndTwoPoint) {
  EXPECT_NEAR(excess_kurtosis(normal_sample(1'000'000, 3)), 0.0, 0.05);
  EXPECT_NEAR(excess_kurtosis(laplace_sample(1'000'000, 4)), 3.0, 0.1);
  std::vector<double> two{-1, 1, -1, 1, -1, 1};
  EXPECT_DOUBLE_EQ(excess_kurtosis(two), -2.0);
}

TEST(Kurtosis, ErrorsOnDegenerateInput) {
  std::vector<double> flat(10, 1.0);
  EXPECT_THROW(excess_kurtosis(flat), std::domain_error);
  std::vector<double> tiny{1.0, 2.0, 3.0};
  EXPECT_THROW(excess_kurtosis(tiny), std::domain_error);
}

TEST(Kurtosis, AffineInvariant) {
  const auto v = laplace_sample(50'000, 5);
  auto w = v;
  for (auto& x : w) x = -2.7 * x + 11.0;
  EXPECT_NEAR(excess_kurtosis(v), excess_kurtosis(w), 1e-8);
}

TEST(Moments, StreamingMatchesTwoPass) {
  auto v = laplace_sample(100'000, 6);
  for (auto& x : v) x = 1e-3 * x + 0.01;  // return-like scale with an offset
  const Moments m(v);
  const TwoPass ref(v);
  EXPECT_NEAR(m.mean(), ref.mean, 1e-10 * std::abs(ref.mean));
  EXPECT_NEAR(m.variance(), ref.m2, 1e-10 * ref.m2);
  EXPECT_NEAR(m.excess_kurtosis(), ref.m4 / (ref.m2 * ref.m2) - 3.0, 1e-10 * (ref.m4 / (ref.m2 * ref.m2)));
  EXPECT_NEAR(m.excess_kurtosis(), excess_kurtosis(v), 1e-10 * std::abs(excess_kurtosis(v)));
}

TEST(Moments, MergeEqualsConcatenation) {
  const auto a = laplace_sample(30'000, 7);
  const auto b = normal_sample(50'000, 8, 2.0, 3.0);
  Moments ma(a), mb(b);
  std::vector<double> ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  const TwoPass ref(ab);
  Moments merged = ma;
  merged.merge(mb);
  Moments reversed = mb;
  reversed.merge(ma);
  for (const Moments* m : {&merged, &reversed}) {
    EXPECT_EQ(m->count(), ab.size());
    EXPECT_NEAR(m->mean(), ref.mean, 1e-10 * std::abs(ref.mean));
    EXPECT_NEAR(m->variance(), ref.m2, 1e-10 * ref.m2);
    EXPECT_NEAR(m->excess_kurtosis(), ref.m4 / (ref.m2 * ref.m2) - 3.0, 1e-9);
  }
  Moments empty;
  empty.merge(ma);
  EXPECT_EQ(empty.count(), ma.count());
}

TEST(MovingVolatility, ConstantFullAndRegimes) {
  ReturnSeries flat{std::vector<double>(50, 0.001), 60};
  for (double s : moving_volatility(flat, 600)) EXPECT_EQ(s, 0.0);

  ReturnSeries rs{normal_sample(40, 9), 1};
  const auto full = moving_volatility(rs, 40);
  ASSERT_EQ(full.size(), 1u);
  EXPECT_NEAR(full[0], stddev(rs.values), 1e-15);
  EXPECT_TRUE(moving_volatility(rs, 41).empty());
  EXPECT_THROW(moving_volatility(rs, 1), std::invalid_argument);

  // 2000 returns with std 1 followed by 2000 with std 3
  ReturnSeries regimes{normal_sample(2000, 10), 60};
  const auto hi = normal_sample(2000, 11, 0.0, 3.0);
  regimes.values.insert(regimes.values.end(), hi.begin(), hi.end());
  const auto vol = moving_volatility(regimes, 200 * 60);
  ASSERT_EQ(vol.size(), 4000u - 200 + 1);
  const auto early = std::span(vol).first(1500);
  const auto late = std::span(vol).last(1500);
  EXPECT_NEAR(mean(early), 1.0, 0.1);
  EXPECT_NEAR(mean(late), 3.0, 0.3);
  EXPECT_LT(*std::max_element(early.begin(), early.end()), *std::min_element(late.begin(), late.end()));
}

TEST(Pdf, SingleValueAndNormalisation) {
  std::vector<double> one{4.2};
  const auto h1 = estimate_pdf(one);
  ASSERT_EQ(h1.centers.size(), 1u);
  EXPECT_DOUBLE_EQ(h1.density[0] * h1.bin_width, 1.0);

  const auto v = laplace_sample(20'000, 12);
  for (std::size_t bins : {0u, 17u, 200u}) {
    const auto h = estimate_pdf(v, bins);
    double integral = 0.0;
    for (double d : h.density) integral += d * h.bin_width;
    EXPECT_NEAR(integral, 1.0, 1e-9);
  }
}

TEST(Pdf, UniformSampleIsFlat) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(100'000);
  for (auto& x : v) x = u(rng);
  const auto h = estimate_pdf(v, 50);
  const double expected = static_cast<double>(v.size()) / 50.0;
  for (double d : h.density) {
    const double count = d * h.bin_width * static_cast<double>(v.size());
    EXPECT_LT(std::abs(count - expected), 3.0 * std::sqrt(expected) + 1.0);
  }
}

TEST(Pdf, FreedmanDiaconisBinCount) {
  std::vector<double> v;
  for (int i = 0; i < 1000; ++i) v.push_back(i);
  // IQR = 499.5, h = 2 * 499.5 / 10 = 99.9, range 999 -> 10 bins
  EXPECT_EQ(freedman_diaconis_bins(v), 10u);
}

TEST(Ccdf, HandCountedSample) {
  std::vector<double> v{3, 1, 4, 1, 5, 9, 2, 6, 5, 3};
  const auto c = estimate_ccdf(v);
  // sorted: 1 1 2 3 3 4 5 5 6 9
  const std::vector<std::pair<double, double>> expected{
      {1, 0.8}, {2, 0.7}, {3, 0.5}, {4, 0.4}, {5, 0.2}, {6, 0.1}, {9, 0.0}};
  ASSERT_EQ(c.size(), expected.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_EQ(c[i].first, expected[i].first);
    EXPECT_NEAR(c[i].second, expected[i].second, 1e-15);
  }
  std::vector<double> distinct{0.5, 0.1, 0.9, 0.3, 0.7, 0.2, 0.8, 0.4, 0.6, 1.0};
  EXPECT_NEAR(estimate_ccdf(distinct).front().second, 1.0 - 1.0 / 10.0, 1e-15);
}

TEST(Ccdf, MonotoneNonIncreasing) {
  const auto c = estimate_ccdf(laplace_sample(5000, 14));
  for (std::size_t i = 1; i < c.size(); ++i) {
    EXPECT_GT(c[i].first, c[i - 1].first);
    EXPECT_LE(c[i].second, c[i - 1].second);
  }
}

TEST(LogNormal, RecoversParametersAndDegenerateScale) {
  auto logs = normal_sample(100'000, 15, -5.0, 0.4);
  std::vector<double> sig;
  for (double l : logs) sig.push_back(std::exp(l));
  const auto fit = lognormal_reference(sig);
  EXPECT_NEAR(fit.location, -5.0, 0.02 * 5.0);
  EXPECT_NEAR(fit.scale, 0.4, 0.02 * 0.4);
  EXPECT_LT(ks_distance(sig, [&](double x) { return lognormal_cdf(x, fit); }), 0.01);

  std::vector<double> same(10, 0.002);
  EXPECT_EQ(lognormal_reference(same).scale, 0.0);
  std::vector<double> bad{0.1, 0.0};
  EXPECT_THROW(lognormal_reference(bad), std::invalid_argument);
}

TEST(Ks, TwoSampleBehaviour) {
  const auto a = normal_sample(5000, 16);
  const auto b = normal_sample(5000, 17);
  const auto c = normal_sample(5000, 18, 0.2, 1.0);
  EXPECT_GT(ks_two_sample(a, b).p_value, 0.01);
  EXPECT_LT(ks_two_sample(a, c).p_value, 0.01);
  EXPECT_EQ(ks_two_sample(a, a).statistic, 0.0);
  EXPECT_LT(ks_distance(a, normal_cdf), 0.03);
}

TEST(Spearman, RanksAndTies) {
  std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> y{10, 8, 6, 4, 2};
  EXPECT_DOUBLE_EQ(spearman(x, y), -1.0);
  std::vector<double> z{1, 4, 9, 16, 25};
  EXPECT_DOUBLE_EQ(spearman(x, z), 1.0);
  std::vector<double> tied{1, 1, 2, 2, 3};
  EXPECT_GT(spearman(x, tied), 0.9);
}

TEST(Quantile, LinearInterpolation) {
  std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  EXPECT_DOUBLE_EQ(quantile(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile(v, 0.5), 5.5);
  EXPECT_DOUBLE_EQ(quantile(v, 0.9), 9.1);
  EXPECT_DOUBLE_EQ(quantile(v, 1.0), 10.0);
}
