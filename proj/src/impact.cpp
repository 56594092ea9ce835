#include "lobsim/impact.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lobsim/stats.hpp"

namespace lobsim::impact {

double ImpactCurve::ccdf_at(double x) const noexcept {
  auto it = std::upper_bound(ccdf.begin(), ccdf.end(), x,
                             [](double v, const std::pair<double, double>& p) { return v < p.first; });
  if (it == ccdf.begin()) return 1.0;
  return std::prev(it)->second;
}

std::vector<Shares> quantile_volumes(std::span<const Trade> tape, std::span<const double> quantiles) {
  std::vector<Shares> sizes;
  sizes.reserve(tape.size());
  for (const auto& t : tape) sizes.push_back(t.shares);
  return quantile_volumes(sizes, quantiles);
}

std::vector<Shares> quantile_volumes(std::span<const Shares> trade_sizes, std::span<const double> quantiles) {
  if (trade_sizes.empty()) throw std::invalid_argument("quantile_volumes: empty trade tape");
  std::vector<double> sizes(trade_sizes.begin(), trade_sizes.end());
  std::sort(sizes.begin(), sizes.end());
  std::vector<Shares> out;
  out.reserve(quantiles.size());
  for (double q : quantiles) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile_volumes: quantile outside (0, 1)");
    out.push_back(std::max<Shares>(1, std::llround(stats::quantile(sizes, q))));
  }
  return out;
}

namespace {

void finish(ImpactCurve& curve) {
  std::sort(curve.shifts.begin(), curve.shifts.end());
  curve.ccdf = curve.shifts.empty() ? decltype(curve.ccdf){} : stats::estimate_ccdf(curve.shifts);
}

}  // namespace

ImpactCurve impact_distribution(std::span<const BookSnapshot> snapshots, Side side, Shares v, double tick_size) {
  if (snapshots.empty()) throw std::invalid_argument("impact_distribution: no snapshots");
  if (v < 1) throw std::invalid_argument("impact_distribution: volume must be >= 1");
  ImpactCurve curve;
  curve.volume = v;
  curve.side = side;
  curve.snapshot_count = snapshots.size();
  curve.shifts.reserve(snapshots.size());
  for (const auto& snap : snapshots) {
    if (auto ds = impact_shift(snap, side, v, tick_size))
      curve.shifts.push_back(*ds);
    else
      ++curve.censored_count;
  }
  if (curve.shifts.empty()) throw std::runtime_error("impact_distribution: volume exceeds book depth everywhere");
  finish(curve);
  return curve;
}

ImpactCurve pool_curves(std::span<const ImpactCurve> curves) {
  if (curves.empty()) throw std::invalid_argument("pool_curves: nothing to pool");
  ImpactCurve pooled;
  pooled.volume = curves.front().volume;
  pooled.side = curves.front().side;
  for (const auto& c : curves) {
    if (c.volume != pooled.volume || c.side != pooled.side)
      throw std::invalid_argument("pool_curves: mixed volumes or sides");
    pooled.shifts.insert(pooled.shifts.end(), c.shifts.begin(), c.shifts.end());
    pooled.censored_count += c.censored_count;
    pooled.snapshot_count += c.snapshot_count;
  }
  finish(pooled);
  return pooled;
}

ImpactCurve average_curves(std::span<const ImpactCurve> curves) {
  if (curves.empty()) throw std::invalid_argument("average_curves: nothing to average");
  ImpactCurve avg;
  avg.volume = curves.front().volume;
  avg.side = curves.front().side;
  std::vector<double> grid;
  for (const auto& c : curves) {
    for (const auto& [x, p] : c.ccdf) grid.push_back(x);
    avg.censored_count += c.censored_count;
    avg.snapshot_count += c.snapshot_count;
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  for (double x : grid) {
    double sum = 0.0;
    for (const auto& c : curves) sum += c.ccdf_at(x);
    avg.ccdf.emplace_back(x, sum / static_cast<double>(curves.size()));
  }
  return avg;
}

double curve_distance(const ImpactCurve& a, const ImpactCurve& b) {
  if (a.ccdf.empty() || b.ccdf.empty()) throw std::invalid_argument("curve_distance: empty curve");
  double d = 0.0;
  for (const auto& [x, p] : a.ccdf) d = std::max(d, std::abs(p - b.ccdf_at(x)));
  for (const auto& [x, p] : b.ccdf) d = std::max(d, std::abs(a.ccdf_at(x) - p));
  return d;
}

}  // namespace lobsim::impact
