#pragma once
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "lobsim/orderbook.hpp"

namespace lobsim::impact {

// Distribution of virtual price shifts for one hypothetical market order size.
struct ImpactCurve {
  Shares volume{1};
  Side side{Side::Buy};                           // aggressor side
  std::vector<std::pair<double, double>> ccdf;    // (delta_s, 1 - P(delta_s)), delta_s ascending
  std::vector<double> shifts;                     // realised delta_s samples, ascending; empty for averaged curves
  std::size_t censored_count{0};                  // snapshots with less depth than `volume`
  std::size_t snapshot_count{0};

  // 1 - P(x), right-continuous; 1 left of the support.
  double ccdf_at(double x) const noexcept;
};

// Empirical quantiles (linear interpolation) of per-trade share counts,
// rounded to the nearest integer and floored at 1. Throws on an empty tape.
std::vector<Shares> quantile_volumes(std::span<const Trade> tape, std::span<const double> quantiles);
std::vector<Shares> quantile_volumes(std::span<const Shares> trade_sizes, std::span<const double> quantiles);

// Applies impact_shift to each snapshot. Throws std::runtime_error when
// every snapshot is censored.
ImpactCurve impact_distribution(std::span<const BookSnapshot> snapshots, Side side, Shares v, double tick_size);

// Pools the realised samples of several curves for the same (side, volume).
ImpactCurve pool_curves(std::span<const ImpactCurve> curves);

// Pointwise mean of several CCDFs over the union of their supports.
ImpactCurve average_curves(std::span<const ImpactCurve> curves);

// Sup-norm distance between two CCDFs over the union of their supports.
double curve_distance(const ImpactCurve& a, const ImpactCurve& b);

}  // namespace lobsim::impact
