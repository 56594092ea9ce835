#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lobsim/agents.hpp"
#include "lobsim/orderbook.hpp"

namespace lobsim {

struct SimConfig {
  std::vector<TraderSpec> trader_specs{TraderSpec{}};
  double c{5.0};
  double mu_vol{10.0};
  double tick_size{0.1};
  double start_price{100.0};
  Step horizon{100'000};
  std::optional<Step> warmup;  // unset: 10 x the largest mean lifetime
  Step snapshot_interval{0};   // 0 disables snapshots
  std::uint64_t seed{1};
  Step steps_per_minute{60};
  bool record_orders{false};   // keep every submitted order in SimOutput::order_log

  std::size_t population() const noexcept;
  Step effective_warmup() const noexcept;
};

// Throws std::invalid_argument on an unusable config. Returns warnings for
// settings that run but fall outside the modelled regime.
std::vector<std::string> validate(const SimConfig& config);

struct SimOutput {
  std::vector<Trade> trade_tape;
  std::vector<double> price_series;           // index = step, 0..horizon; last trade carried forward
  std::vector<Shares> resting_volume_series;  // index = step, shares resting after expiry
  std::vector<BookSnapshot> snapshots;
  double trades_per_minute{0.0};              // post-warmup
  Step warmup{0};
  std::size_t submissions{0};
  std::size_t expiries{0};
  std::size_t survivors{0};
  std::vector<Order> order_log;               // only with SimConfig::record_orders

  bool operator==(const SimOutput&) const = default;
};

SimOutput run(const SimConfig& config);

// Price sampled every steps_per_minute steps from the end of warmup.
std::vector<double> minute_series(const SimOutput& output, Step steps_per_minute);

// Mean resting shares over post-warmup steps.
double mean_resting_volume(const SimOutput& output);

// splitmix64 finalizer over (master, index); distinct indices give distinct seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

struct CalibrationOptions {
  std::size_t seeds{8};
  double tolerance{0.01};  // relative
  int max_iterations{60};
};

struct CalibrationResult {
  double c{0.0};
  double measured_tpm{0.0};
  int iterations{0};
};

// Mean trades per minute of `probe` run with c over options.seeds derived seeds.
double measure_tpm(const SimConfig& probe, double c, std::size_t seeds);

// Geometric bisection over c until the probe-averaged trade rate is within
// tolerance of target_tpm. Throws std::runtime_error after max_iterations.
CalibrationResult calibrate_c(double target_tpm, const SimConfig& probe, const CalibrationOptions& options = {});

}  // namespace lobsim
