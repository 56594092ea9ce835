#include "lobsim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <utility>

namespace lobsim {

std::size_t SimConfig::population() const noexcept {
  std::size_t n = 0;
  for (const auto& s : trader_specs) n += s.count;
  return n;
}

Step SimConfig::effective_warmup() const noexcept {
  if (warmup) return *warmup;
  double mu = 0.0;
  for (const auto& s : trader_specs) mu = std::max(mu, s.mu_lifetime);
  return static_cast<Step>(std::ceil(10.0 * mu));
}

std::vector<std::string> validate(const SimConfig& config) {
  auto fail = [](const std::string& what) { throw std::invalid_argument("invalid config: " + what); };
  if (!(config.c > 0.0)) fail("c must be positive");
  if (!(config.mu_vol > 0.0)) fail("mu_vol must be positive");
  if (!(config.tick_size > 0.0)) fail("tick_size must be positive");
  if (!(config.start_price > 0.0)) fail("start_price must be positive");
  if (config.steps_per_minute < 1) fail("steps_per_minute must be >= 1");
  if (config.snapshot_interval < 0) fail("snapshot_interval must be >= 0");
  if (config.effective_warmup() < 0) fail("warmup must be >= 0");
  if (config.horizon <= config.effective_warmup()) fail("horizon must exceed warmup");

  std::vector<std::string> warnings;
  for (const auto& s : config.trader_specs) {
    if (s.count < 1) fail("trader group count must be >= 1");
    if (!(s.kappa >= 1.0)) fail("kappa must be >= 1");
    if (!(s.mu_lifetime > 0.0)) fail("mu_lifetime must be positive");
    if (!(s.sigma_price > 0.0)) fail("sigma_price must be positive");
    if (s.kind == TraderKind::Random && s.kappa != 1.0) fail("random traders require kappa = 1");
    if (s.mu_lifetime <= 40.0)
      warnings.push_back("mu_lifetime " + std::to_string(s.mu_lifetime) +
                         " <= 40 steps: book too thin, price formation dominated by placement noise");
  }
  return warnings;
}

SimOutput run(const SimConfig& config) {
  validate(config);

  SimOutput out;
  out.warmup = config.effective_warmup();
  const Step horizon = config.horizon;
  out.price_series.assign(static_cast<std::size_t>(horizon) + 1, config.start_price);
  out.resting_volume_series.assign(static_cast<std::size_t>(horizon) + 1, 0);

  Rng rng(config.seed);
  OrderBook book(config.tick_size);

  ActivityParams params;
  params.c = config.c;
  params.population = config.population();
  params.mu_vol = config.mu_vol;
  params.fallback_price = config.start_price;

  std::vector<TraderState> traders;
  traders.reserve(params.population);
  using Slot = std::pair<Step, TraderId>;
  std::priority_queue<Slot, std::vector<Slot>, std::greater<>> schedule;
  for (std::size_t g = 0; g < config.trader_specs.size(); ++g) {
    for (std::size_t k = 0; k < config.trader_specs[g].count; ++k) {
      const auto id = static_cast<TraderId>(traders.size());
      traders.push_back({id, g, draw_waiting_time(rng, params.c, params.population)});
      schedule.emplace(traders.back().next_active_step, id);
    }
  }

  OrderId next_order_id = 0;
  std::vector<TraderId> active;
  std::size_t post_warmup_trades = 0;
  double last_price = config.start_price;

  for (Step t = 1; t <= horizon; ++t) {
    active.clear();
    while (!schedule.empty() && schedule.top().first == t) {
      active.push_back(schedule.top().second);
      schedule.pop();
    }
    std::shuffle(active.begin(), active.end(), rng);

    for (const TraderId id : active) {
      TraderState& trader = traders[id];
      const TraderSpec& spec = config.trader_specs[trader.spec_index];
      params.fallback_price = last_price;
      const OrderIntent intent = act(trader, spec, BookView::of(book), params, rng, t);
      schedule.emplace(trader.next_active_step, id);

      const Order order{++next_order_id, id, intent.side, intent.limit, intent.shares, t, t + intent.lifetime_steps};
      if (config.record_orders) out.order_log.push_back(order);
      auto result = book.submit(order, t);
      ++out.submissions;
      if (!result.trades.empty()) {
        last_price = result.trades.back().tick.price(config.tick_size);
        if (t > out.warmup) post_warmup_trades += result.trades.size();
        out.trade_tape.insert(out.trade_tape.end(), result.trades.begin(), result.trades.end());
      }
    }

    out.expiries += book.expire(t).size();
    const auto idx = static_cast<std::size_t>(t);
    out.price_series[idx] = last_price;
    out.resting_volume_series[idx] = book.resting_volume();
    if (config.snapshot_interval > 0 && t > out.warmup && t % config.snapshot_interval == 0)
      out.snapshots.push_back(book.snapshot(t));
  }

  out.survivors = book.order_count();
  const double minutes = static_cast<double>(horizon - out.warmup) / static_cast<double>(config.steps_per_minute);
  out.trades_per_minute = static_cast<double>(post_warmup_trades) / minutes;
  return out;
}

std::vector<double> minute_series(const SimOutput& output, Step steps_per_minute) {
  if (steps_per_minute < 1) throw std::invalid_argument("steps_per_minute must be >= 1");
  std::vector<double> samples;
  const auto n = static_cast<Step>(output.price_series.size());
  for (Step t = output.warmup; t < n; t += steps_per_minute) samples.push_back(output.price_series[static_cast<std::size_t>(t)]);
  return samples;
}

double mean_resting_volume(const SimOutput& output) {
  const auto& v = output.resting_volume_series;
  const auto first = static_cast<std::size_t>(output.warmup) + 1;
  if (first >= v.size()) return 0.0;
  const double sum = std::accumulate(v.begin() + static_cast<std::ptrdiff_t>(first), v.end(), 0.0);
  return sum / static_cast<double>(v.size() - first);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double measure_tpm(const SimConfig& probe, double c, std::size_t seeds) {
  SimConfig cfg = probe;
  cfg.c = c;
  cfg.snapshot_interval = 0;
  cfg.record_orders = false;
  double sum = 0.0;
  for (std::size_t i = 0; i < seeds; ++i) {
    cfg.seed = derive_seed(probe.seed, i);
    sum += run(cfg).trades_per_minute;
  }
  return sum / static_cast<double>(seeds);
}

CalibrationResult calibrate_c(double target_tpm, const SimConfig& probe, const CalibrationOptions& options) {
  if (!(target_tpm > 0.0)) throw std::invalid_argument("target_tpm must be positive");
  if (options.seeds < 1) throw std::invalid_argument("calibration needs at least one seed");

  // Trade rate falls as c grows (longer waits between activations).
  CalibrationResult res;
  auto measure = [&](double c) {
    ++res.iterations;
    if (res.iterations > options.max_iterations)
      throw std::runtime_error("calibrate_c: no convergence after " + std::to_string(options.max_iterations) +
                               " probes");
    return measure_tpm(probe, c, options.seeds);
  };
  auto close_enough = [&](double tpm) { return std::abs(tpm - target_tpm) <= options.tolerance * target_tpm; };

  double lo = probe.c / 4.0, hi = probe.c * 4.0;
  double tpm_lo = measure(lo);
  while (tpm_lo < target_tpm) {
    if (close_enough(tpm_lo)) return {lo, tpm_lo, res.iterations};
    lo /= 4.0;
    tpm_lo = measure(lo);
  }
  double tpm_hi = measure(hi);
  while (tpm_hi > target_tpm) {
    if (close_enough(tpm_hi)) return {hi, tpm_hi, res.iterations};
    hi *= 4.0;
    tpm_hi = measure(hi);
  }

  for (;;) {
    const double mid = std::sqrt(lo * hi);
    const double tpm = measure(mid);
    if (close_enough(tpm)) return {mid, tpm, res.iterations};
    (tpm > target_tpm ? lo : hi) = mid;
  }
}

}  // namespace lobsim
