#pragma once
// Test-only oracle: a flat list of resting orders scanned linearly on every
// operation. Shares nothing with OrderBook beyond the value types.
#include <algorithm>
#include <optional>
#include <random>
#include <vector>

#include "lobsim/orderbook.hpp"

namespace lobsim::testing {

class ReferenceMatcher {
 public:
  std::vector<Trade> submit(const Order& order, Step step) {
    std::vector<Trade> trades;
    Shares remaining = order.shares;
    fill(order.side, order.id, order.limit, remaining, step, trades);
    if (remaining > 0) {
      Order r = order;
      r.shares = remaining;
      resting_.push_back(r);
    }
    return trades;
  }

  std::pair<std::vector<Trade>, Shares> submit_market(Side side, Shares shares, Step step) {
    std::vector<Trade> trades;
    fill(side, 0, std::nullopt, shares, step, trades);
    return {trades, shares};
  }

  std::vector<OrderId> expire(Step step) {
    std::vector<Order> gone;
    std::copy_if(resting_.begin(), resting_.end(), std::back_inserter(gone),
                 [&](const Order& o) { return o.expires_step <= step; });
    std::erase_if(resting_, [&](const Order& o) { return o.expires_step <= step; });
    std::sort(gone.begin(), gone.end(), [](const Order& a, const Order& b) {
      return a.expires_step != b.expires_step ? a.expires_step < b.expires_step : a.id < b.id;
    });
    std::vector<OrderId> ids;
    for (const auto& o : gone) ids.push_back(o.id);
    return ids;
  }

  Shares supply(Tick l) const {
    Shares s = 0;
    for (const auto& o : resting_)
      if (o.side == Side::Sell && o.limit <= l) s += o.shares;
    return s;
  }

  Shares demand(Tick l) const {
    Shares s = 0;
    for (const auto& o : resting_)
      if (o.side == Side::Buy && o.limit >= l) s += o.shares;
    return s;
  }

  std::optional<Tick> best(Side side) const {
    std::optional<Tick> b;
    for (const auto& o : resting_)
      if (o.side == side && (!b || (side == Side::Buy ? o.limit > *b : o.limit < *b))) b = o.limit;
    return b;
  }

  const std::vector<Order>& resting() const { return resting_; }

 private:
  void fill(Side aggressor, OrderId id, std::optional<Tick> limit, Shares& remaining, Step step,
            std::vector<Trade>& out) {
    while (remaining > 0) {
      // best opposite order: price first, then lowest id
      std::size_t pick = resting_.size();
      for (std::size_t i = 0; i < resting_.size(); ++i) {
        const Order& o = resting_[i];
        if (o.side == aggressor) continue;
        if (limit && (aggressor == Side::Buy ? o.limit > *limit : o.limit < *limit)) continue;
        if (pick == resting_.size()) {
          pick = i;
          continue;
        }
        const Order& p = resting_[pick];
        const bool better = aggressor == Side::Buy ? o.limit < p.limit : o.limit > p.limit;
        if (better || (o.limit == p.limit && o.id < p.id)) pick = i;
      }
      if (pick == resting_.size()) return;
      Order& o = resting_[pick];
      const Shares q = std::min(remaining, o.shares);
      out.push_back(Trade{step, o.limit, q, id, o.id, aggressor});
      remaining -= q;
      o.shares -= q;
      if (o.shares == 0) resting_.erase(resting_.begin() + static_cast<std::ptrdiff_t>(pick));
    }
  }

  std::vector<Order> resting_;
};

// Random order stream: ticks near `center`, several orders per step, random
// lifetimes, expiry applied at the end of each step.
struct StreamEvent {
  Order order;
  Step step;
};

inline std::vector<StreamEvent> random_stream(std::uint64_t seed, std::size_t n, std::int64_t center = 1000,
                                              std::int64_t spread = 25) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> tick(center - spread, center + spread);
  std::uniform_int_distribution<Shares> shares(1, 60);
  std::uniform_int_distribution<int> per_step(0, 3);
  std::uniform_int_distribution<Step> life(1, 200);
  std::bernoulli_distribution buy(0.5);
  std::vector<StreamEvent> out;
  out.reserve(n);
  Step step = 1;
  int left = per_step(rng);
  for (std::size_t i = 0; i < n; ++i) {
    while (left == 0) {
      ++step;
      left = per_step(rng);
    }
    --left;
    Order o;
    o.id = i + 1;
    o.trader_id = static_cast<TraderId>(i % 97);
    o.side = buy(rng) ? Side::Buy : Side::Sell;
    o.limit = Tick{tick(rng)};
    o.shares = shares(rng);
    o.placed_step = step;
    o.expires_step = step + life(rng);
    out.push_back({o, step});
  }
  return out;
}

// Replays a stream through an engine, expiring at the close of every step.
// Returns (trade tape, expired ids).
template <class Engine>
std::pair<std::vector<Trade>, std::vector<OrderId>> replay(Engine& engine, const std::vector<StreamEvent>& events) {
  std::vector<Trade> tape;
  std::vector<OrderId> expired;
  Step current = events.empty() ? 0 : events.front().step;
  auto close_steps_until = [&](Step next) {
    for (; current < next; ++current) {
      auto ids = engine.expire(current);
      expired.insert(expired.end(), ids.begin(), ids.end());
    }
  };
  for (const auto& e : events) {
    close_steps_until(e.step);
    auto res = engine.submit(e.order, e.step);
    if constexpr (requires { res.trades; })
      tape.insert(tape.end(), res.trades.begin(), res.trades.end());
    else
      tape.insert(tape.end(), res.begin(), res.end());
  }
  close_steps_until(current + 1);
  return {tape, expired};
}

}  // namespace lobsim::testing
