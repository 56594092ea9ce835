#include "lobsim/orderbook.hpp"

#include <algorithm>
#include <limits>

namespace lobsim {

OrderBook::OrderBook(double tick_size) : tick_size_(tick_size) {
  if (!(tick_size > 0.0)) throw std::invalid_argument("tick_size must be positive");
}

std::optional<double> OrderBook::midpoint() const noexcept {
  if (!best_bid_ || !best_ask_) return std::nullopt;
  return static_cast<double>(best_bid_->index + best_ask_->index) * tick_size_ / 2.0;
}

const OrderBook::Level* OrderBook::level_ptr(Side s, Tick t) const noexcept {
  const auto& lv = levels(s);
  if (t.index < 0 || static_cast<std::size_t>(t.index) >= lv.size()) return nullptr;
  return &lv[static_cast<std::size_t>(t.index)];
}

OrderBook::Level& OrderBook::level_ref(Side s, Tick t) {
  auto& lv = levels(s);
  const auto idx = static_cast<std::size_t>(t.index);
  if (idx >= lv.size()) lv.resize(std::max(idx + 1, lv.size() * 2));
  return lv[idx];
}

Shares OrderBook::volume_at(Side s, Tick t) const noexcept {
  const auto* lvl = level_ptr(s, t);
  return lvl ? lvl->total : 0;
}

SubmitResult OrderBook::submit(const Order& order, Step step) {
  SubmitResult result;
  if (order.shares < 1) {
    result.status = SubmitStatus::ZeroShares;
    return result;
  }
  if (order.limit.index < 1 || order.limit.index > kMaxTickIndex) {
    result.status = SubmitStatus::InvalidTick;
    return result;
  }
  if (last_id_ && order.id <= *last_id_) {
    result.status = SubmitStatus::DuplicateId;
    return result;
  }
  last_id_ = order.id;

  Shares remaining = order.shares;
  match(order.side, order.id, order.limit, remaining, step, result.trades);
  if (remaining > 0) {
    Order resting = order;
    resting.shares = remaining;
    rest(resting);
    result.rested = order.id;
  }
  return result;
}

MarketResult OrderBook::submit_market(Side side, Shares shares, Step step) {
  MarketResult result;
  if (shares < 1) return result;
  Shares remaining = shares;
  match(side, 0, std::nullopt, remaining, step, result.trades);
  result.unfilled = remaining;
  return result;
}

void OrderBook::match(Side aggressor, OrderId aggressor_id, std::optional<Tick> limit, Shares& remaining, Step step,
                      std::vector<Trade>& out) {
  const Side passive = opposite(aggressor);
  auto crosses = [&](Tick best) {
    if (!limit) return true;
    return aggressor == Side::Buy ? best <= *limit : best >= *limit;
  };

  while (remaining > 0) {
    const auto best = this->best(passive);
    if (!best || !crosses(*best)) break;
    Level& lvl = level_ref(passive, *best);
    Order& resting = lvl.orders[lvl.head];
    const Shares fill = std::min(remaining, resting.shares);
    out.push_back(Trade{step, *best, fill, aggressor_id, resting.id, aggressor});
    remaining -= fill;
    resting.shares -= fill;
    lvl.total -= fill;
    (passive == Side::Buy ? bid_depth_ : ask_depth_) -= fill;
    if (resting.shares == 0) {
      index_.erase(resting.id);
      ++lvl.head;
      if (lvl.empty()) {
        on_level_emptied(passive, *best);
      } else if (lvl.head >= 64 && 2 * lvl.head >= lvl.orders.size()) {
        lvl.orders.erase(lvl.orders.begin(), lvl.orders.begin() + static_cast<std::ptrdiff_t>(lvl.head));
        lvl.head = 0;
      }
    }
  }
}

void OrderBook::rest(const Order& order) {
  Level& lvl = level_ref(order.side, order.limit);
  if (lvl.empty()) {
    lvl.orders.clear();
    lvl.head = 0;
    if (order.side == Side::Buy) {
      ++bid_levels_;
      if (!best_bid_ || order.limit > *best_bid_) best_bid_ = order.limit;
    } else {
      ++ask_levels_;
      if (!best_ask_ || order.limit < *best_ask_) best_ask_ = order.limit;
    }
  }
  lvl.orders.push_back(order);
  lvl.total += order.shares;
  (order.side == Side::Buy ? bid_depth_ : ask_depth_) += order.shares;
  index_.emplace(order.id, Location{order.side, order.limit});
  expiries_.emplace(order.expires_step, order.id);
}

void OrderBook::on_level_emptied(Side s, Tick t) {
  Level& lvl = level_ref(s, t);
  lvl.orders.clear();
  lvl.head = 0;
  auto& count = s == Side::Buy ? bid_levels_ : ask_levels_;
  auto& best = s == Side::Buy ? best_bid_ : best_ask_;
  --count;
  if (!best || *best != t) return;
  if (count == 0) {
    best.reset();
    return;
  }
  const auto& lv = levels(s);
  const std::int64_t dir = s == Side::Buy ? -1 : 1;
  for (std::int64_t i = t.index + dir;; i += dir) {
    if (!lv[static_cast<std::size_t>(i)].empty()) {
      best = Tick{i};
      return;
    }
  }
}

void OrderBook::remove_resting(OrderId id, const Location& loc) {
  Level& lvl = level_ref(loc.side, loc.tick);
  auto it = std::find_if(lvl.orders.begin() + static_cast<std::ptrdiff_t>(lvl.head), lvl.orders.end(),
                         [id](const Order& o) { return o.id == id; });
  if (it == lvl.orders.end()) return;
  lvl.total -= it->shares;
  (loc.side == Side::Buy ? bid_depth_ : ask_depth_) -= it->shares;
  lvl.orders.erase(it);
  if (lvl.empty()) on_level_emptied(loc.side, loc.tick);
}

std::vector<OrderId> OrderBook::expire(Step step) {
  std::vector<OrderId> removed;
  while (!expiries_.empty() && expiries_.top().first <= step) {
    const OrderId id = expiries_.top().second;
    expiries_.pop();
    auto it = index_.find(id);
    if (it == index_.end()) continue;  // already filled
    const Location loc = it->second;
    index_.erase(it);
    remove_resting(id, loc);
    removed.push_back(id);
  }
  return removed;
}

Shares OrderBook::supply(Tick l) const {
  if (!best_ask_) throw BookError("supply: no best ask");
  Shares total = 0;
  const auto& lv = asks_;
  const auto last = std::min<std::int64_t>(l.index, static_cast<std::int64_t>(lv.size()) - 1);
  for (std::int64_t i = best_ask_->index; i <= last; ++i) total += lv[static_cast<std::size_t>(i)].total;
  return total;
}

Shares OrderBook::demand(Tick l) const {
  if (!best_bid_) throw BookError("demand: no best bid");
  Shares total = 0;
  const auto& lv = bids_;
  const auto first = std::max<std::int64_t>(l.index, 0);
  for (std::int64_t i = best_bid_->index; i >= first; --i) total += lv[static_cast<std::size_t>(i)].total;
  return total;
}

std::optional<double> OrderBook::impact_shift(Side aggressor, Shares v) const {
  const Side passive = opposite(aggressor);
  const auto best = this->best(passive);
  if (!best || v < 1 || depth(passive) < v) return std::nullopt;
  const auto& lv = levels(passive);
  const std::int64_t dir = passive == Side::Sell ? 1 : -1;
  Shares cum = 0;
  std::int64_t i = best->index;
  for (;; i += dir) {
    cum += lv[static_cast<std::size_t>(i)].total;
    if (cum >= v) break;
  }
  return static_cast<double>((i - best->index) * dir) * tick_size_;
}

BookSnapshot OrderBook::snapshot(Step step) const {
  BookSnapshot snap;
  snap.step = step;
  snap.best_bid = best_bid_;
  snap.best_ask = best_ask_;
  snap.bids.reserve(bid_levels_);
  snap.asks.reserve(ask_levels_);
  if (best_bid_) {
    for (std::int64_t i = best_bid_->index; snap.bids.size() < bid_levels_; --i) {
      const auto& lvl = bids_[static_cast<std::size_t>(i)];
      if (!lvl.empty()) snap.bids.push_back({Tick{i}, lvl.total});
    }
  }
  if (best_ask_) {
    for (std::int64_t i = best_ask_->index; snap.asks.size() < ask_levels_; ++i) {
      const auto& lvl = asks_[static_cast<std::size_t>(i)];
      if (!lvl.empty()) snap.asks.push_back({Tick{i}, lvl.total});
    }
  }
  return snap;
}

Shares supply(const BookSnapshot& snap, Tick l) {
  if (snap.asks.empty()) throw BookError("supply: no best ask");
  Shares total = 0;
  for (const auto& lv : snap.asks) {
    if (lv.tick > l) break;
    total += lv.shares;
  }
  return total;
}

Shares demand(const BookSnapshot& snap, Tick l) {
  if (snap.bids.empty()) throw BookError("demand: no best bid");
  Shares total = 0;
  for (const auto& lv : snap.bids) {
    if (lv.tick < l) break;
    total += lv.shares;
  }
  return total;
}

std::optional<double> impact_shift(const BookSnapshot& snap, Side aggressor, Shares v, double tick_size) {
  const auto& levels = snap.side(opposite(aggressor));
  if (levels.empty() || v < 1) return std::nullopt;
  Shares cum = 0;
  for (const auto& lv : levels) {
    cum += lv.shares;
    if (cum >= v) {
      const auto ticks = lv.tick.index - levels.front().tick.index;
      return static_cast<double>(aggressor == Side::Buy ? ticks : -ticks) * tick_size;
    }
  }
  return std::nullopt;
}

}  // namespace lobsim
