#pragma once
#include <cstddef>
#include <optional>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lobsim/types.hpp"

namespace lobsim {

struct Order {
  OrderId id{0};
  TraderId trader_id{0};
  Side side{Side::Buy};
  Tick limit{};
  Shares shares{0};  // remaining
  Step placed_step{0};
  Step expires_step{0};

  friend bool operator==(const Order&, const Order&) = default;
};

// One fill. Always executes at the resting order's tick.
struct Trade {
  Step step{0};
  Tick tick{};
  Shares shares{0};
  OrderId aggressor_id{0};
  OrderId resting_id{0};
  Side aggressor_side{Side::Buy};

  bool operator==(const Trade&) const = default;
};

struct LevelVolume {
  Tick tick{};
  Shares shares{0};

  bool operator==(const LevelVolume&) const = default;
};

// Aggregated view of the book at the end of a step. Both sides are stored
// best-first: bids by descending tick, asks by ascending tick.
struct BookSnapshot {
  Step step{0};
  std::vector<LevelVolume> bids;
  std::vector<LevelVolume> asks;
  std::optional<Tick> best_bid;
  std::optional<Tick> best_ask;

  const std::vector<LevelVolume>& side(Side s) const noexcept { return s == Side::Buy ? bids : asks; }
  bool operator==(const BookSnapshot&) const = default;
};

enum class SubmitStatus : std::uint8_t { Accepted, DuplicateId, ZeroShares, InvalidTick };

struct SubmitResult {
  SubmitStatus status{SubmitStatus::Accepted};
  std::vector<Trade> trades;
  std::optional<OrderId> rested;

  bool accepted() const noexcept { return status == SubmitStatus::Accepted; }
};

struct MarketResult {
  std::vector<Trade> trades;
  Shares unfilled{0};
};

// Raised by the supply/demand queries when the requested side has no best price.
class BookError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Orders placed above this tick are rejected; keeps the level array bounded.
inline constexpr std::int64_t kMaxTickIndex = std::int64_t{1} << 22;

// Discrete-tick double-auction book with price-time priority.
//
// Levels are stored contiguously by tick index, one FIFO per level, with the
// best price on each side tracked incrementally. Order ids must be strictly
// increasing across submissions; a repeated or stale id is rejected.
class OrderBook {
 public:
  explicit OrderBook(double tick_size = 0.1);

  // Match `order` against the opposite side, rest any remainder at its limit.
  SubmitResult submit(const Order& order, Step step);

  // Consume the opposite side best-first; the remainder is discarded.
  // Market orders carry aggressor id 0.
  MarketResult submit_market(Side side, Shares shares, Step step);

  // Remove every resting order with expires_step <= step. Ids come back in
  // (expires_step, id) order.
  std::vector<OrderId> expire(Step step);

  std::optional<Tick> best_bid() const noexcept { return best_bid_; }
  std::optional<Tick> best_ask() const noexcept { return best_ask_; }
  std::optional<Tick> best(Side s) const noexcept { return s == Side::Buy ? best_bid_ : best_ask_; }
  std::optional<double> midpoint() const noexcept;

  // Cumulative ask volume from the best ask up to and including `l`.
  // Zero when l is below the best ask. Throws BookError on an empty ask side.
  Shares supply(Tick l) const;
  // Cumulative bid volume from the best bid down to and including `l`.
  Shares demand(Tick l) const;

  // Virtual price shift of a market order of `v` shares from `aggressor`:
  // l(v) - a for buys, b - l(v) for sells, in price units. Absent when the
  // opposite side holds fewer than v shares. Does not modify the book.
  std::optional<double> impact_shift(Side aggressor, Shares v) const;

  BookSnapshot snapshot(Step step) const;

  Shares volume_at(Side s, Tick t) const noexcept;
  Shares depth(Side s) const noexcept { return s == Side::Buy ? bid_depth_ : ask_depth_; }
  Shares resting_volume() const noexcept { return bid_depth_ + ask_depth_; }
  std::size_t order_count() const noexcept { return index_.size(); }
  std::size_t level_count(Side s) const noexcept { return s == Side::Buy ? bid_levels_ : ask_levels_; }
  double tick_size() const noexcept { return tick_size_; }

 private:
  struct Level {
    std::vector<Order> orders;
    std::size_t head{0};
    Shares total{0};

    bool empty() const noexcept { return head == orders.size(); }
  };

  struct Location {
    Side side;
    Tick tick;
  };

  using ExpiryEntry = std::pair<Step, OrderId>;

  std::vector<Level>& levels(Side s) noexcept { return s == Side::Buy ? bids_ : asks_; }
  const std::vector<Level>& levels(Side s) const noexcept { return s == Side::Buy ? bids_ : asks_; }
  const Level* level_ptr(Side s, Tick t) const noexcept;
  Level& level_ref(Side s, Tick t);

  // Fill `remaining` against the opposite side while its best tick satisfies
  // `limit`; an absent limit matches any price.
  void match(Side aggressor, OrderId aggressor_id, std::optional<Tick> limit, Shares& remaining, Step step,
             std::vector<Trade>& out);
  void rest(const Order& order);
  void on_level_emptied(Side s, Tick t);
  void remove_resting(OrderId id, const Location& loc);

  double tick_size_;
  std::vector<Level> bids_;
  std::vector<Level> asks_;
  std::optional<Tick> best_bid_;
  std::optional<Tick> best_ask_;
  std::size_t bid_levels_{0};
  std::size_t ask_levels_{0};
  Shares bid_depth_{0};
  Shares ask_depth_{0};
  std::unordered_map<OrderId, Location> index_;
  std::priority_queue<ExpiryEntry, std::vector<ExpiryEntry>, std::greater<>> expiries_;
  std::optional<OrderId> last_id_;
};

// Snapshot-based analytics. These operate on recorded books and must agree
// with the live OrderBook queries of the same name.
Shares supply(const BookSnapshot& snap, Tick l);
Shares demand(const BookSnapshot& snap, Tick l);
std::optional<double> impact_shift(const BookSnapshot& snap, Side aggressor, Shares v, double tick_size);

}  // namespace lobsim
