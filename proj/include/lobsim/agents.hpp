#pragma once
#include <cstddef>
#include <optional>
#include <random>
#include <string_view>

#include "lobsim/orderbook.hpp"
#include "lobsim/types.hpp"

namespace lobsim {

using Rng = std::mt19937_64;

enum class TraderKind : std::uint8_t { Random, Big };

std::string_view to_string(TraderKind k) noexcept;
std::optional<TraderKind> parse_trader_kind(std::string_view s) noexcept;

// One homogeneous group of traders.
struct TraderSpec {
  TraderKind kind{TraderKind::Random};
  std::size_t count{300};
  double kappa{1.0};          // order-size multiplier; 1 for Random traders
  double mu_lifetime{120.0};  // mean order lifetime, steps
  double sigma_price{0.8};    // std. dev. of limit-price placement, price units
};

struct TraderState {
  TraderId trader_id{0};
  std::size_t spec_index{0};
  Step next_active_step{0};
};

struct OrderIntent {
  Side side{Side::Buy};
  Tick limit{};
  Shares shares{1};
  Step lifetime_steps{1};
};

// What a trader is allowed to see of the book.
struct BookView {
  std::optional<Tick> best_bid;
  std::optional<Tick> best_ask;
  double tick_size{0.1};

  static BookView of(const OrderBook& book) { return {book.best_bid(), book.best_ask(), book.tick_size()}; }
};

// Population-wide parameters shared by every activation in a run.
struct ActivityParams {
  double c{1.0};               // waiting-time scale; mean wait is c * population
  std::size_t population{1};   // total number of traders N
  double mu_vol{10.0};         // mean order size before kappa scaling
  double fallback_price{100.0};
};

// Continuous exponential draw with the given mean. The integer draws below are
// the ceiling (times) or rounding (shares) of exactly this value.
double exponential_draw(Rng& rng, double mean);

Step draw_waiting_time(Rng& rng, double c, std::size_t n);
Step draw_lifetime(Rng& rng, double mu_lifetime);
Shares draw_volume(Rng& rng, double mu_vol, double kappa);
Tick draw_limit_price(Rng& rng, Side side, const BookView& view, double sigma_price, double fallback_price);

// One activation: side, limit price, volume, lifetime and the next waiting time
// are drawn in that order. Advances trader.next_active_step.
OrderIntent act(TraderState& trader, const TraderSpec& spec, const BookView& view, const ActivityParams& params,
                Rng& rng, Step step);

}  // namespace lobsim
