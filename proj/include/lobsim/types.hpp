#pragma once
#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string_view>

namespace lobsim {

using Step = std::int64_t;
using Shares = std::int64_t;
using OrderId = std::uint64_t;
using TraderId = std::uint32_t;

enum class Side : std::uint8_t { Buy, Sell };

constexpr Side opposite(Side s) noexcept { return s == Side::Buy ? Side::Sell : Side::Buy; }

constexpr std::string_view to_string(Side s) noexcept { return s == Side::Buy ? "buy" : "sell"; }

// Discrete price level. Book logic works on the integer index only; prices
// exist at the edges (agents, statistics, CSV output).
struct Tick {
  std::int64_t index{1};

  constexpr auto operator<=>(const Tick&) const = default;

  constexpr Tick operator+(std::int64_t n) const noexcept { return Tick{index + n}; }
  constexpr Tick operator-(std::int64_t n) const noexcept { return Tick{index - n}; }

  double price(double tick_size) const noexcept { return static_cast<double>(index) * tick_size; }

  // Nearest tick to a price, never below tick 1.
  static Tick from_price(double price, double tick_size) {
    if (!(tick_size > 0.0)) throw std::invalid_argument("tick_size must be positive");
    const auto idx = std::llround(price / tick_size);
    return Tick{idx < 1 ? 1 : idx};
  }
};

}  // namespace lobsim
