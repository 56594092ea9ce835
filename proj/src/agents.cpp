#include "lobsim/agents.hpp"

#include <algorithm>
#include <cmath>

namespace lobsim {

std::string_view to_string(TraderKind k) noexcept { return k == TraderKind::Random ? "random" : "big"; }

std::optional<TraderKind> parse_trader_kind(std::string_view s) noexcept {
  if (s == "random") return TraderKind::Random;
  if (s == "big") return TraderKind::Big;
  return std::nullopt;
}

double exponential_draw(Rng& rng, double mean) { return std::exponential_distribution<double>(1.0 / mean)(rng); }

namespace {

Step ceil_steps(double x) { return std::max<Step>(1, static_cast<Step>(std::ceil(x))); }

}  // namespace

Step draw_waiting_time(Rng& rng, double c, std::size_t n) {
  return ceil_steps(exponential_draw(rng, c * static_cast<double>(n)));
}

Step draw_lifetime(Rng& rng, double mu_lifetime) { return ceil_steps(exponential_draw(rng, mu_lifetime)); }

Shares draw_volume(Rng& rng, double mu_vol, double kappa) {
  const double v = exponential_draw(rng, mu_vol) * kappa;
  return std::max<Shares>(1, std::llround(v));
}

Tick draw_limit_price(Rng& rng, Side side, const BookView& view, double sigma_price, double fallback_price) {
  const auto best = side == Side::Buy ? view.best_bid : view.best_ask;
  const double center = best ? best->price(view.tick_size) : fallback_price;
  const double price = std::normal_distribution<double>(center, sigma_price)(rng);
  return Tick::from_price(price, view.tick_size);
}

OrderIntent act(TraderState& trader, const TraderSpec& spec, const BookView& view, const ActivityParams& params,
                Rng& rng, Step step) {
  OrderIntent intent;
  intent.side = std::bernoulli_distribution(0.5)(rng) ? Side::Buy : Side::Sell;
  intent.limit = draw_limit_price(rng, intent.side, view, spec.sigma_price, params.fallback_price);
  intent.shares = draw_volume(rng, params.mu_vol, spec.kappa);
  intent.lifetime_steps = draw_lifetime(rng, spec.mu_lifetime);
  trader.next_active_step = step + draw_waiting_time(rng, params.c, params.population);
  return intent;
}

}  // namespace lobsim
