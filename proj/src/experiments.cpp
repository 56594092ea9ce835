#include "lobsim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "lobsim/io.hpp"

namespace lobsim::experiments {

std::vector<std::uint64_t> derive_seeds(std::uint64_t master, std::size_t runs) {
  std::vector<std::uint64_t> seeds;
  seeds.reserve(runs);
  for (std::size_t i = 0; i < runs; ++i) seeds.push_back(derive_seed(master, i));
  return seeds;
}

// ---------------------------------------------------------------------------
// Config text
// ---------------------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (!s.empty()) {
    const auto comma = s.find(',');
    const auto item = trim(s.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

template <class T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw std::invalid_argument("config: bad value for '" + std::string(key) + "': " + std::string(v));
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: bad boolean for '" + std::string(key) + "': " + std::string(v));
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>)
      out += io::format_double(v[i]);
    else
      out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  Scenario s;
  std::optional<std::uint64_t> master;
  std::optional<std::size_t> runs;
  std::vector<std::string> group_order;
  std::map<std::string, TraderSpec> groups;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto val = trim(line.substr(eq + 1));

    if (key.starts_with("group.")) {
      const auto rest = key.substr(6);
      const auto dot = rest.rfind('.');
      if (dot == std::string_view::npos || dot == 0)
        throw std::invalid_argument("config: group keys are group.<label>.<field>: " + std::string(key));
      const std::string label(rest.substr(0, dot));
      const auto field = rest.substr(dot + 1);
      if (!groups.contains(label)) group_order.push_back(label);
      auto& g = groups[label];
      if (field == "kind") {
        const auto k = parse_trader_kind(val);
        if (!k) throw std::invalid_argument("config: unknown trader kind: " + std::string(val));
        g.kind = *k;
      } else if (field == "count") {
        g.count = parse_number<std::size_t>(key, val);
      } else if (field == "kappa") {
        g.kappa = parse_number<double>(key, val);
      } else if (field == "mu_lifetime") {
        g.mu_lifetime = parse_number<double>(key, val);
      } else if (field == "sigma_price") {
        g.sigma_price = parse_number<double>(key, val);
      } else {
        throw std::invalid_argument("config: unknown group field: " + std::string(field));
      }
      continue;
    }

    auto& cfg = s.config;
    if (key == "name") s.name = std::string(val);
    else if (key == "seeds") {
      s.seeds.clear();
      for (auto item : split_list(val)) s.seeds.push_back(parse_number<std::uint64_t>(key, item));
    } else if (key == "master_seed") master = parse_number<std::uint64_t>(key, val);
    else if (key == "runs") runs = parse_number<std::size_t>(key, val);
    else if (key == "c") cfg.c = parse_number<double>(key, val);
    else if (key == "mu_vol") cfg.mu_vol = parse_number<double>(key, val);
    else if (key == "tick_size") cfg.tick_size = parse_number<double>(key, val);
    else if (key == "start_price") cfg.start_price = parse_number<double>(key, val);
    else if (key == "horizon") cfg.horizon = parse_number<Step>(key, val);
    else if (key == "warmup") cfg.warmup = parse_number<Step>(key, val);
    else if (key == "snapshot_interval") cfg.snapshot_interval = parse_number<Step>(key, val);
    else if (key == "steps_per_minute") cfg.steps_per_minute = parse_number<Step>(key, val);
    else if (key == "calibrate_tpm") s.calibrate_tpm = parse_number<double>(key, val);
    else if (key == "calibration_horizon") s.calibration_horizon = parse_number<Step>(key, val);
    else if (key == "volatility_window") s.volatility_window = parse_number<Step>(key, val);
    else if (key == "pooled_normalization") s.pooled_normalization = parse_bool(key, val);
    else if (key == "write_runs") s.write_runs = parse_bool(key, val);
    else if (key == "impact_quantiles") {
      s.impact_quantiles.clear();
      for (auto item : split_list(val)) s.impact_quantiles.push_back(parse_number<double>(key, item));
    } else if (key == "impact_volumes") {
      s.impact_volumes.clear();
      for (auto item : split_list(val)) s.impact_volumes.push_back(parse_number<Shares>(key, item));
    } else if (key == "impact_averaging") {
      if (val == "pooled") s.impact_averaging = ImpactAveraging::Pooled;
      else if (val == "per_simulation") s.impact_averaging = ImpactAveraging::PerSimulation;
      else throw std::invalid_argument("config: impact_averaging is pooled or per_simulation");
    } else if (key == "outputs") {
      s.outputs = ArtifactSet{false, false, false, false, false};
      for (auto item : split_list(val)) {
        if (item == "return_pdf") s.outputs.return_pdf = true;
        else if (item == "kurtosis_point") s.outputs.kurtosis_point = true;
        else if (item == "volatility_pdf") s.outputs.volatility_pdf = true;
        else if (item == "impact_curves") s.outputs.impact_curves = true;
        else if (item == "snapshots") s.outputs.snapshots = true;
        else throw std::invalid_argument("config: unknown output artifact: " + std::string(item));
      }
    } else {
      throw std::invalid_argument("config: unknown key: " + std::string(key));
    }
  }

  if (!group_order.empty()) {
    s.config.trader_specs.clear();
    for (const auto& label : group_order) s.config.trader_specs.push_back(groups[label]);
  }
  if (s.seeds.empty()) s.seeds = derive_seeds(master.value_or(1), runs.value_or(50));
  else if (master || runs) throw std::invalid_argument("config: give either seeds or master_seed/runs, not both");

  if (s.seeds.empty()) throw std::invalid_argument("config: scenario needs at least one seed");
  if (std::set<std::uint64_t>(s.seeds.begin(), s.seeds.end()).size() != s.seeds.size())
    throw std::invalid_argument("config: seeds must be distinct");
  validate(s.config);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) { return parse_scenario(io::read_file(path)); }

std::string to_config_text(const Scenario& s) {
  std::ostringstream o;
  const auto& c = s.config;
  o << "name = " << s.name << '\n';
  o << "seeds = " << join(s.seeds) << '\n';
  o << "c = " << io::format_double(c.c) << '\n';
  o << "mu_vol = " << io::format_double(c.mu_vol) << '\n';
  o << "tick_size = " << io::format_double(c.tick_size) << '\n';
  o << "start_price = " << io::format_double(c.start_price) << '\n';
  o << "horizon = " << c.horizon << '\n';
  if (c.warmup) o << "warmup = " << *c.warmup << '\n';
  o << "snapshot_interval = " << c.snapshot_interval << '\n';
  o << "steps_per_minute = " << c.steps_per_minute << '\n';
  if (s.calibrate_tpm) o << "calibrate_tpm = " << io::format_double(*s.calibrate_tpm) << '\n';
  if (s.calibration_horizon) o << "calibration_horizon = " << *s.calibration_horizon << '\n';
  o << "volatility_window = " << s.volatility_window << '\n';
  o << "impact_quantiles = " << join(s.impact_quantiles) << '\n';
  if (!s.impact_volumes.empty()) o << "impact_volumes = " << join(s.impact_volumes) << '\n';
  o << "impact_averaging = " << (s.impact_averaging == ImpactAveraging::Pooled ? "pooled" : "per_simulation") << '\n';
  o << "pooled_normalization = " << (s.pooled_normalization ? "true" : "false") << '\n';
  o << "write_runs = " << (s.write_runs ? "true" : "false") << '\n';

  std::vector<std::string> outs;
  if (s.outputs.return_pdf) outs.emplace_back("return_pdf");
  if (s.outputs.kurtosis_point) outs.emplace_back("kurtosis_point");
  if (s.outputs.volatility_pdf) outs.emplace_back("volatility_pdf");
  if (s.outputs.impact_curves) outs.emplace_back("impact_curves");
  if (s.outputs.snapshots) outs.emplace_back("snapshots");
  o << "outputs = ";
  for (std::size_t i = 0; i < outs.size(); ++i) o << (i ? "," : "") << outs[i];
  o << '\n';

  for (std::size_t g = 0; g < c.trader_specs.size(); ++g) {
    const auto& t = c.trader_specs[g];
    const std::string p = "group.g" + std::to_string(g) + ".";
    o << p << "kind = " << to_string(t.kind) << '\n';
    o << p << "count = " << t.count << '\n';
    o << p << "kappa = " << io::format_double(t.kappa) << '\n';
    o << p << "mu_lifetime = " << io::format_double(t.mu_lifetime) << '\n';
    o << p << "sigma_price = " << io::format_double(t.sigma_price) << '\n';
  }
  return o.str();
}

void apply_full_scale(Scenario& s) {
  s.seeds = derive_seeds(s.seeds.front(), 5000);
  s.config.horizon = 500'000;
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

std::size_t resolve_workers(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LOBSIM_WORKERS")) {
    std::size_t n = 0;
    const std::string_view v(env);
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
    if (ec == std::errc{} && ptr == v.data() + v.size() && n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

// Runs fn(i) for i in [0, n) on a worker pool. If any call throws, the
// failure with the lowest index is rethrown after all workers finish.
template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex mu;
  std::size_t failed_index = n;
  std::exception_ptr failure;

  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
        failed.store(true);
      }
    }
  };

  workers = std::min(workers, n);
  if (workers <= 1) {
    body();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
  }
  if (failure) std::rethrow_exception(failure);
}

SimConfig run_config(const Scenario& s, std::uint64_t seed) {
  SimConfig cfg = s.config;
  cfg.seed = seed;
  if ((s.outputs.impact_curves || s.outputs.snapshots) && cfg.snapshot_interval == 0)
    cfg.snapshot_interval = cfg.steps_per_minute;
  return cfg;
}

impact::ImpactCurve run_curve(std::span<const BookSnapshot> snaps, Side side, Shares v, double tick_size) {
  if (!snaps.empty()) {
    try {
      return impact::impact_distribution(snaps, side, v, tick_size);
    } catch (const std::runtime_error&) {
      // every snapshot censored; keep the count, pool later
    }
  }
  impact::ImpactCurve c;
  c.volume = v;
  c.side = side;
  c.censored_count = snaps.size();
  c.snapshot_count = snaps.size();
  return c;
}

RunSummary run_one(const Scenario& s, std::uint64_t seed, std::span<const Shares> volumes, bool keep_sizes,
                   const std::optional<std::filesystem::path>& run_dir) {
  const SimConfig cfg = run_config(s, seed);
  const SimOutput out = run(cfg);

  RunSummary r;
  r.seed = seed;
  const std::span<const double> prices(out.price_series);
  r.returns = stats::returns(prices.subspan(static_cast<std::size_t>(out.warmup)), cfg.steps_per_minute);
  try {
    r.normalized = stats::normalize(r.returns);
  } catch (const std::domain_error&) {
    r.normalized.delta_t = r.returns.delta_t;  // flat price path, nothing to normalize
  }
  if (s.volatility_window / cfg.steps_per_minute >= 2) r.volatilities = stats::moving_volatility(r.returns, s.volatility_window);
  r.mean_resting_volume = mean_resting_volume(out);
  r.trades_per_minute = out.trades_per_minute;
  if (keep_sizes) {
    r.trade_sizes.reserve(out.trade_tape.size());
    for (const auto& t : out.trade_tape) r.trade_sizes.push_back(t.shares);
  }
  for (const Side side : {Side::Buy, Side::Sell})
    for (const Shares v : volumes) r.impact_curves.push_back(run_curve(out.snapshots, side, v, cfg.tick_size));

  if (run_dir) {
    io::write_trade_tape(*run_dir / "trades.csv", out.trade_tape, cfg.tick_size);
    io::write_price_series(*run_dir / "prices.csv", out.price_series, out.resting_volume_series);
    if (s.outputs.snapshots) io::write_snapshots(*run_dir / "snapshots.csv", out.snapshots, cfg.tick_size);
  }
  return r;
}

std::vector<RunSummary> run_all(const Scenario& s, std::span<const Shares> volumes, bool keep_sizes,
                                const RunOptions& options) {
  std::vector<std::uint64_t> seeds = s.seeds;
  std::sort(seeds.begin(), seeds.end());
  std::vector<RunSummary> runs(seeds.size());
  const auto scenario_dir = options.out_dir ? std::optional(*options.out_dir / s.name) : std::nullopt;
  parallel_for(seeds.size(), resolve_workers(options.workers), [&](std::size_t i) {
    std::optional<std::filesystem::path> run_dir;
    if (scenario_dir && s.write_runs) run_dir = *scenario_dir / "runs" / std::to_string(seeds[i]);
    try {
      runs[i] = run_one(s, seeds[i], volumes, keep_sizes, run_dir);
    } catch (const std::exception& e) {
      throw RunFailure(seeds[i], e.what());
    }
  });
  return runs;
}

}  // namespace

Scenario prepare(const Scenario& scenario) {
  Scenario s = scenario;
  if (s.seeds.empty()) throw std::invalid_argument("scenario needs at least one seed");
  validate(s.config);
  if (s.calibrate_tpm) {
    SimConfig probe = s.config;
    probe.horizon = s.calibration_horizon.value_or(s.config.effective_warmup() + 20'000);
    probe.seed = derive_seed(s.seeds.front(), 0xC0FFEE);
    s.config.c = calibrate_c(*s.calibrate_tpm, probe).c;
    s.calibrate_tpm.reset();
  }
  return s;
}

std::vector<Shares> collect_trade_sizes(const Scenario& scenario, const RunOptions& options) {
  Scenario s = prepare(scenario);
  s.outputs.impact_curves = false;
  RunOptions quiet = options;
  quiet.out_dir.reset();
  std::vector<Shares> sizes;
  for (auto& r : run_all(s, {}, true, quiet)) sizes.insert(sizes.end(), r.trade_sizes.begin(), r.trade_sizes.end());
  return sizes;
}

ScenarioResult run_scenario(const Scenario& scenario, const RunOptions& options) {
  ScenarioResult res;
  res.scenario = prepare(scenario);
  Scenario& s = res.scenario;

  if (s.outputs.impact_curves && s.impact_volumes.empty())
    s.impact_volumes = impact::quantile_volumes(collect_trade_sizes(s, options), s.impact_quantiles);
  const std::vector<Shares> volumes = s.outputs.impact_curves ? s.impact_volumes : std::vector<Shares>{};

  res.runs = run_all(s, volumes, false, options);

  std::vector<double> run_kurtosis;
  if (s.pooled_normalization) {
    stats::ReturnSeries raw;
    for (const auto& r : res.runs) raw.values.insert(raw.values.end(), r.returns.values.begin(), r.returns.values.end());
    res.pooled_normalized = stats::normalize(raw).values;
  } else {
    for (const auto& r : res.runs)
      res.pooled_normalized.insert(res.pooled_normalized.end(), r.normalized.values.begin(), r.normalized.values.end());
  }
  for (const auto& r : res.runs) {
    if (r.normalized.values.size() >= 4) run_kurtosis.push_back(stats::excess_kurtosis(r.normalized.values));
    res.volatilities.insert(res.volatilities.end(), r.volatilities.begin(), r.volatilities.end());
    res.avg_volume_per_day += r.mean_resting_volume;
    res.trades_per_minute += r.trades_per_minute;
  }
  const auto n_runs = static_cast<double>(res.runs.size());
  res.avg_volume_per_day /= n_runs;
  res.trades_per_minute /= n_runs;

  res.pooled_moments = stats::Moments(res.pooled_normalized);
  if (res.pooled_moments.count() >= 4 && res.pooled_moments.variance() > 0.0)
    res.excess_kurtosis = res.pooled_moments.excess_kurtosis();
  if (run_kurtosis.size() >= 2)
    res.kurtosis_stderr = stats::stddev(run_kurtosis) * std::sqrt(1.0 / static_cast<double>(run_kurtosis.size() - 1));

  std::vector<double> positive;
  std::copy_if(res.volatilities.begin(), res.volatilities.end(), std::back_inserter(positive),
               [](double v) { return v > 0.0; });
  if (!positive.empty()) res.volatility_fit = stats::lognormal_reference(positive);

  for (std::size_t k = 0; k < 2 * volumes.size(); ++k) {
    std::vector<impact::ImpactCurve> per_run;
    for (const auto& r : res.runs) {
      if (s.impact_averaging == ImpactAveraging::PerSimulation && r.impact_curves[k].ccdf.empty()) continue;
      per_run.push_back(r.impact_curves[k]);
    }
    if (s.impact_averaging == ImpactAveraging::Pooled || per_run.empty()) {
      std::vector<impact::ImpactCurve> all;
      for (const auto& r : res.runs) all.push_back(r.impact_curves[k]);
      res.impact_curves.push_back(impact::pool_curves(all));
    } else {
      res.impact_curves.push_back(impact::average_curves(per_run));
    }
  }

  if (options.out_dir) write_pooled(res, *options.out_dir / s.name);
  return res;
}

void write_pooled(const ScenarioResult& result, const std::filesystem::path& scenario_dir) {
  const auto& s = result.scenario;
  io::write_file(scenario_dir / "scenario.cfg", to_config_text(s));
  const auto pooled = scenario_dir / "pooled";
  std::filesystem::create_directories(pooled);

  if (s.outputs.kurtosis_point) {
    std::ostringstream o;
    o << "runs,count,mean,std,excess_kurtosis,kurtosis_stderr,avg_volume_per_day,trades_per_minute,c\n";
    o << result.runs.size() << ',' << result.pooled_moments.count() << ','
      << io::format_double(result.pooled_moments.mean()) << ',' << io::format_double(result.pooled_moments.std())
      << ',' << io::format_double(result.excess_kurtosis) << ',' << io::format_double(result.kurtosis_stderr) << ','
      << io::format_double(result.avg_volume_per_day) << ',' << io::format_double(result.trades_per_minute) << ','
      << io::format_double(s.config.c) << '\n';
    io::write_file(pooled / "moments.csv", o.str());
  }
  if (s.outputs.return_pdf && !result.pooled_normalized.empty())
    io::write_histogram(pooled / "return_pdf.csv", stats::estimate_pdf(result.pooled_normalized));
  if (s.outputs.volatility_pdf && !result.volatilities.empty()) {
    io::write_column(pooled / "volatility.csv", "sigma", result.volatilities);
    io::write_histogram(pooled / "volatility_pdf.csv", stats::estimate_pdf(result.volatilities));
    io::write_file(pooled / "volatility_lognormal.csv",
                   "location,scale\n" + io::format_double(result.volatility_fit.location) + ',' +
                       io::format_double(result.volatility_fit.scale) + '\n');
  }
  for (const auto& curve : result.impact_curves) {
    const std::string stem = "impact_" + std::string(to_string(curve.side)) + "_v" + std::to_string(curve.volume);
    io::write_ccdf(pooled / (stem + ".csv"), curve.ccdf, "delta_s");
    io::write_file(pooled / (stem + "_meta.csv"), "volume,side,censored_count,snapshot_count\n" +
                                                      std::to_string(curve.volume) + ',' +
                                                      std::string(to_string(curve.side)) + ',' +
                                                      std::to_string(curve.censored_count) + ',' +
                                                      std::to_string(curve.snapshot_count) + '\n');
  }
}

SweepResult lifetime_sweep(const Scenario& base, const std::vector<double>& lifetimes, const RunOptions& options) {
  if (lifetimes.empty()) throw std::invalid_argument("lifetime_sweep: no lifetimes");
  SweepResult sweep;
  for (const double mu : lifetimes) {
    Scenario s = base;
    s.name = base.name + "_lt" + io::format_double(mu);
    for (auto& g : s.config.trader_specs) g.mu_lifetime = mu;
    const auto res = run_scenario(s, options);
    sweep.rows.push_back({mu, res.avg_volume_per_day, res.excess_kurtosis, res.kurtosis_stderr, res.scenario.config.c});
  }
  return sweep;
}

void write_sweep(const SweepResult& sweep, const std::filesystem::path& path) {
  std::ostringstream o;
  o << "mu_lifetime,avg_volume_per_day,excess_kurtosis,stderr,c\n";
  for (const auto& r : sweep.rows)
    o << io::format_double(r.mu_lifetime) << ',' << io::format_double(r.avg_volume_per_day) << ','
      << io::format_double(r.excess_kurtosis) << ',' << io::format_double(r.stderr_kurtosis) << ','
      << io::format_double(r.c) << '\n';
  io::write_file(path, o.str());
}

Scenario bigtrader_scenario(const Scenario& base, double kappa, std::size_t n_big) {
  if (!(kappa >= 1.0)) throw std::invalid_argument("bigtrader_scenario: kappa must be >= 1");
  if (n_big == 0) return base;
  if (base.config.trader_specs.empty()) throw std::invalid_argument("bigtrader_scenario: base has no traders");
  Scenario s = base;
  s.name = base.name + "_big" + std::to_string(n_big) + "_k" + io::format_double(kappa);
  const auto& ref = base.config.trader_specs.front();
  s.config.trader_specs.push_back(TraderSpec{TraderKind::Big, n_big, kappa, ref.mu_lifetime, ref.sigma_price});
  return s;
}

}  // namespace lobsim::experiments
