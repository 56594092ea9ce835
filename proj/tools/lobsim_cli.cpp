#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>

#include "lobsim/experiments.hpp"
#include "lobsim/io.hpp"

using namespace lobsim;
namespace ex = lobsim::experiments;

namespace {

void print_summary(const ex::ScenarioResult& r) {
  std::printf("%-28s runs=%zu c=%.4g tpm=%.3f vol/day=%.1f gamma2=%.4f (+/- %.3f) n=%zu\n", r.scenario.name.c_str(),
              r.runs.size(), r.scenario.config.c, r.trades_per_minute, r.avg_volume_per_day, r.excess_kurtosis,
              r.kurtosis_stderr, r.pooled_moments.count());
}

ex::Scenario load(const std::string& path, bool full_scale) {
  auto s = ex::load_scenario(path);
  if (full_scale) ex::apply_full_scale(s);
  for (const auto& w : validate(s.config)) std::cerr << "warning: " << w << '\n';
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Agent-based limit order book simulator"};
  app.require_subcommand(1);

  std::string out_dir = "out";
  std::size_t workers = 0;
  bool full_scale = false;
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--workers", workers, "Worker threads (default: LOBSIM_WORKERS or all cores)");
  app.add_flag("--full-scale", full_scale, "5000 seeds x 5e5 steps per scenario");

  auto* run_cmd = app.add_subcommand("run", "Run one scenario and emit pooled statistics");
  std::string run_cfg;
  std::size_t n_big = 0;
  double kappa = 5.0;
  run_cmd->add_option("config", run_cfg, "Scenario config file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--big-traders", n_big, "Add this many BigTraders to the population");
  run_cmd->add_option("--kappa", kappa, "BigTrader order-size multiplier")->capture_default_str();

  auto* sweep_cmd = app.add_subcommand("sweep", "Order-lifetime sweep: kurtosis vs resting volume");
  std::string sweep_cfg;
  std::vector<double> lifetimes;
  sweep_cmd->add_option("config", sweep_cfg, "Base scenario config file")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--lifetimes", lifetimes, "Mean order lifetimes in steps")->required()->delimiter(',');

  auto* cal_cmd = app.add_subcommand("calibrate", "Find c reproducing a target trade frequency");
  double target_tpm = 5.4;
  std::string cal_cfg;
  std::size_t cal_seeds = 8;
  Step cal_horizon = 0;
  cal_cmd->add_option("--target-tpm", target_tpm, "Target trades per minute")->capture_default_str();
  cal_cmd->add_option("--config", cal_cfg, "Probe scenario (default population otherwise)")->check(CLI::ExistingFile);
  cal_cmd->add_option("--seeds", cal_seeds, "Probe seeds per evaluation")->capture_default_str();
  cal_cmd->add_option("--horizon", cal_horizon, "Probe run length in steps (default warmup + 20000)");

  auto* imp_cmd = app.add_subcommand("impact", "Virtual market impact curves for quantile volumes");
  std::string imp_cfg, volume_source;
  std::vector<double> quantiles{0.1, 0.5, 0.9, 0.99};
  bool per_sim = false;
  imp_cmd->add_option("scenario", imp_cfg, "Scenario config file")->required()->check(CLI::ExistingFile);
  imp_cmd->add_option("--quantiles", quantiles, "Traded-volume quantiles")->delimiter(',');
  imp_cmd->add_option("--volume-source", volume_source, "Scenario whose trade sizes define the quantile volumes")
      ->check(CLI::ExistingFile);
  imp_cmd->add_flag("--per-simulation", per_sim, "Average per-simulation CCDFs instead of pooling snapshots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;  // --help exits cleanly
  }

  ex::RunOptions opts;
  opts.workers = workers;
  opts.out_dir = out_dir;

  try {
    if (*run_cmd) {
      auto s = load(run_cfg, full_scale);
      // BigTraders join a market calibrated without them
      if (n_big > 0) s = ex::bigtrader_scenario(ex::prepare(s), kappa, n_big);
      print_summary(ex::run_scenario(s, opts));
    } else if (*sweep_cmd) {
      const auto base = load(sweep_cfg, full_scale);
      const auto sweep = ex::lifetime_sweep(base, lifetimes, opts);
      const auto path = std::filesystem::path(out_dir) / (base.name + "_sweep.csv");
      ex::write_sweep(sweep, path);
      std::printf("%10s %16s %12s %10s %8s\n", "mu_lt", "vol_per_day", "gamma2", "stderr", "c");
      for (const auto& r : sweep.rows)
        std::printf("%10.0f %16.1f %12.4f %10.4f %8.4g\n", r.mu_lifetime, r.avg_volume_per_day, r.excess_kurtosis,
                    r.stderr_kurtosis, r.c);
      std::printf("wrote %s\n", path.c_str());
    } else if (*cal_cmd) {
      SimConfig probe = cal_cfg.empty() ? SimConfig{} : load(cal_cfg, false).config;
      if (cal_horizon > 0) probe.horizon = cal_horizon;
      else if (cal_cfg.empty()) probe.horizon = probe.effective_warmup() + 20'000;
      CalibrationOptions copts;
      copts.seeds = cal_seeds;
      const auto res = calibrate_c(target_tpm, probe, copts);
      std::printf("c = %.6g  (measured %.3f trades/min after %d probes)\n", res.c, res.measured_tpm, res.iterations);
    } else if (*imp_cmd) {
      auto s = load(imp_cfg, full_scale);
      s.outputs.impact_curves = true;
      s.impact_quantiles = quantiles;
      s.impact_averaging = per_sim ? ex::ImpactAveraging::PerSimulation : ex::ImpactAveraging::Pooled;
      if (!volume_source.empty()) {
        const auto sizes = ex::collect_trade_sizes(load(volume_source, full_scale), opts);
        s.impact_volumes = impact::quantile_volumes(sizes, quantiles);
      }
      const auto res = ex::run_scenario(s, opts);
      print_summary(res);
      for (const auto& c : res.impact_curves)
        std::printf("  %-4s v=%-6lld realised=%zu censored=%zu\n", std::string(to_string(c.side)).c_str(),
                    static_cast<long long>(c.volume), c.shifts.size(), c.censored_count);
    }
  } catch (const ex::RunFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
