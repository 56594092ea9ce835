#pragma once
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lobsim/impact.hpp"
#include "lobsim/simulator.hpp"
#include "lobsim/stats.hpp"

namespace lobsim::experiments {

// Steps in one trading day (390 one-minute bars) for the volume-per-day axis.
inline constexpr Step kStepsPerDay = 23'400;

struct ArtifactSet {
  bool return_pdf{true};
  bool kurtosis_point{true};
  bool volatility_pdf{true};
  bool impact_curves{false};
  bool snapshots{false};
};

enum class ImpactAveraging : std::uint8_t { Pooled, PerSimulation };

struct Scenario {
  std::string name{"scenario"};
  SimConfig config;
  std::vector<std::uint64_t> seeds;
  ArtifactSet outputs;

  std::optional<double> calibrate_tpm;     // recalibrate c before running
  std::optional<Step> calibration_horizon; // probe length; default warmup + 20000
  Step volatility_window{1000};            // steps
  std::vector<double> impact_quantiles{0.1, 0.5, 0.9, 0.99};
  std::vector<Shares> impact_volumes;      // explicit volumes override the quantiles
  bool pooled_normalization{false};        // normalize the pooled raw returns instead of per run
  ImpactAveraging impact_averaging{ImpactAveraging::Pooled};
  bool write_runs{true};                   // per-seed CSVs under runs/<seed>/
};

// Seeds derived from one master value: derive_seed(master, 0..runs-1).
std::vector<std::uint64_t> derive_seeds(std::uint64_t master, std::size_t runs);

// Flat `key = value` format; `#` starts a comment. Trader groups use
// `group.<label>.<field>` keys (kind, count, kappa, mu_lifetime, sigma_price).
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);
// Canonical text of a scenario; parse_scenario(to_config_text(s)) reproduces s.
std::string to_config_text(const Scenario& s);

// Scale a scenario up to 5000 seeds and T = 5e5 steps.
void apply_full_scale(Scenario& s);

struct RunSummary {
  std::uint64_t seed{0};
  stats::ReturnSeries returns;
  stats::ReturnSeries normalized;  // empty when the run had zero return variance
  std::vector<double> volatilities;
  double mean_resting_volume{0.0};
  double trades_per_minute{0.0};
  std::vector<Shares> trade_sizes;
  std::vector<impact::ImpactCurve> impact_curves;  // per (volume, side): buy curves first
};

struct ScenarioResult {
  Scenario scenario;                 // as run, with calibrated c and resolved volumes
  std::vector<RunSummary> runs;      // ascending seed order
  std::vector<double> pooled_normalized;
  stats::Moments pooled_moments;
  double excess_kurtosis{0.0};
  double kurtosis_stderr{0.0};       // across-seed standard error of per-run kurtosis
  std::vector<double> volatilities;
  stats::LogNormalFit volatility_fit;
  double avg_volume_per_day{0.0};
  double trades_per_minute{0.0};
  std::vector<impact::ImpactCurve> impact_curves;  // pooled or averaged, buy curves first
};

class RunFailure : public std::runtime_error {
 public:
  RunFailure(std::uint64_t seed, const std::string& what)
      : std::runtime_error("run with seed " + std::to_string(seed) + " failed: " + what), seed_(seed) {}
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
};

struct RunOptions {
  std::size_t workers{0};                     // 0: LOBSIM_WORKERS or hardware concurrency
  std::optional<std::filesystem::path> out_dir;  // scenario directory is out_dir / name
};

std::size_t resolve_workers(std::size_t requested);

// Calibrate c for the scenario if requested; returns the scenario as it will run.
Scenario prepare(const Scenario& scenario);

// Trade sizes of every run of `scenario`, in seed order.
std::vector<Shares> collect_trade_sizes(const Scenario& scenario, const RunOptions& options = {});

ScenarioResult run_scenario(const Scenario& scenario, const RunOptions& options = {});

void write_pooled(const ScenarioResult& result, const std::filesystem::path& scenario_dir);

struct SweepRow {
  double mu_lifetime{0.0};
  double avg_volume_per_day{0.0};
  double excess_kurtosis{0.0};
  double stderr_kurtosis{0.0};
  double c{0.0};
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

// Runs `base` once per lifetime with every trader group's mu_lifetime set to it.
SweepResult lifetime_sweep(const Scenario& base, const std::vector<double>& lifetimes, const RunOptions& options = {});
void write_sweep(const SweepResult& sweep, const std::filesystem::path& path);

// Adds n_big BigTraders with the given kappa, inheriting lifetime and
// placement width from the first group of `base`.
Scenario bigtrader_scenario(const Scenario& base, double kappa, std::size_t n_big);

}  // namespace lobsim::experiments
