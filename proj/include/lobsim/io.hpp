#pragma once
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lobsim/orderbook.hpp"
#include "lobsim/stats.hpp"

namespace lobsim::io {

// Shortest round-trip representation; stable across runs.
std::string format_double(double v);

// step,price,shares,aggressor_side
void write_trade_tape(const std::filesystem::path& path, std::span<const Trade> tape, double tick_size);
// step,price,resting_volume
void write_price_series(const std::filesystem::path& path, std::span<const double> prices,
                        std::span<const Shares> resting_volume);
// step,side,tick,price,shares; bid volume is emitted negative for plotting
void write_snapshots(const std::filesystem::path& path, std::span<const BookSnapshot> snapshots, double tick_size);
// bin_center,density
void write_histogram(const std::filesystem::path& path, const stats::Histogram& h);
// <x_name>,ccdf
void write_ccdf(const std::filesystem::path& path, std::span<const std::pair<double, double>> ccdf,
                const std::string& x_name = "x");
// single column with header
void write_column(const std::filesystem::path& path, const std::string& name, std::span<const double> values);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace lobsim::io
