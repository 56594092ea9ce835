#include "lobsim/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lobsim::io {

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

}  // namespace

void write_trade_tape(const std::filesystem::path& path, std::span<const Trade> tape, double tick_size) {
  auto out = open_out(path);
  out << "step,price,shares,aggressor_side\n";
  for (const auto& t : tape)
    out << t.step << ',' << format_double(t.tick.price(tick_size)) << ',' << t.shares << ','
        << to_string(t.aggressor_side) << '\n';
}

void write_price_series(const std::filesystem::path& path, std::span<const double> prices,
                        std::span<const Shares> resting_volume) {
  if (prices.size() != resting_volume.size()) throw std::invalid_argument("write_price_series: length mismatch");
  auto out = open_out(path);
  out << "step,price,resting_volume\n";
  for (std::size_t i = 0; i < prices.size(); ++i)
    out << i << ',' << format_double(prices[i]) << ',' << resting_volume[i] << '\n';
}

void write_snapshots(const std::filesystem::path& path, std::span<const BookSnapshot> snapshots, double tick_size) {
  auto out = open_out(path);
  out << "step,side,tick,price,shares\n";
  for (const auto& snap : snapshots) {
    for (auto it = snap.bids.rbegin(); it != snap.bids.rend(); ++it)
      out << snap.step << ",buy," << it->tick.index << ',' << format_double(it->tick.price(tick_size)) << ','
          << -it->shares << '\n';
    for (const auto& lv : snap.asks)
      out << snap.step << ",sell," << lv.tick.index << ',' << format_double(lv.tick.price(tick_size)) << ','
          << lv.shares << '\n';
  }
}

void write_histogram(const std::filesystem::path& path, const stats::Histogram& h) {
  auto out = open_out(path);
  out << "bin_center,density\n";
  for (std::size_t i = 0; i < h.centers.size(); ++i)
    out << format_double(h.centers[i]) << ',' << format_double(h.density[i]) << '\n';
}

void write_ccdf(const std::filesystem::path& path, std::span<const std::pair<double, double>> ccdf,
                const std::string& x_name) {
  auto out = open_out(path);
  out << x_name << ",ccdf\n";
  for (const auto& [x, p] : ccdf) out << format_double(x) << ',' << format_double(p) << '\n';
}

void write_column(const std::filesystem::path& path, const std::string& name, std::span<const double> values) {
  auto out = open_out(path);
  out << name << '\n';
  for (double v : values) out << format_double(v) << '\n';
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  auto out = open_out(path);
  out << contents;
}

}  // namespace lobsim::io
