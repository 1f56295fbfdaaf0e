#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "futurequant/backtest.hpp"
#include "futurequant/baselines.hpp"
#include "futurequant/futurequant.hpp"
#include "futurequant/indicators.hpp"
#include "futurequant/market_data.hpp"
#include "futurequant/metrics.hpp"
#include "futurequant/strategy.hpp"
#include "futurequant/synthetic.hpp"
#include "futurequant/train.hpp"

namespace fq {

enum class DataSource { kSynthetic, kTicks, kBars };

std::string_view to_string(DataSource source) noexcept;

struct DataConfig {
  DataSource source = DataSource::kSynthetic;
  std::filesystem::path path;  // tick or bar file
  char delimiter = ',';
  std::int64_t timestamp_tolerance_ms = 0;
  std::int64_t bar_interval_ms = 30'000;
  std::vector<Feature> features{Feature::kClose};
  std::size_t window_out = 1;
  std::size_t stride = 1;
  std::vector<double> split{0.7, 0.15, 0.15};
};

struct CompareConfig {
  std::vector<std::string> models{"futurequant", "quantile-linear", "quantile-mlp"};
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";
  DataConfig data;
  SyntheticSpec synthetic;
  ModelSpec model;
  std::size_t baseline_window_in = 30;
  std::vector<std::size_t> baseline_mlp_hidden{32, 16};
  TrainConfig train;
  MetricConfig metrics;
  IndicatorConfig indicators;
  StrategyConfig strategy;
  BacktestConfig backtest;
  CompareConfig compare;

  void set_seed(std::uint64_t value) noexcept {
    seed = value;
    synthetic.seed = value;
    train.seed = value;
  }

  // Cross-field checks: split sums to one, feature count matches the model.
  void validate() const;
};

// Sectioned "key = value" text. '#' starts a comment. Unknown sections or
// keys, duplicates and malformed values throw ConfigError with the line.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace fq
