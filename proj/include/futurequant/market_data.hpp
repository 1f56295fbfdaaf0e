#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "futurequant/tensor.hpp"

namespace fq {

// Milliseconds since the Unix epoch, or since midnight when the feed carries
// time-of-day only.
using Millis = std::int64_t;

// One level-1 order book snapshot.
struct TickRecord {
  std::int64_t update_time = 0;  // whole seconds
  int update_millisec = 0;       // [0, 999]
  double last_price = 0.0;
  std::int64_t volume = 0;  // cumulative
  double bid_price1 = 0.0;
  std::int64_t bid_volume1 = 0;
  double ask_price1 = 0.0;
  std::int64_t ask_volume1 = 0;

  Millis timestamp() const noexcept { return update_time * 1000 + update_millisec; }
};

inline constexpr std::string_view kTickFields[] = {
    "UpdateTime", "UpdateMillisec", "LastPrice",  "Volume",
    "BidPrice1",  "BidVolume1",     "AskPrice1",  "AskVolume1",
};

struct ParseOptions {
  char delimiter = ',';
  // Largest tolerated backwards step between consecutive rows.
  Millis timestamp_tolerance_ms = 0;
};

struct ParseResult {
  std::vector<TickRecord> ticks;
  std::size_t rows = 0;
  // Rows with a zero bid or ask (missing quote sentinel); skipped, not fatal.
  std::size_t dropped_missing_quote = 0;
};

// Reads a delimited tick file with a header naming the eight fields in any
// order. Extra columns are ignored.
ParseResult parse_ticks(std::istream& in, const ParseOptions& options = {});

// "HH:MM:SS", "YYYY-MM-DD HH:MM:SS", "YYYY-MM-DDTHH:MM:SS" or "YYYYMMDD HH:MM:SS".
std::int64_t parse_update_time(std::string_view text);
std::string format_update_time(std::int64_t seconds);

void write_ticks_csv(std::ostream& out, std::span<const TickRecord> ticks, char delimiter = ',');

struct Bar {
  Millis open_time = 0;
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
  std::int64_t volume_delta = 0;
  double spread = 0.0;  // ask - bid at the last tick of the bar
};

// Buckets ticks into fixed intervals aligned to multiples of `interval`.
// Intervals without ticks between populated ones are forward-filled.
std::vector<Bar> resample(std::span<const TickRecord> ticks, std::chrono::milliseconds interval);

void write_bars_csv(std::ostream& out, std::span<const Bar> bars);
std::vector<Bar> read_bars_csv(std::istream& in);

enum class Feature { kClose, kSpread, kVolumeDelta, kRange };

std::string_view to_string(Feature feature) noexcept;
Feature parse_feature(std::string_view name);
double feature_value(const Bar& bar, Feature feature) noexcept;

// Per-feature min-max scaling, x -> (x - x_min) / (x_max - x_min).
struct NormalizationParams {
  std::vector<double> x_min;
  std::vector<double> x_max;

  std::size_t size() const noexcept { return x_min.size(); }
  void validate() const;
  double apply(double x, std::size_t feature) const noexcept {
    return (x - x_min[feature]) / (x_max[feature] - x_min[feature]);
  }
  double invert(double z, std::size_t feature) const noexcept {
    return z * (x_max[feature] - x_min[feature]) + x_min[feature];
  }
};

NormalizationParams fit_minmax(std::span<const std::vector<double>> columns);
// values is (rows x features); column j is scaled with feature j.
Matrix apply_minmax(const Matrix& values, const NormalizationParams& params);
Matrix invert_minmax(const Matrix& normalized, const NormalizationParams& params);

struct WindowShape {
  std::size_t window_in = 5;
  std::size_t window_out = 1;
  std::size_t stride = 1;
};

struct WindowedDataset {
  Tensor3 inputs;  // (N, window_in, F)
  Matrix targets;  // (N, window_out), close prices
  std::vector<std::string> feature_names;
  NormalizationParams norm;         // empty while values are raw
  NormalizationParams target_norm;  // single entry, empty while raw
  std::vector<Millis> input_end_time;
  std::vector<Millis> target_time;
  std::vector<std::size_t> target_index;  // bar index of the first target

  std::size_t size() const noexcept { return inputs.samples(); }
  bool normalized() const noexcept { return norm.size() > 0; }
  Vector first_target() const { return targets.col(0); }
  WindowedDataset slice(std::size_t begin, std::size_t end) const;
};

WindowedDataset make_windows(std::span<const Bar> bars, std::span<const Feature> features,
                             const WindowShape& shape);

// Scales inputs with `norm` and targets with `target_norm` (one entry).
WindowedDataset normalized(const WindowedDataset& raw, const NormalizationParams& norm,
                           const NormalizationParams& target_norm);

struct DatasetSplits {
  WindowedDataset train;
  WindowedDataset validation;
  WindowedDataset test;
  std::size_t train_bar_end = 0;       // bars [0, train_bar_end) fit the scaler
  std::size_t validation_bar_end = 0;  // test targets start here
};

// Chronological split by the bar index of each sample's target. Inputs of a
// later split may reach back into earlier bars; targets never cross.
// Normalization is fitted on the training bar range only.
DatasetSplits prepare_splits(std::span<const Bar> bars, std::span<const Feature> features,
                             const WindowShape& shape, std::span<const double> fractions);

}  // namespace fq
