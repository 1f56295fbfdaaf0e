#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "futurequant/market_data.hpp"
#include "futurequant/quantile.hpp"

namespace fq {

struct IndicatorConfig {
  std::size_t rsi_period = 14;
  std::size_t atr_period = 14;
  double atr_low = 0.01;
  double atr_high = 0.03;
  double threshold = 1.0;
  // Compute RSI/ATR on the predicted median series instead of bar closes.
  bool use_predicted_median = false;

  void validate() const;
};

struct BandSet {
  double upper = 0.0;        // 0.95
  double upper_inner = 0.0;  // 0.90
  double middle = 0.0;       // 0.50
  double lower_inner = 0.0;  // 0.10
  double lower = 0.0;        // 0.05
};

struct ShapeEstimate {
  double mean = 0.0;
  double std_dev = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

// Wilder RSI. Element k belongs to closes[period + k]; the result has
// closes.size() - period entries.
std::vector<double> rsi(std::span<const double> closes, std::size_t period);

// Wilder ATR divided by the bar close, aligned like rsi().
std::vector<double> atr_percent(std::span<const Bar> bars, std::size_t period);

double true_range(const Bar& bar, double prev_close) noexcept;

// Throws MissingLevel, or InvalidArgument for a crossed row.
BandSet bands_from_forecast(const QuantileForecast& forecast, std::size_t sample_index);

// Least-squares Cornish-Fisher fit
//   q(p) = mu + sigma (z + (z^2 - 1) s / 6 + (z^3 - 3z) k / 24)
// over (z_p, q) pairs. Symmetric level sets are solved as separate even and
// odd problems around the median so reflected rows give exactly negated skew.
ShapeEstimate shape_from_quantiles(std::span<const double> row, const QuantileLevels& levels);

}  // namespace fq
