#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "futurequant/quantile.hpp"

namespace fq {

enum class CwcVariant { kAsPrinted, kSquaredDeviation };

std::string_view to_string(CwcVariant variant) noexcept;
CwcVariant parse_cwc_variant(std::string_view name);

struct MetricConfig {
  double beta = 0.1;
  double eta = 30.0;
  CwcVariant cwc_variant = CwcVariant::kAsPrinted;

  void validate() const;
};

struct MetricsReport {
  double picp = 0.0;
  double pinaw = 0.0;
  double cwc = 0.0;
  CwcVariant cwc_variant = CwcVariant::kAsPrinted;
  double beta = 0.1;
  double eta = 30.0;
  std::vector<double> levels;
  std::vector<double> mean_pinball;  // per level
  double mean_pinball_all = 0.0;
  double crossing_rate = 0.0;
  std::size_t n = 0;
  double delta_y = 0.0;
  double mean_width = 0.0;
  // Coverage by interval-width tercile (narrowest first).
  std::vector<double> picp_by_width_tercile;
};

double picp(std::span<const double> actuals, std::span<const PredictionInterval> intervals);
// Delta y is max - min of actuals. Throws ZeroRange when it is zero.
double pinaw(std::span<const double> actuals, std::span<const PredictionInterval> intervals);
double cwc(double picp, double pinaw, const MetricConfig& config);
// Fraction of rows with an adjacent pair values[j] > values[j + 1].
double crossing_rate(const QuantileForecast& raw);

MetricsReport evaluate(std::span<const double> actuals, const QuantileForecast& forecast,
                       const MetricConfig& config = {});

// "key = value" lines.
std::string to_key_value(const MetricsReport& report);
// Comparison table: header and one row per model.
std::string comparison_header();
std::string comparison_row(std::string_view model, const MetricsReport& report);

}  // namespace fq
