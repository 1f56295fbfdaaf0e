#include "futurequant/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "futurequant/error.hpp"
#include "futurequant/io.hpp"

namespace fq {

std::string_view to_string(CwcVariant variant) noexcept {
  return variant == CwcVariant::kAsPrinted ? "as-printed" : "squared-deviation";
}

CwcVariant parse_cwc_variant(std::string_view name) {
  name = trim(name);
  if (name == "as-printed") return CwcVariant::kAsPrinted;
  if (name == "squared-deviation") return CwcVariant::kSquaredDeviation;
  throw Error(ErrorCode::kInvalidArgument, "unknown cwc variant '" + std::string(name) + "'");
}

void MetricConfig::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) throw Error(ErrorCode::kInvalidArgument, "beta must lie in (0,1)");
  if (!(eta > 0.0)) throw Error(ErrorCode::kInvalidArgument, "eta must be positive");
}

namespace {

void check_lengths(std::span<const double> actuals, std::span<const PredictionInterval> intervals) {
  if (actuals.size() != intervals.size()) {
    throw Error(ErrorCode::kLengthMismatch, "actuals and intervals differ in length");
  }
  if (actuals.empty()) throw Error(ErrorCode::kEmptyInput, "no samples to score");
}

}  // namespace

double picp(std::span<const double> actuals, std::span<const PredictionInterval> intervals) {
  check_lengths(actuals, intervals);
  std::size_t covered = 0;
  for (std::size_t i = 0; i < actuals.size(); ++i) covered += intervals[i].covers(actuals[i]) ? 1 : 0;
  return static_cast<double>(covered) / static_cast<double>(actuals.size());
}

double pinaw(std::span<const double> actuals, std::span<const PredictionInterval> intervals) {
  check_lengths(actuals, intervals);
  const auto [lo, hi] = std::minmax_element(actuals.begin(), actuals.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) throw Error(ErrorCode::kZeroRange, "actuals have zero range");
  double total = 0.0;
  for (const auto& pi : intervals) total += pi.width();
  return total / (static_cast<double>(actuals.size()) * range);
}

double cwc(double picp, double pinaw, const MetricConfig& config) {
  const double nominal = 1.0 - config.beta;
  const double exponent = config.cwc_variant == CwcVariant::kAsPrinted
                              ? picp - nominal * nominal
                              : (picp - nominal) * (picp - nominal);
  return (1.0 - pinaw) * std::exp(-config.eta * exponent);
}

double crossing_rate(const QuantileForecast& raw) {
  const auto rows = raw.values.rows();
  if (rows == 0) throw Error(ErrorCode::kEmptyInput, "forecast has no samples");
  std::size_t crossed = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j + 1 < raw.values.cols(); ++j) {
      if (raw.values(i, j) > raw.values(i, j + 1)) {
        ++crossed;
        break;
      }
    }
  }
  return static_cast<double>(crossed) / static_cast<double>(rows);
}

MetricsReport evaluate(std::span<const double> actuals, const QuantileForecast& forecast,
                       const MetricConfig& config) {
  config.validate();
  if (forecast.samples() != actuals.size()) {
    throw Error(ErrorCode::kLengthMismatch, "forecast and actuals differ in length");
  }
  if (actuals.empty()) throw Error(ErrorCode::kEmptyInput, "no samples to score");
  forecast.levels.index_of(config.beta / 2.0);
  forecast.levels.index_of(1.0 - config.beta / 2.0);

  MetricsReport r;
  r.beta = config.beta;
  r.eta = config.eta;
  r.cwc_variant = config.cwc_variant;
  r.n = actuals.size();
  r.levels.assign(forecast.levels.values().begin(), forecast.levels.values().end());
  r.crossing_rate = crossing_rate(forecast);

  const QuantileForecast repaired = repair_monotonic(forecast);
  r.mean_pinball = pinball_by_level(repaired, actuals);
  r.mean_pinball_all = mean_pinball(repaired, actuals);

  const auto intervals = predict_intervals(repaired, config.beta);
  const auto [lo, hi] = std::minmax_element(actuals.begin(), actuals.end());
  r.delta_y = *hi - *lo;
  r.picp = picp(actuals, intervals);
  r.pinaw = pinaw(actuals, intervals);
  r.cwc = cwc(r.picp, r.pinaw, config);
  double width = 0.0;
  for (const auto& pi : intervals) width += pi.width();
  r.mean_width = width / static_cast<double>(r.n);

  std::vector<std::size_t> order(r.n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return intervals[a].width() < intervals[b].width();
  });
  for (std::size_t t = 0; t < 3; ++t) {
    const std::size_t begin = r.n * t / 3;
    const std::size_t end = r.n * (t + 1) / 3;
    if (begin == end) continue;
    std::size_t covered = 0;
    for (std::size_t k = begin; k < end; ++k) covered += intervals[order[k]].covers(actuals[order[k]]);
    r.picp_by_width_tercile.push_back(static_cast<double>(covered) / static_cast<double>(end - begin));
  }
  return r;
}

std::string to_key_value(const MetricsReport& r) {
  std::ostringstream out;
  out << "n = " << r.n << '\n'
      << "beta = " << format_double(r.beta) << '\n'
      << "eta = " << format_double(r.eta) << '\n'
      << "cwc_variant = " << to_string(r.cwc_variant) << '\n'
      << "picp = " << format_double(r.picp) << '\n'
      << "pinaw = " << format_double(r.pinaw) << '\n'
      << "cwc = " << format_double(r.cwc) << '\n'
      << "delta_y = " << format_double(r.delta_y) << '\n'
      << "mean_width = " << format_double(r.mean_width) << '\n'
      << "crossing_rate = " << format_double(r.crossing_rate) << '\n'
      << "mean_pinball = " << format_double(r.mean_pinball_all) << '\n';
  for (std::size_t i = 0; i < r.levels.size() && i < r.mean_pinball.size(); ++i) {
    out << "pinball_" << format_double(r.levels[i]) << " = " << format_double(r.mean_pinball[i]) << '\n';
  }
  for (std::size_t t = 0; t < r.picp_by_width_tercile.size(); ++t) {
    out << "picp_width_tercile_" << (t + 1) << " = " << format_double(r.picp_by_width_tercile[t]) << '\n';
  }
  return out.str();
}

std::string comparison_header() {
  return "model,picp,pinaw,cwc,cwc_variant,mean_pinball,crossing_rate,n";
}

std::string comparison_row(std::string_view model, const MetricsReport& r) {
  std::ostringstream out;
  out << model << ',' << format_double(r.picp) << ',' << format_double(r.pinaw) << ','
      << format_double(r.cwc) << ',' << to_string(r.cwc_variant) << ','
      << format_double(r.mean_pinball_all) << ',' << format_double(r.crossing_rate) << ',' << r.n;
  return out.str();
}

}  // namespace fq
