#include "futurequant/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/QR>
#include <boost/math/distributions/normal.hpp>

#include "futurequant/error.hpp"

namespace fq {

void IndicatorConfig::validate() const {
  if (rsi_period < 1 || atr_period < 1) {
    throw Error(ErrorCode::kInvalidArgument, "indicator periods must be >= 1");
  }
  if (!(atr_low > 0.0 && atr_low < atr_high)) {
    throw Error(ErrorCode::kInvalidArgument, "require 0 < atr_low < atr_high");
  }
  if (!(threshold > 0.0)) throw Error(ErrorCode::kInvalidArgument, "threshold must be positive");
}

namespace {

void require_length(std::size_t n, std::size_t period, const char* what) {
  if (period < 1) throw Error(ErrorCode::kInvalidArgument, std::string(what) + " period must be >= 1");
  if (n < period + 1) {
    throw Error(ErrorCode::kInsufficientData, std::string(what) + " needs at least " +
                                                  std::to_string(period + 1) + " values, got " +
                                                  std::to_string(n));
  }
}

double rsi_value(double avg_gain, double avg_loss) {
  if (avg_loss == 0.0) return 100.0;
  return 100.0 - 100.0 / (1.0 + avg_gain / avg_loss);
}

}  // namespace

std::vector<double> rsi(std::span<const double> closes, std::size_t period) {
  require_length(closes.size(), period, "RSI");
  const double p = static_cast<double>(period);
  double gain = 0.0, loss = 0.0;
  for (std::size_t t = 1; t <= period; ++t) {
    const double d = closes[t] - closes[t - 1];
    (d > 0.0 ? gain : loss) += std::abs(d);
  }
  gain /= p;
  loss /= p;
  std::vector<double> out;
  out.reserve(closes.size() - period);
  out.push_back(rsi_value(gain, loss));
  for (std::size_t t = period + 1; t < closes.size(); ++t) {
    const double d = closes[t] - closes[t - 1];
    gain = (gain * (p - 1.0) + std::max(d, 0.0)) / p;
    loss = (loss * (p - 1.0) + std::max(-d, 0.0)) / p;
    out.push_back(rsi_value(gain, loss));
  }
  return out;
}

double true_range(const Bar& bar, double prev_close) noexcept {
  return std::max({bar.high - bar.low, std::abs(bar.high - prev_close), std::abs(bar.low - prev_close)});
}

std::vector<double> atr_percent(std::span<const Bar> bars, std::size_t period) {
  require_length(bars.size(), period, "ATR");
  const double p = static_cast<double>(period);
  double atr = 0.0;
  for (std::size_t t = 1; t <= period; ++t) atr += true_range(bars[t], bars[t - 1].close);
  atr /= p;
  std::vector<double> out;
  out.reserve(bars.size() - period);
  out.push_back(atr / bars[period].close);
  for (std::size_t t = period + 1; t < bars.size(); ++t) {
    atr = (atr * (p - 1.0) + true_range(bars[t], bars[t - 1].close)) / p;
    out.push_back(atr / bars[t].close);
  }
  return out;
}

BandSet bands_from_forecast(const QuantileForecast& forecast, std::size_t sample_index) {
  if (sample_index >= forecast.samples()) {
    throw Error(ErrorCode::kInvalidArgument, "sample index out of range");
  }
  const auto& lv = forecast.levels;
  const auto row = forecast.values.row(static_cast<Eigen::Index>(sample_index));
  for (Eigen::Index j = 0; j + 1 < row.size(); ++j) {
    if (row(j) > row(j + 1)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "crossed quantile row " + std::to_string(sample_index) + "; repair it first");
    }
  }
  auto at = [&](double level) { return row(static_cast<Eigen::Index>(lv.index_of(level))); };
  return BandSet{at(0.95), at(0.90), at(0.50), at(0.10), at(0.05)};
}

namespace {

double z_of(double p) { return boost::math::quantile(boost::math::normal(), p); }

bool symmetric_levels(const QuantileLevels& levels) {
  const std::size_t n = levels.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(levels[i] + levels[n - 1 - i] - 1.0) > 1e-12) return false;
  }
  return true;
}

ShapeEstimate finish(double mu, double b, double c, double d) {
  if (!(std::abs(b) >= 1e-12)) return ShapeEstimate{mu, 0.0, 0.0, 0.0};
  return ShapeEstimate{mu, b, 6.0 * c / b, 24.0 * d / b};
}

}  // namespace

ShapeEstimate shape_from_quantiles(std::span<const double> row, const QuantileLevels& levels) {
  const std::size_t n = levels.size();
  if (row.size() != n) throw Error(ErrorCode::kLengthMismatch, "row and level counts differ");
  if (n < 4) throw Error(ErrorCode::kInvalidArgument, "moment fit needs at least four levels");
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (row[i] > row[i + 1]) throw Error(ErrorCode::kInvalidArgument, "quantile row is not monotone");
  }

  if (!symmetric_levels(levels)) {
    Matrix a(static_cast<Eigen::Index>(n), 4);
    Vector y(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const double z = z_of(levels[i]);
      const auto r = static_cast<Eigen::Index>(i);
      a.row(r) << 1.0, z, z * z - 1.0, z * z * z - 3.0 * z;
      y(r) = row[i];
    }
    const Vector x = a.colPivHouseholderQr().solve(y);
    return finish(x(0), x(1), x(2), x(3));
  }

  // Pairs (p, 1 - p) share |z|; the even part fits (a, c), the odd part (b, d).
  const std::size_t pairs = n / 2;
  const bool has_middle = n % 2 == 1;
  const double center = has_middle ? row[pairs] : 0.5 * (row[pairs - 1] + row[pairs]);

  const auto rows_even = static_cast<Eigen::Index>(pairs + (has_middle ? 1 : 0));
  Matrix even(rows_even, 2), odd(static_cast<Eigen::Index>(pairs), 2);
  Vector even_rhs(rows_even), odd_rhs(static_cast<Eigen::Index>(pairs));
  const double w = std::sqrt(2.0);
  for (std::size_t i = 0; i < pairs; ++i) {
    const std::size_t hi = n - 1 - i;
    const double z = z_of(levels[hi]);
    const double lo_c = row[i] - center;
    const double hi_c = row[hi] - center;
    const auto r = static_cast<Eigen::Index>(i);
    even.row(r) << w, w * (z * z - 1.0);
    even_rhs(r) = w * 0.5 * (hi_c + lo_c);
    odd.row(r) << z, z * z * z - 3.0 * z;
    odd_rhs(r) = 0.5 * (hi_c - lo_c);
  }
  if (has_middle) {
    even.row(rows_even - 1) << 1.0, -1.0;
    even_rhs(rows_even - 1) = 0.0;
  }
  const Vector e = even.colPivHouseholderQr().solve(even_rhs);
  const Vector o = odd.colPivHouseholderQr().solve(odd_rhs);
  return finish(center + e(0), o(0), e(1), o(1));
}

}  // namespace fq
