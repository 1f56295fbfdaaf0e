#include "futurequant/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "futurequant/error.hpp"
#include "futurequant/io.hpp"

namespace fq {
namespace {
constexpr double kLevelTolerance = 1e-9;
}

QuantileLevels::QuantileLevels() : levels_{0.05, 0.10, 0.50, 0.90, 0.95} {}

QuantileLevels::QuantileLevels(std::vector<double> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) throw Error(ErrorCode::kInvalidArgument, "no quantile levels");
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (!(levels_[i] > 0.0 && levels_[i] < 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "quantile level outside (0,1)");
    }
    if (i > 0 && !(levels_[i] > levels_[i - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "quantile levels must be strictly increasing");
    }
  }
}

std::optional<std::size_t> QuantileLevels::find(double level) const noexcept {
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (std::abs(levels_[i] - level) <= kLevelTolerance) return i;
  }
  return std::nullopt;
}

std::size_t QuantileLevels::index_of(double level) const {
  if (auto i = find(level)) return *i;
  throw Error(ErrorCode::kMissingLevel, "quantile level " + format_double(level) + " not predicted");
}

namespace {
void check_alignment(const QuantileForecast& f, std::span<const double> actuals) {
  if (f.samples() != actuals.size()) {
    throw Error(ErrorCode::kLengthMismatch, "forecast rows differ from actuals");
  }
  if (actuals.empty()) throw Error(ErrorCode::kEmptyInput, "no samples");
  if (static_cast<std::size_t>(f.values.cols()) != f.levels.size()) {
    throw Error(ErrorCode::kShapeMismatch, "forecast columns differ from levels");
  }
}
}  // namespace

std::vector<double> pinball_by_level(const QuantileForecast& forecast,
                                     std::span<const double> actuals) {
  check_alignment(forecast, actuals);
  std::vector<double> out(forecast.levels.size(), 0.0);
  for (std::size_t j = 0; j < out.size(); ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < actuals.size(); ++i) {
      sum += pinball_loss(forecast.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
                          actuals[i], forecast.levels[j]);
    }
    out[j] = sum / static_cast<double>(actuals.size());
  }
  return out;
}

double mean_pinball(const QuantileForecast& forecast, std::span<const double> actuals) {
  const auto per_level = pinball_by_level(forecast, actuals);
  double sum = 0.0;
  for (double v : per_level) sum += v;
  return sum / static_cast<double>(per_level.size());
}

QuantileForecast repair_monotonic(QuantileForecast forecast) {
  for (Eigen::Index r = 0; r < forecast.values.rows(); ++r) {
    auto row = forecast.values.row(r);
    std::sort(row.begin(), row.end());
  }
  return forecast;
}

bool is_monotone(const QuantileForecast& forecast) noexcept {
  for (Eigen::Index r = 0; r < forecast.values.rows(); ++r) {
    for (Eigen::Index c = 1; c < forecast.values.cols(); ++c) {
      if (forecast.values(r, c - 1) > forecast.values(r, c)) return false;
    }
  }
  return true;
}

std::vector<PredictionInterval> predict_intervals(const QuantileForecast& forecast, double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw Error(ErrorCode::kInvalidArgument, "beta outside (0,1)");
  const auto lo = static_cast<Eigen::Index>(forecast.levels.index_of(beta / 2.0));
  const auto hi = static_cast<Eigen::Index>(forecast.levels.index_of(1.0 - beta / 2.0));
  const QuantileForecast repaired = repair_monotonic(forecast);
  std::vector<PredictionInterval> out;
  out.reserve(repaired.samples());
  for (Eigen::Index r = 0; r < repaired.values.rows(); ++r) {
    out.push_back({repaired.values(r, lo), repaired.values(r, hi), beta});
  }
  return out;
}

}  // namespace fq
