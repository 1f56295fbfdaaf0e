#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "futurequant/tensor.hpp"

namespace fq {

// Strictly increasing probabilities in (0, 1).
class QuantileLevels {
 public:
  QuantileLevels();  // {0.05, 0.10, 0.50, 0.90, 0.95}
  explicit QuantileLevels(std::vector<double> levels);

  static QuantileLevels defaults() { return QuantileLevels(); }

  std::size_t size() const noexcept { return levels_.size(); }
  double operator[](std::size_t i) const noexcept { return levels_[i]; }
  std::span<const double> values() const noexcept { return levels_; }

  std::optional<std::size_t> find(double level) const noexcept;
  // Throws MissingLevel.
  std::size_t index_of(double level) const;

  bool operator==(const QuantileLevels&) const = default;

 private:
  std::vector<double> levels_;
};

// (1 - beta)(q - y) when q >= y, else beta (y - q).
inline double pinball_loss(double q_hat, double y, double beta) noexcept {
  return q_hat >= y ? (1.0 - beta) * (q_hat - y) : beta * (y - q_hat);
}

// d/dq of pinball_loss, taking the q >= y branch at the kink.
inline double pinball_gradient(double q_hat, double y, double beta) noexcept {
  return q_hat >= y ? (1.0 - beta) : -beta;
}

struct QuantileForecast {
  Matrix values;  // (samples x levels)
  QuantileLevels levels;

  std::size_t samples() const noexcept { return static_cast<std::size_t>(values.rows()); }
};

// Mean over samples and levels.
double mean_pinball(const QuantileForecast& forecast, std::span<const double> actuals);
// Per-level mean over samples.
std::vector<double> pinball_by_level(const QuantileForecast& forecast,
                                     std::span<const double> actuals);

// Sorts each row ascending across levels. Already-sorted rows are untouched.
QuantileForecast repair_monotonic(QuantileForecast forecast);
bool is_monotone(const QuantileForecast& forecast) noexcept;

struct PredictionInterval {
  double lower = 0.0;
  double upper = 0.0;
  double beta = 0.1;

  double width() const noexcept { return upper - lower; }
  bool covers(double y) const noexcept { return lower <= y && y <= upper; }
};

// [q_{beta/2}, q_{1-beta/2}] per sample, after monotonic repair.
std::vector<PredictionInterval> predict_intervals(const QuantileForecast& forecast, double beta);

}  // namespace fq
