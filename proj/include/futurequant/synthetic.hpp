#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "futurequant/market_data.hpp"

namespace fq {

enum class SyntheticKind { kGaussianAr1, kHeteroscedasticAr1, kRegimeSwitch };

std::string_view to_string(SyntheticKind kind) noexcept;
SyntheticKind parse_synthetic_kind(std::string_view name);

// price_t = level + x_t with
//   gaussian-ar1:        x_{t+1} = phi x_t + sigma0 e
//   heteroscedastic-ar1: x_{t+1} = phi x_t + sigma0 (1 + kappa |x_t|) e
//   regime-switch:       x_{t+1} = phi x_t + mu[s_{t+1}] + sigma0 e,
//                        s stays with probability stay_probability
struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::kGaussianAr1;
  std::size_t length = 5000;
  std::uint64_t seed = 0;
  double phi = 0.6;
  double sigma0 = 1.0;
  double kappa = 0.3;
  double level = 100.0;
  double regime_mean0 = -0.5;
  double regime_mean1 = 0.5;
  double stay_probability = 0.95;

  void validate() const;
};

struct SyntheticSeries {
  SyntheticSpec spec;
  std::vector<double> latent;  // x_t
  std::vector<int> regime;     // s_t, zero unless regime-switch
  std::vector<double> prices;  // level + x_t

  // True beta-quantile of prices[t + 1] given everything up to t.
  double oracle_quantile(std::size_t t, double beta) const;
};

SyntheticSeries generate(const SyntheticSpec& spec);

// Bar t: open prices[t - 1] (prices[0] for t = 0), close prices[t],
// high/low the max/min of the two. Bars start at start_ms, which should be a
// multiple of the interval.
std::vector<Bar> synthetic_bars(const SyntheticSeries& series, std::chrono::milliseconds interval,
                                Millis start_ms);

// Two ticks per bar (open at the bar start, close at mid-bar) so that
// resample(synthetic_ticks(...), interval) reproduces synthetic_bars(...).
std::vector<TickRecord> synthetic_ticks(const SyntheticSeries& series, std::chrono::milliseconds interval,
                                        Millis start_ms);

inline constexpr Millis kSyntheticEpochMs = 1'672'531'200'000;  // 2023-01-01 00:00:00 UTC

}  // namespace fq
