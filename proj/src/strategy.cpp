#include "futurequant/strategy.hpp"

#include <cmath>

#include "futurequant/error.hpp"

namespace fq {

std::string_view to_string(SignalKind kind) noexcept {
  switch (kind) {
    case SignalKind::kBuy: return "buy";
    case SignalKind::kSell: return "sell";
    case SignalKind::kNone: break;
  }
  return "none";
}

std::string_view to_string(Side side) noexcept {
  switch (side) {
    case Side::kLong: return "long";
    case Side::kShort: return "short";
    case Side::kFlat: break;
  }
  return "flat";
}

void StrategyConfig::validate() const {
  if (!(cost_rate >= 0.0) || !std::isfinite(cost_rate)) {
    throw Error(ErrorCode::kInvalidArgument, "cost_rate must be a non-negative number");
  }
}

namespace {

Signal decide(double price, double atr_pct, double buy_band, double sell_band, double rsi,
              const IndicatorConfig& c) {
  const bool atr_ok = atr_pct >= c.atr_low && atr_pct < c.atr_high;
  if (rsi < 30.0) {
    if (price < c.threshold * buy_band) {
      if (atr_ok) return {SignalKind::kBuy, "oversold"};
      if (atr_pct >= c.atr_high) return {SignalKind::kNone, "oversold-atr-high"};
      return {SignalKind::kNone, "oversold-atr-low"};
    }
    return {SignalKind::kNone, "oversold-price-above-band"};
  }
  if (rsi > 70.0) {
    if (price > c.threshold * sell_band) {
      if (atr_ok) return {SignalKind::kSell, "overbought"};
      if (atr_pct >= c.atr_high) return {SignalKind::kNone, "overbought-atr-high"};
      return {SignalKind::kNone, "overbought-atr-low"};
    }
    return {SignalKind::kNone, "overbought-price-below-band"};
  }
  return {SignalKind::kNone, "neutral"};
}

}  // namespace

Signal generate_signal(double price, double atr_pct, double lower_band, double rsi,
                       const IndicatorConfig& config) {
  return decide(price, atr_pct, lower_band, lower_band, rsi, config);
}

Signal generate_signal(double price, double atr_pct, const BandSet& bands, double rsi,
                       const IndicatorConfig& config, const StrategyConfig& strategy) {
  return decide(price, atr_pct, bands.lower, strategy.sell_vs_upper_band ? bands.upper : bands.lower,
                rsi, config);
}

PositionPath positions_from_signals(std::span<const SignalKind> signals, std::span<const double> opens,
                                    std::span<const double> closes) {
  if (signals.size() != opens.size() || signals.size() != closes.size()) {
    throw Error(ErrorCode::kLengthMismatch, "signals and prices differ in length");
  }
  PositionPath path;
  const std::size_t n = signals.size();
  path.states.resize(n);
  PositionState state;

  auto close_at = [&](std::size_t index, double price, bool forced) {
    path.trades.push_back(Trade{state.side, *state.entry_index, *state.entry_price, index, price, forced});
    state = PositionState{};
  };

  for (std::size_t i = 0; i < n; ++i) {
    // Fill the previous bar's signal at this bar's open.
    if (i > 0) {
      const SignalKind s = signals[i - 1];
      const Side want = s == SignalKind::kBuy ? Side::kLong : s == SignalKind::kSell ? Side::kShort : Side::kFlat;
      if (want != Side::kFlat && want != state.side) {
        if (state.side != Side::kFlat) close_at(i, opens[i], false);
        state = PositionState{want, opens[i], i};
      }
    }
    if (i + 1 == n && state.side != Side::kFlat) close_at(i, closes[i], true);
    path.states[i] = state;
  }
  return path;
}

PositionPath positions_from_signals(std::span<const SignalKind> signals, std::span<const double> prices) {
  return positions_from_signals(signals, prices, prices);
}

}  // namespace fq
