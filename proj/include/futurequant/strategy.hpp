#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "futurequant/indicators.hpp"

namespace fq {

enum class SignalKind { kNone, kBuy, kSell };
enum class Side { kFlat, kLong, kShort };

std::string_view to_string(SignalKind kind) noexcept;
std::string_view to_string(Side side) noexcept;

struct Signal {
  SignalKind kind = SignalKind::kNone;
  std::string reason;
};

struct StrategyConfig {
  // Compare the sell branch against the upper band instead of the lower one.
  bool sell_vs_upper_band = false;
  // Proportional cost per fill, as a fraction of the fill price.
  double cost_rate = 0.0;

  void validate() const;
};

// The oversold/overbought decision tree with the sell branch as printed
// (price against threshold * lower_band).
Signal generate_signal(double price, double atr_pct, double lower_band, double rsi,
                       const IndicatorConfig& config);

// Same tree; with sell_vs_upper_band the sell branch uses bands.upper.
Signal generate_signal(double price, double atr_pct, const BandSet& bands, double rsi,
                       const IndicatorConfig& config, const StrategyConfig& strategy);

struct PositionState {
  Side side = Side::kFlat;
  std::optional<double> entry_price;
  std::optional<std::size_t> entry_index;
};

struct Trade {
  Side side = Side::kLong;
  std::size_t entry_index = 0;
  double entry_price = 0.0;
  std::size_t exit_index = 0;
  double exit_price = 0.0;
  bool forced_close = false;

  double pnl() const noexcept {
    return side == Side::kLong ? exit_price - entry_price : entry_price - exit_price;
  }
};

using TradeLog = std::vector<Trade>;

struct PositionPath {
  std::vector<PositionState> states;  // state held at the close of each bar
  TradeLog trades;
};

// One unit, no pyramiding. A signal on bar i fills at opens[i + 1]; an
// opposite signal closes and reverses there. Signals on the last bar have no
// fill and are ignored; an open position is closed at the last close.
PositionPath positions_from_signals(std::span<const SignalKind> signals,
                                    std::span<const double> opens,
                                    std::span<const double> closes);

// Convenience form using one price series for fills and the final close.
PositionPath positions_from_signals(std::span<const SignalKind> signals,
                                    std::span<const double> prices);

}  // namespace fq
