#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "futurequant/indicators.hpp"
#include "futurequant/market_data.hpp"
#include "futurequant/quantile.hpp"
#include "futurequant/strategy.hpp"

namespace fq {

struct EquityCurve {
  std::vector<double> equity;   // equity[0] is the initial capital
  std::vector<double> returns;  // returns[i] takes equity[i] to equity[i + 1]
};

struct DrawdownStats {
  std::vector<double> series;  // positive magnitudes from the running peak
  double max_drawdown = 0.0;
  std::size_t count_over_threshold = 0;
};

inline constexpr double kDrawdownCountThreshold = 0.001;

// prod(1 + r_i) - 1, accumulated as c + r + c r. Throws RuinousReturn.
double cumulative_return(std::span<const double> returns);

DrawdownStats drawdown(std::span<const double> equity);

double scenario_test(double initial_funds, double period_return);

struct Horizon {
  std::string name;
  std::size_t bars = 1;
};

struct BacktestConfig {
  double initial_capital = 1'000'000.0;
  // Bar counts assume 30 s bars, 8 h sessions, 21 sessions a month and 252 a year.
  std::vector<Horizon> horizons = {{"30min", 60}, {"1month", 20160}, {"1year", 241920}};

  void validate() const;
};

struct BacktestSummary {
  double initial_capital = 0.0;
  double final_equity = 0.0;
  double cumulative_return = 0.0;
  std::vector<std::pair<std::string, double>> horizon_returns;
  double volatility = 0.0;  // sample standard deviation of per-bar returns
  double max_drawdown = 0.0;
  std::size_t drawdown_count = 0;
  std::size_t trades = 0;
  std::size_t bars = 0;
};

struct BarDecision {
  std::size_t bar_index = 0;
  Millis time = 0;
  double rsi = 0.0;
  double atr_pct = 0.0;
  BandSet bands;
  Signal signal;
  Side side = Side::kFlat;
  bool warmup = false;
};

struct BacktestResult {
  EquityCurve curve;
  DrawdownStats drawdowns;
  TradeLog trades;
  std::vector<BarDecision> decisions;
  BacktestSummary summary;
};

// Trades bars[decision_bars[0] .. decision_bars.back()], one forecast row per
// decision bar. Earlier bars only warm up the indicators. Throws
// AlignmentError unless decision_bars is consecutive, in range, and the same
// length as the forecast.
BacktestResult run_backtest(std::span<const Bar> bars, const QuantileForecast& forecast,
                            std::span<const std::size_t> decision_bars,
                            const IndicatorConfig& indicators, const StrategyConfig& strategy,
                            const BacktestConfig& config);

// Equity walk for a given position path over bars: one unit, fills at the
// open, marks at the close, cost_rate charged per fill.
EquityCurve equity_from_trades(std::span<const Bar> bars, const TradeLog& trades, double initial_capital,
                               double cost_rate);

BacktestSummary summarize(const EquityCurve& curve, const DrawdownStats& dd, std::size_t trades,
                          const BacktestConfig& config);

std::string summary_text(const BacktestSummary& summary);
std::string series_table(std::string_view header, std::span<const double> values);
std::string decisions_table(std::span<const BarDecision> decisions);
std::string trades_table(const TradeLog& trades);
// Equity (top) and drawdown (bottom) polylines.
std::string equity_svg(const EquityCurve& curve, const DrawdownStats& dd);

}  // namespace fq
