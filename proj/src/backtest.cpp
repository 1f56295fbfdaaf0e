#include "futurequant/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "futurequant/error.hpp"
#include "futurequant/io.hpp"

namespace fq {

double cumulative_return(std::span<const double> returns) {
  double c = 0.0;
  for (std::size_t i = 0; i < returns.size(); ++i) {
    const double r = returns[i];
    if (!(r > -1.0)) {
      throw Error(ErrorCode::kRuinousReturn, "return " + format_double(r) + " at index " + std::to_string(i));
    }
    c = c + r + c * r;
  }
  return c;
}

DrawdownStats drawdown(std::span<const double> equity) {
  DrawdownStats s;
  s.series.reserve(equity.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < equity.size(); ++i) {
    if (!(equity[i] > 0.0)) throw Error(ErrorCode::kInvalidArgument, "equity must be positive");
    peak = i == 0 ? equity[i] : std::max(peak, equity[i]);
    const double dd = (peak - equity[i]) / peak;
    s.series.push_back(dd);
    s.max_drawdown = std::max(s.max_drawdown, dd);
    if (dd > kDrawdownCountThreshold) ++s.count_over_threshold;
  }
  return s;
}

double scenario_test(double initial_funds, double period_return) {
  if (!(initial_funds > 0.0) || !(period_return > -1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "scenario needs positive funds and a return above -1");
  }
  return initial_funds * (1.0 + period_return);
}

void BacktestConfig::validate() const {
  if (!(initial_capital > 0.0)) throw Error(ErrorCode::kInvalidArgument, "initial_capital must be positive");
  for (const auto& h : horizons) {
    if (h.bars < 1) throw Error(ErrorCode::kInvalidArgument, "horizon '" + h.name + "' must span >= 1 bar");
  }
}

EquityCurve equity_from_trades(std::span<const Bar> bars, const TradeLog& trades, double initial_capital,
                               double cost_rate) {
  const std::size_t n = bars.size();
  std::vector<double> pnl(n, 0.0);
  for (const Trade& t : trades) {
    const double sign = t.side == Side::kLong ? 1.0 : -1.0;
    for (std::size_t j = t.entry_index; j <= t.exit_index && j < n; ++j) {
      const double start = j == t.entry_index ? t.entry_price : bars[j - 1].close;
      const double end = j == t.exit_index ? t.exit_price : bars[j].close;
      pnl[j] += sign * (end - start);
    }
    pnl[t.entry_index] -= cost_rate * std::abs(t.entry_price);
    pnl[t.exit_index] -= cost_rate * std::abs(t.exit_price);
  }
  EquityCurve curve;
  curve.equity.reserve(n);
  curve.equity.push_back(initial_capital);
  for (std::size_t j = 1; j < n; ++j) {
    const double prev = curve.equity.back();
    const double r = pnl[j] / prev;
    if (!(r > -1.0)) {
      throw Error(ErrorCode::kRuinousReturn, "account wiped out at bar " + std::to_string(j));
    }
    curve.returns.push_back(r);
    curve.equity.push_back(prev * (1.0 + r));
  }
  return curve;
}

BacktestSummary summarize(const EquityCurve& curve, const DrawdownStats& dd, std::size_t trades,
                          const BacktestConfig& config) {
  BacktestSummary s;
  s.initial_capital = curve.equity.empty() ? config.initial_capital : curve.equity.front();
  s.final_equity = curve.equity.empty() ? s.initial_capital : curve.equity.back();
  s.cumulative_return = cumulative_return(curve.returns);
  s.max_drawdown = dd.max_drawdown;
  s.drawdown_count = dd.count_over_threshold;
  s.trades = trades;
  s.bars = curve.equity.size();

  const std::size_t m = curve.returns.size();
  double g = 0.0;
  if (m > 0) g = std::expm1(std::log1p(s.cumulative_return) / static_cast<double>(m));
  for (const auto& h : config.horizons) {
    s.horizon_returns.emplace_back(h.name, std::expm1(static_cast<double>(h.bars) * std::log1p(g)));
  }
  if (m > 1) {
    double mean = 0.0;
    for (double r : curve.returns) mean += r;
    mean /= static_cast<double>(m);
    double ss = 0.0;
    for (double r : curve.returns) ss += (r - mean) * (r - mean);
    s.volatility = std::sqrt(ss / static_cast<double>(m - 1));
  }
  return s;
}

BacktestResult run_backtest(std::span<const Bar> bars, const QuantileForecast& forecast,
                            std::span<const std::size_t> decision_bars,
                            const IndicatorConfig& indicators, const StrategyConfig& strategy,
                            const BacktestConfig& config) {
  indicators.validate();
  strategy.validate();
  config.validate();
  const std::size_t m = decision_bars.size();
  if (m == 0 || forecast.samples() != m) {
    throw Error(ErrorCode::kAlignmentError, "need one forecast row per decision bar (" +
                                                std::to_string(forecast.samples()) + " rows, " +
                                                std::to_string(m) + " bars)");
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (decision_bars[k] >= bars.size() || (k > 0 && decision_bars[k] != decision_bars[k - 1] + 1)) {
      throw Error(ErrorCode::kAlignmentError, "decision bars must be consecutive indices into bars");
    }
  }
  const QuantileForecast repaired = repair_monotonic(forecast);
  const std::size_t first = decision_bars.front();

  // Indicator inputs: raw bars up to the last decision bar, or the median path.
  std::vector<Bar> source;
  if (indicators.use_predicted_median) {
    const auto mid = static_cast<Eigen::Index>(repaired.levels.index_of(0.5));
    for (std::size_t k = 0; k < m; ++k) {
      const double v = repaired.values(static_cast<Eigen::Index>(k), mid);
      source.push_back(Bar{bars[decision_bars[k]].open_time, v, v, v, v, 0, 0.0});
    }
  } else {
    source.assign(bars.begin(), bars.begin() + static_cast<std::ptrdiff_t>(decision_bars.back() + 1));
  }
  const std::size_t offset = indicators.use_predicted_median ? 0 : first;
  std::vector<double> closes;
  for (const Bar& b : source) closes.push_back(b.close);
  const std::size_t rp = indicators.rsi_period, ap = indicators.atr_period;
  const std::vector<double> rsi_series = closes.size() > rp ? rsi(closes, rp) : std::vector<double>{};
  const std::vector<double> atr_series = source.size() > ap ? atr_percent(source, ap) : std::vector<double>{};

  BacktestResult result;
  std::vector<SignalKind> kinds(m);
  std::vector<Bar> window(bars.begin() + static_cast<std::ptrdiff_t>(first),
                          bars.begin() + static_cast<std::ptrdiff_t>(decision_bars.back() + 1));
  for (std::size_t k = 0; k < m; ++k) {
    BarDecision d;
    d.bar_index = decision_bars[k];
    d.time = bars[d.bar_index].open_time;
    d.bands = bands_from_forecast(repaired, k);
    const std::size_t s = offset + k;
    if (s < rp || s < ap) {
      d.warmup = true;
      d.signal = Signal{SignalKind::kNone, "warmup"};
    } else {
      d.rsi = rsi_series[s - rp];
      d.atr_pct = atr_series[s - ap];
      d.signal = generate_signal(window[k].close, d.atr_pct, d.bands, d.rsi, indicators, strategy);
    }
    kinds[k] = d.signal.kind;
    result.decisions.push_back(std::move(d));
  }

  std::vector<double> opens, bar_closes;
  for (const Bar& b : window) {
    opens.push_back(b.open);
    bar_closes.push_back(b.close);
  }
  const PositionPath path = positions_from_signals(kinds, opens, bar_closes);
  for (std::size_t k = 0; k < m; ++k) result.decisions[k].side = path.states[k].side;
  result.trades = path.trades;
  result.curve = equity_from_trades(window, path.trades, config.initial_capital, strategy.cost_rate);
  result.drawdowns = drawdown(result.curve.equity);
  result.summary = summarize(result.curve, result.drawdowns, result.trades.size(), config);
  for (Trade& t : result.trades) {
    t.entry_index += first;
    t.exit_index += first;
  }
  return result;
}

std::string summary_text(const BacktestSummary& s) {
  std::ostringstream out;
  out << "# horizon returns compound the geometric mean per-bar return over the horizon length\n"
      << "# volatility is the sample standard deviation of per-bar returns; its scale depends on the bar interval\n"
      << "bars = " << s.bars << '\n'
      << "trades = " << s.trades << '\n'
      << "initial_capital = " << format_double(s.initial_capital) << '\n'
      << "final_equity = " << format_double(s.final_equity) << '\n'
      << "cumulative_return = " << format_double(s.cumulative_return) << '\n';
  for (const auto& [name, r] : s.horizon_returns) {
    out << "cumulative_return_" << name << " = " << format_double(r) << '\n';
  }
  out << "volatility = " << format_double(s.volatility) << '\n'
      << "max_drawdown = " << format_double(s.max_drawdown) << '\n'
      << "drawdown_count = " << s.drawdown_count << '\n';
  return out.str();
}

std::string series_table(std::string_view header, std::span<const double> values) {
  std::ostringstream out;
  out << "index," << header << '\n';
  for (std::size_t i = 0; i < values.size(); ++i) out << i << ',' << format_double(values[i]) << '\n';
  return out.str();
}

std::string decisions_table(std::span<const BarDecision> decisions) {
  std::ostringstream out;
  out << "bar,time_ms,rsi,atr_pct,lower,lower_inner,middle,upper_inner,upper,signal,reason,side\n";
  for (const auto& d : decisions) {
    out << d.bar_index << ',' << d.time << ',' << format_double(d.rsi) << ',' << format_double(d.atr_pct)
        << ',' << format_double(d.bands.lower) << ',' << format_double(d.bands.lower_inner) << ','
        << format_double(d.bands.middle) << ',' << format_double(d.bands.upper_inner) << ','
        << format_double(d.bands.upper) << ',' << to_string(d.signal.kind) << ',' << d.signal.reason << ','
        << to_string(d.side) << '\n';
  }
  return out.str();
}

std::string trades_table(const TradeLog& trades) {
  std::ostringstream out;
  out << "side,entry_bar,entry_price,exit_bar,exit_price,forced_close,pnl\n";
  for (const auto& t : trades) {
    out << to_string(t.side) << ',' << t.entry_index << ',' << format_double(t.entry_price) << ','
        << t.exit_index << ',' << format_double(t.exit_price) << ',' << (t.forced_close ? 1 : 0) << ','
        << format_double(t.pnl()) << '\n';
  }
  return out.str();
}

namespace {

std::string polyline(std::span<const double> v, double x0, double y0, double w, double h,
                     const char* colour) {
  std::ostringstream out;
  out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1\" points=\"";
  if (!v.empty()) {
    const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    const double lo = *lo_it;
    const double span = *hi_it > lo ? *hi_it - lo : 1.0;
    const double step = v.size() > 1 ? w / static_cast<double>(v.size() - 1) : 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out << ' ';
      out << format_fixed(x0 + step * static_cast<double>(i), 2) << ','
          << format_fixed(y0 + h - (v[i] - lo) / span * h, 2);
    }
  }
  out << "\"/>\n";
  return out.str();
}

}  // namespace

std::string equity_svg(const EquityCurve& curve, const DrawdownStats& dd) {
  std::vector<double> negated(dd.series.size());
  std::transform(dd.series.begin(), dd.series.end(), negated.begin(), [](double x) { return -x; });
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"420\">\n"
      << "<rect width=\"800\" height=\"420\" fill=\"white\"/>\n"
      << "<text x=\"40\" y=\"20\" font-size=\"12\">equity</text>\n"
      << "<text x=\"40\" y=\"250\" font-size=\"12\">drawdown</text>\n"
      << polyline(curve.equity, 40, 30, 720, 180, "steelblue")
      << polyline(negated, 40, 260, 720, 140, "firebrick") << "</svg>\n";
  return out.str();
}

}  // namespace fq
