#include "futurequant/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "futurequant/baselines.hpp"
#include "futurequant/checkpoint.hpp"
#include "futurequant/dataset_io.hpp"
#include "futurequant/error.hpp"
#include "futurequant/futurequant.hpp"
#include "futurequant/io.hpp"
#include "futurequant/report.hpp"

namespace fq {
namespace {

void say(const Logger& log, const std::string& msg) {
  if (log) log(msg);
}

std::vector<double> actual_prices(const WindowedDataset& ds) {
  std::vector<double> out(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const double t = ds.targets(static_cast<Eigen::Index>(i), 0);
    out[i] = ds.normalized() ? ds.target_norm.invert(t, 0) : t;
  }
  return out;
}

WindowedDataset read_dataset_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingArtifact, "missing " + path.string() + "; run ingest first");
  return read_dataset(in);
}

std::unique_ptr<QuantileModel> read_checkpoint_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kMissingArtifact, "missing " + path.string() + "; run train first");
  }
  return read_checkpoint(read_file(path));
}

WindowShape shape_for(std::size_t window_in, const RunConfig& c) {
  return WindowShape{window_in, c.data.window_out, c.data.stride};
}

}  // namespace

std::vector<Bar> load_bars(const RunConfig& c) {
  const std::chrono::milliseconds interval(c.data.bar_interval_ms);
  switch (c.data.source) {
    case DataSource::kSynthetic: {
      const SyntheticSeries s = generate(c.synthetic);
      return resample(synthetic_ticks(s, interval, kSyntheticEpochMs), interval);
    }
    case DataSource::kTicks: {
      std::ifstream in(c.data.path);
      if (!in) throw Error(ErrorCode::kMissingArtifact, "cannot open tick file " + c.data.path.string());
      const ParseResult parsed = parse_ticks(in, {c.data.delimiter, c.data.timestamp_tolerance_ms});
      return resample(parsed.ticks, interval);
    }
    case DataSource::kBars: {
      std::ifstream in(c.data.path);
      if (!in) throw Error(ErrorCode::kMissingArtifact, "cannot open bar file " + c.data.path.string());
      return read_bars_csv(in);
    }
  }
  throw Error(ErrorCode::kConfigError, "unknown data source");
}

std::unique_ptr<QuantileModel> build_model(const std::string& kind, const RunConfig& c) {
  const std::size_t features = c.data.features.size();
  if (kind == "futurequant") {
    ModelSpec spec = c.model;
    spec.num_features = features;
    return std::make_unique<FutureQuantModel>(std::move(spec));
  }
  if (kind == "quantile-linear" || kind == "quantile-intercept") {
    return std::make_unique<QuantileLinearModel>(
        LinearSpec{c.baseline_window_in, features, c.model.levels, kind == "quantile-intercept"});
  }
  if (kind == "quantile-mlp") {
    return std::make_unique<QuantileMlpModel>(
        MlpSpec{c.baseline_window_in, features, c.baseline_mlp_hidden, c.model.levels});
  }
  throw Error(ErrorCode::kConfigError, "unknown model '" + kind + "'");
}

SyntheticSeries cmd_synth(const RunConfig& c, const std::filesystem::path& out, const Logger& log) {
  const std::chrono::milliseconds interval(c.data.bar_interval_ms);
  SyntheticSeries s = generate(c.synthetic);
  const auto ticks = synthetic_ticks(s, interval, kSyntheticEpochMs);
  std::ostringstream tick_text, bar_text, oracle_text;
  write_ticks_csv(tick_text, ticks);
  const auto bars = resample(ticks, interval);
  write_bars_csv(bar_text, bars);

  const auto levels = c.model.levels.values();
  oracle_text << "target_index";
  for (double l : levels) oracle_text << ",q_" << format_double(l);
  oracle_text << '\n';
  for (std::size_t t = 0; t + 1 < s.prices.size(); ++t) {
    oracle_text << (t + 1);
    for (double l : levels) oracle_text << ',' << format_double(s.oracle_quantile(t, l));
    oracle_text << '\n';
  }
  write_file_atomic(out / artifact::kTicks, tick_text.str());
  write_file_atomic(out / artifact::kBars, bar_text.str());
  write_file_atomic(out / artifact::kOracle, oracle_text.str());
  say(log, "synth: " + std::to_string(ticks.size()) + " ticks, " + std::to_string(bars.size()) + " bars (" +
               std::string(to_string(c.synthetic.kind)) + ")");
  return s;
}

DatasetSplits cmd_ingest(const RunConfig& c, const std::filesystem::path& out, const Logger& log) {
  const auto bars = load_bars(c);
  DatasetSplits splits = prepare_splits(bars, c.data.features, shape_for(c.model.window_in, c), c.data.split);
  std::ostringstream bar_text;
  write_bars_csv(bar_text, bars);
  write_file_atomic(out / artifact::kBars, bar_text.str());
  write_file_atomic(out / artifact::kTrain, serialize_dataset(splits.train));
  write_file_atomic(out / artifact::kValidation, serialize_dataset(splits.validation));
  write_file_atomic(out / artifact::kTest, serialize_dataset(splits.test));
  write_file_atomic(out / artifact::kIngestSummary, dataset_summary(splits, bars.size()));
  say(log, "ingest: " + std::to_string(bars.size()) + " bars -> " + std::to_string(splits.train.size()) + "/" +
               std::to_string(splits.validation.size()) + "/" + std::to_string(splits.test.size()) +
               " samples");
  return splits;
}

TrainResult cmd_train(const RunConfig& c, const std::filesystem::path& out, const Logger& log) {
  const WindowedDataset train_set = read_dataset_file(out / artifact::kTrain);
  auto model = build_model("futurequant", c);
  if (train_set.inputs.steps() != model->window_in() || train_set.inputs.features() != model->num_features()) {
    throw Error(ErrorCode::kShapeMismatch, "train.fqd windows do not match the model; rerun ingest");
  }
  model->initialize(c.seed);
  const TrainResult result = train(*model, train_set, c.train, [&](std::size_t epoch, double loss) {
    say(log, "epoch " + std::to_string(epoch + 1) + " loss " + format_double(loss));
  });
  write_file_atomic(out / artifact::kCheckpoint, write_checkpoint(*model));
  write_file_atomic(out / artifact::kLossHistory, loss_history_table(result));
  say(log, "train: " + std::to_string(result.loss_history.size()) + " epochs, loss " +
               format_double(result.initial_loss) + " -> " +
               format_double(result.loss_history.empty() ? result.initial_loss : result.loss_history.back()));
  return result;
}

MetricsReport cmd_eval(const RunConfig& c, const std::filesystem::path& out, const Logger& log) {
  const auto model = read_checkpoint_file(out / artifact::kCheckpoint);
  const WindowedDataset test = read_dataset_file(out / artifact::kTest);
  const QuantileForecast forecast = predict(*model, test);
  const auto actuals = actual_prices(test);
  const MetricsReport report = evaluate(actuals, forecast, c.metrics);
  write_file_atomic(out / artifact::kForecast, forecast_table(test, forecast, actuals));
  write_file_atomic(out / artifact::kMetrics, to_key_value(report));
  write_file_atomic(out / artifact::kMetricsRow,
                    comparison_header() + "\n" + comparison_row(model->kind(), report) + "\n");
  say(log, "eval: picp " + format_double(report.picp) + ", pinaw " + format_double(report.pinaw) + ", cwc " +
               format_double(report.cwc));
  return report;
}

BacktestResult cmd_backtest(const RunConfig& c, const std::filesystem::path& out, const Logger& log) {
  const auto model = read_checkpoint_file(out / artifact::kCheckpoint);
  const WindowedDataset test = read_dataset_file(out / artifact::kTest);
  std::vector<Bar> bars;
  {
    std::ifstream in(out / artifact::kBars);
    if (!in) throw Error(ErrorCode::kMissingArtifact, "missing bars.csv; run ingest first");
    bars = read_bars_csv(in);
  }
  std::vector<std::size_t> decision;
  for (std::size_t t : test.target_index) {
    if (t == 0) throw Error(ErrorCode::kAlignmentError, "target at bar 0 has no decision bar");
    decision.push_back(t - 1);
  }
  const QuantileForecast forecast = predict(*model, test);
  BacktestResult r = run_backtest(bars, forecast, decision, c.indicators, c.strategy, c.backtest);
  write_file_atomic(out / artifact::kBacktestSummary, summary_text(r.summary));
  write_file_atomic(out / artifact::kEquity, series_table("equity", r.curve.equity));
  write_file_atomic(out / artifact::kDrawdown, series_table("drawdown", r.drawdowns.series));
  write_file_atomic(out / artifact::kSignals, decisions_table(r.decisions));
  write_file_atomic(out / artifact::kTrades, trades_table(r.trades));
  write_file_atomic(out / artifact::kEquitySvg, equity_svg(r.curve, r.drawdowns));
  say(log, "backtest: " + std::to_string(r.trades.size()) + " trades, cumulative return " +
               format_double(r.summary.cumulative_return) + ", max drawdown " +
               format_double(r.summary.max_drawdown));
  return r;
}

std::vector<ComparisonEntry> cmd_compare(const RunConfig& c, const std::filesystem::path& out,
                                         const Logger& log) {
  const auto bars = load_bars(c);

  struct Run {
    std::string name;
    std::map<std::size_t, Eigen::Index> row_of_target;
    QuantileForecast forecast;
    std::vector<double> actuals;
    std::vector<std::size_t> targets;
  };
  std::vector<Run> runs;
  for (std::size_t m = 0; m < c.compare.models.size(); ++m) {
    const std::string& name = c.compare.models[m];
    auto model = build_model(name, c);
    const DatasetSplits splits =
        prepare_splits(bars, c.data.features, shape_for(model->window_in(), c), c.data.split);
    TrainConfig tc = c.train;
    tc.seed = c.seed + m;
    model->initialize(tc.seed);
    const TrainResult tr = train(*model, splits.train, tc);
    say(log, "compare: " + name + " trained, final loss " +
                 format_double(tr.loss_history.empty() ? tr.initial_loss : tr.loss_history.back()));
    Run run{name, {}, predict(*model, splits.test), actual_prices(splits.test), splits.test.target_index};
    for (std::size_t i = 0; i < run.targets.size(); ++i) run.row_of_target[run.targets[i]] = static_cast<Eigen::Index>(i);
    runs.push_back(std::move(run));
  }

  std::vector<std::size_t> common = runs.front().targets;
  for (const Run& r : runs) {
    std::erase_if(common, [&](std::size_t t) { return !r.row_of_target.count(t); });
  }
  if (common.empty()) throw Error(ErrorCode::kAlignmentError, "models share no test targets");

  std::vector<ComparisonEntry> entries;
  std::vector<double> actuals;
  for (const Run& r : runs) {
    QuantileForecast f{Matrix(static_cast<Eigen::Index>(common.size()), r.forecast.values.cols()), r.forecast.levels};
    actuals.clear();
    for (std::size_t i = 0; i < common.size(); ++i) {
      const Eigen::Index row = r.row_of_target.at(common[i]);
      f.values.row(static_cast<Eigen::Index>(i)) = r.forecast.values.row(row);
      actuals.push_back(r.actuals[static_cast<std::size_t>(row)]);
    }
    entries.push_back({r.name, evaluate(actuals, f, c.metrics)});
  }

  if (c.data.source == DataSource::kSynthetic) {
    const SyntheticSeries s = generate(c.synthetic);
    const QuantileLevels& levels = c.model.levels;
    QuantileForecast f{Matrix(static_cast<Eigen::Index>(common.size()), static_cast<Eigen::Index>(levels.size())),
                       levels};
    for (std::size_t i = 0; i < common.size(); ++i) {
      for (std::size_t j = 0; j < levels.size(); ++j) {
        f.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            s.oracle_quantile(common[i] - 1, levels[j]);
      }
    }
    entries.push_back({"oracle", evaluate(actuals, f, c.metrics)});
  }

  std::ostringstream table, text;
  table << comparison_header() << '\n';
  for (const auto& e : entries) {
    table << comparison_row(e.model, e.report) << '\n';
    text << "[" << e.model << "]\n" << to_key_value(e.report) << '\n';
  }
  write_file_atomic(out / artifact::kComparison, table.str());
  write_file_atomic(out / artifact::kComparisonText, text.str());
  say(log, "compare: " + std::to_string(entries.size()) + " rows over " + std::to_string(common.size()) +
               " test targets");
  return entries;
}

}  // namespace fq
