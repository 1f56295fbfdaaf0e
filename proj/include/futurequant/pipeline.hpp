#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "futurequant/backtest.hpp"
#include "futurequant/config.hpp"
#include "futurequant/metrics.hpp"
#include "futurequant/model.hpp"
#include "futurequant/synthetic.hpp"
#include "futurequant/train.hpp"

namespace fq {

using Logger = std::function<void(const std::string&)>;

// Artifact names inside the output directory.
namespace artifact {
inline constexpr const char* kTicks = "ticks.csv";
inline constexpr const char* kBars = "bars.csv";
inline constexpr const char* kOracle = "oracle.csv";
inline constexpr const char* kTrain = "train.fqd";
inline constexpr const char* kValidation = "val.fqd";
inline constexpr const char* kTest = "test.fqd";
inline constexpr const char* kIngestSummary = "ingest.txt";
inline constexpr const char* kCheckpoint = "model.ckpt";
inline constexpr const char* kLossHistory = "loss_history.csv";
inline constexpr const char* kForecast = "forecast.csv";
inline constexpr const char* kMetrics = "metrics.txt";
inline constexpr const char* kMetricsRow = "metrics.csv";
inline constexpr const char* kBacktestSummary = "backtest.txt";
inline constexpr const char* kEquity = "equity.csv";
inline constexpr const char* kDrawdown = "drawdown.csv";
inline constexpr const char* kSignals = "signals.csv";
inline constexpr const char* kTrades = "trades.csv";
inline constexpr const char* kEquitySvg = "equity.svg";
inline constexpr const char* kComparison = "comparison.csv";
inline constexpr const char* kComparisonText = "comparison.txt";
}  // namespace artifact

// Bars from the configured source. Synthetic series go through the tick
// emitter and the resampler like real feeds do.
std::vector<Bar> load_bars(const RunConfig& config);

// Untrained model of the given kind sized from the config.
std::unique_ptr<QuantileModel> build_model(const std::string& kind, const RunConfig& config);

SyntheticSeries cmd_synth(const RunConfig& config, const std::filesystem::path& out, const Logger& log = {});
DatasetSplits cmd_ingest(const RunConfig& config, const std::filesystem::path& out, const Logger& log = {});
TrainResult cmd_train(const RunConfig& config, const std::filesystem::path& out, const Logger& log = {});
MetricsReport cmd_eval(const RunConfig& config, const std::filesystem::path& out, const Logger& log = {});
BacktestResult cmd_backtest(const RunConfig& config, const std::filesystem::path& out,
                            const Logger& log = {});

struct ComparisonEntry {
  std::string model;
  MetricsReport report;
};

// Trains each configured model with seed + model index on its own window
// length, scores all of them on the common test targets, and adds an oracle
// row for synthetic sources.
std::vector<ComparisonEntry> cmd_compare(const RunConfig& config, const std::filesystem::path& out,
                                         const Logger& log = {});

}  // namespace fq
