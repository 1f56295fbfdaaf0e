#pragma once

#include <span>
#include <string>

#include "futurequant/market_data.hpp"
#include "futurequant/quantile.hpp"
#include "futurequant/train.hpp"

namespace fq {

// target_index,target_time_ms,actual,q_<level>... with one row per sample.
// Raw (unrepaired) values; `actuals` in price units.
std::string forecast_table(const WindowedDataset& dataset, const QuantileForecast& forecast,
                           std::span<const double> actuals);

std::string loss_history_table(const TrainResult& result);

std::string dataset_summary(const DatasetSplits& splits, std::size_t bars);

}  // namespace fq
