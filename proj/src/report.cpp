#include "futurequant/report.hpp"

#include <sstream>

#include "futurequant/io.hpp"

namespace fq {

std::string forecast_table(const WindowedDataset& dataset, const QuantileForecast& forecast,
                           std::span<const double> actuals) {
  std::ostringstream out;
  out << "target_index,target_time_ms,actual";
  for (double level : forecast.levels.values()) out << ",q_" << format_double(level);
  out << '\n';
  for (std::size_t i = 0; i < forecast.samples(); ++i) {
    out << dataset.target_index[i] << ',' << dataset.target_time[i] << ',' << format_double(actuals[i]);
    for (Eigen::Index j = 0; j < forecast.values.cols(); ++j) {
      out << ',' << format_double(forecast.values(static_cast<Eigen::Index>(i), j));
    }
    out << '\n';
  }
  return out.str();
}

std::string loss_history_table(const TrainResult& result) {
  std::ostringstream out;
  out << "epoch,loss\n0," << format_double(result.initial_loss) << '\n';
  for (std::size_t e = 0; e < result.loss_history.size(); ++e) {
    out << (e + 1) << ',' << format_double(result.loss_history[e]) << '\n';
  }
  return out.str();
}

std::string dataset_summary(const DatasetSplits& s, std::size_t bars) {
  std::ostringstream out;
  out << "bars = " << bars << '\n'
      << "train_samples = " << s.train.size() << '\n'
      << "validation_samples = " << s.validation.size() << '\n'
      << "test_samples = " << s.test.size() << '\n'
      << "train_bar_end = " << s.train_bar_end << '\n'
      << "validation_bar_end = " << s.validation_bar_end << '\n';
  for (std::size_t f = 0; f < s.train.feature_names.size(); ++f) {
    out << "scaler_" << s.train.feature_names[f] << " = " << format_double(s.train.norm.x_min[f]) << ','
        << format_double(s.train.norm.x_max[f]) << '\n';
  }
  out << "scaler_target = " << format_double(s.train.target_norm.x_min[0]) << ','
      << format_double(s.train.target_norm.x_max[0]) << '\n';
  return out.str();
}

}  // namespace fq
