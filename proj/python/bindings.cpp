#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <filesystem>
#include <sstream>

#include "futurequant/backtest.hpp"
#include "futurequant/checkpoint.hpp"
#include "futurequant/config.hpp"
#include "futurequant/error.hpp"
#include "futurequant/indicators.hpp"
#include "futurequant/io.hpp"
#include "futurequant/metrics.hpp"
#include "futurequant/pipeline.hpp"
#include "futurequant/strategy.hpp"
#include "futurequant/synthetic.hpp"

namespace py = pybind11;
using namespace fq;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<PredictionInterval> intervals(const std::vector<double>& lower, const std::vector<double>& upper) {
  if (lower.size() != upper.size()) throw Error(ErrorCode::kLengthMismatch, "lower and upper differ in length");
  std::vector<PredictionInterval> out(lower.size());
  for (std::size_t i = 0; i < lower.size(); ++i) out[i] = {lower[i], upper[i], 0.1};
  return out;
}

QuantileLevels levels_or_default(const std::optional<std::vector<double>>& levels) {
  return levels ? QuantileLevels(*levels) : QuantileLevels();
}

QuantileForecast to_forecast(const Matrix& values, const std::optional<std::vector<double>>& levels) {
  QuantileForecast f{values, levels_or_default(levels)};
  if (static_cast<std::size_t>(values.cols()) != f.levels.size()) {
    throw Error(ErrorCode::kShapeMismatch, "forecast columns do not match the level count");
  }
  return f;
}

Tensor3 to_tensor(const Array& x) {
  if (x.ndim() != 3) throw Error(ErrorCode::kShapeMismatch, "inputs must be (samples, steps, features)");
  Tensor3 t(static_cast<std::size_t>(x.shape(0)), static_cast<std::size_t>(x.shape(1)),
            static_cast<std::size_t>(x.shape(2)));
  std::copy(x.data(), x.data() + x.size(), t.data().begin());
  return t;
}

py::dict report_dict(const MetricsReport& r) {
  py::dict d;
  d["picp"] = r.picp;
  d["pinaw"] = r.pinaw;
  d["cwc"] = r.cwc;
  d["cwc_variant"] = std::string(to_string(r.cwc_variant));
  d["beta"] = r.beta;
  d["eta"] = r.eta;
  d["levels"] = r.levels;
  d["mean_pinball"] = r.mean_pinball;
  d["mean_pinball_all"] = r.mean_pinball_all;
  d["crossing_rate"] = r.crossing_rate;
  d["n"] = r.n;
  d["delta_y"] = r.delta_y;
  d["mean_width"] = r.mean_width;
  d["picp_by_width_tercile"] = r.picp_by_width_tercile;
  return d;
}

MetricConfig metric_config(double beta, double eta, const std::string& variant) {
  MetricConfig c{beta, eta, parse_cwc_variant(variant)};
  c.validate();
  return c;
}

RunConfig run_config(const std::string& path, std::optional<std::uint64_t> seed) {
  RunConfig c = load_config(path);
  if (seed) c.set_seed(*seed);
  return c;
}

}  // namespace

PYBIND11_MODULE(_futurequant, m) {
  m.doc() = "Quantile forecasting, interval metrics, indicator signals and backtests";
  m.attr("__version__") = "0.1.0";

  static py::exception<Error> fq_error(m, "FqError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = py::reinterpret_borrow<py::object>(fq_error.ptr())(e.what());
      err.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(fq_error.ptr(), err.ptr());
    }
  });

  m.def("pinball_loss", &pinball_loss, py::arg("q_hat"), py::arg("y"), py::arg("beta"));

  m.def(
      "picp",
      [](const std::vector<double>& actuals, const std::vector<double>& lower, const std::vector<double>& upper) {
        return picp(actuals, intervals(lower, upper));
      },
      py::arg("actuals"), py::arg("lower"), py::arg("upper"));
  m.def(
      "pinaw",
      [](const std::vector<double>& actuals, const std::vector<double>& lower, const std::vector<double>& upper) {
        return pinaw(actuals, intervals(lower, upper));
      },
      py::arg("actuals"), py::arg("lower"), py::arg("upper"));
  m.def(
      "cwc",
      [](double p, double w, double beta, double eta, const std::string& variant) {
        return cwc(p, w, metric_config(beta, eta, variant));
      },
      py::arg("picp"), py::arg("pinaw"), py::arg("beta") = 0.1, py::arg("eta") = 30.0,
      py::arg("variant") = "as-printed");

  m.def(
      "repair_monotonic",
      [](const Matrix& values) { return repair_monotonic(QuantileForecast{values, QuantileLevels()}).values; },
      py::arg("values"), "Sort each row ascending.");
  m.def(
      "crossing_rate", [](const Matrix& values) { return crossing_rate(QuantileForecast{values, QuantileLevels()}); },
      py::arg("values"));
  m.def(
      "evaluate",
      [](const std::vector<double>& actuals, const Matrix& values, std::optional<std::vector<double>> levels,
         double beta, double eta, const std::string& variant) {
        return report_dict(evaluate(actuals, to_forecast(values, levels), metric_config(beta, eta, variant)));
      },
      py::arg("actuals"), py::arg("values"), py::arg("levels") = py::none(), py::arg("beta") = 0.1,
      py::arg("eta") = 30.0, py::arg("variant") = "as-printed");

  m.def(
      "rsi", [](const std::vector<double>& closes, std::size_t period) { return rsi(closes, period); },
      py::arg("closes"), py::arg("period") = 14, "Element k belongs to close index period + k.");
  m.def(
      "shape_from_quantiles",
      [](const std::vector<double>& row, std::optional<std::vector<double>> levels) {
        const ShapeEstimate s = shape_from_quantiles(row, levels_or_default(levels));
        return py::make_tuple(s.mean, s.std_dev, s.skewness, s.excess_kurtosis);
      },
      py::arg("row"), py::arg("levels") = py::none(), "Returns (mean, std_dev, skewness, excess_kurtosis).");
  m.def(
      "generate_signal",
      [](double price, double atr_pct, double lower_band, double rsi_value, double threshold, double atr_low,
         double atr_high) {
        IndicatorConfig c;
        c.threshold = threshold;
        c.atr_low = atr_low;
        c.atr_high = atr_high;
        c.validate();
        const Signal s = generate_signal(price, atr_pct, lower_band, rsi_value, c);
        return py::make_tuple(std::string(to_string(s.kind)), s.reason);
      },
      py::arg("price"), py::arg("atr_pct"), py::arg("lower_band"), py::arg("rsi"), py::arg("threshold") = 1.0,
      py::arg("atr_low") = 0.01, py::arg("atr_high") = 0.03);

  m.def(
      "cumulative_return", [](const std::vector<double>& r) { return cumulative_return(r); }, py::arg("returns"));
  m.def(
      "drawdown",
      [](const std::vector<double>& equity) {
        const DrawdownStats d = drawdown(equity);
        return py::make_tuple(d.series, d.max_drawdown, d.count_over_threshold);
      },
      py::arg("equity"), "Returns (series, max_drawdown, count_over_threshold).");
  m.def("scenario_test", &scenario_test, py::arg("initial_funds"), py::arg("period_return"));

  m.def(
      "synthetic",
      [](const std::string& kind, std::size_t length, std::uint64_t seed) {
        SyntheticSpec spec;
        spec.kind = parse_synthetic_kind(kind);
        spec.length = length;
        spec.seed = seed;
        const SyntheticSeries s = generate(spec);
        py::dict d;
        d["prices"] = s.prices;
        d["latent"] = s.latent;
        d["regime"] = s.regime;
        return d;
      },
      py::arg("kind") = "gaussian-ar1", py::arg("length") = 5000, py::arg("seed") = 0);
  m.def(
      "oracle_quantile",
      [](const std::string& kind, std::size_t length, std::uint64_t seed, std::size_t t, double beta) {
        SyntheticSpec spec;
        spec.kind = parse_synthetic_kind(kind);
        spec.length = length;
        spec.seed = seed;
        return generate(spec).oracle_quantile(t, beta);
      },
      py::arg("kind"), py::arg("length"), py::arg("seed"), py::arg("t"), py::arg("beta"),
      "True conditional quantile of prices[t + 1].");

  m.def(
      "forecast",
      [](const std::string& checkpoint, const Array& inputs) {
        const auto model = read_checkpoint(read_file(checkpoint));
        return Matrix(model->forward(to_tensor(inputs)));
      },
      py::arg("checkpoint"), py::arg("inputs"), "Forward pass of a saved model on (samples, steps, features) inputs.");

  m.def(
      "validate_config", [](const std::string& path) { load_config(path); }, py::arg("path"));
  m.def(
      "synth",
      [](const std::string& config, const std::string& out, std::optional<std::uint64_t> seed) {
        return cmd_synth(run_config(config, seed), out).prices.size();
      },
      py::arg("config"), py::arg("out"), py::arg("seed") = py::none());
  m.def(
      "ingest",
      [](const std::string& config, const std::string& out, std::optional<std::uint64_t> seed) {
        const DatasetSplits s = cmd_ingest(run_config(config, seed), out);
        return py::make_tuple(s.train.size(), s.validation.size(), s.test.size());
      },
      py::arg("config"), py::arg("out"), py::arg("seed") = py::none());
  m.def(
      "train",
      [](const std::string& config, const std::string& out, std::optional<std::uint64_t> seed) {
        const TrainResult r = cmd_train(run_config(config, seed), out);
        return py::make_tuple(r.initial_loss, r.loss_history);
      },
      py::arg("config"), py::arg("out"), py::arg("seed") = py::none(), "Returns (initial_loss, loss_history).");
  m.def(
      "eval",
      [](const std::string& config, const std::string& out, std::optional<std::uint64_t> seed) {
        return report_dict(cmd_eval(run_config(config, seed), out));
      },
      py::arg("config"), py::arg("out"), py::arg("seed") = py::none());
  m.def(
      "backtest",
      [](const std::string& config, const std::string& out, std::optional<std::uint64_t> seed) {
        const BacktestSummary s = cmd_backtest(run_config(config, seed), out).summary;
        py::dict d;
        d["initial_capital"] = s.initial_capital;
        d["final_equity"] = s.final_equity;
        d["cumulative_return"] = s.cumulative_return;
        d["horizon_returns"] = s.horizon_returns;
        d["volatility"] = s.volatility;
        d["max_drawdown"] = s.max_drawdown;
        d["drawdown_count"] = s.drawdown_count;
        d["trades"] = s.trades;
        d["bars"] = s.bars;
        return d;
      },
      py::arg("config"), py::arg("out"), py::arg("seed") = py::none());
  m.def(
      "compare",
      [](const std::string& config, const std::string& out, std::optional<std::uint64_t> seed) {
        py::dict d;
        for (const auto& e : cmd_compare(run_config(config, seed), out)) d[py::str(e.model)] = report_dict(e.report);
        return d;
      },
      py::arg("config"), py::arg("out"), py::arg("seed") = py::none());
}
