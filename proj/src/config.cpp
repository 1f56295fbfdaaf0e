#include "futurequant/config.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "futurequant/error.hpp"
#include "futurequant/io.hpp"

namespace fq {

std::string_view to_string(DataSource source) noexcept {
  switch (source) {
    case DataSource::kSynthetic: return "synthetic";
    case DataSource::kTicks: return "ticks";
    case DataSource::kBars: return "bars";
  }
  return "?";
}

void RunConfig::validate() const {
  auto bad = [](const std::string& m) { throw Error(ErrorCode::kConfigError, m); };
  if (data.split.size() != 3) bad("data.split needs three fractions");
  double total = 0.0;
  for (double f : data.split) {
    if (!(f > 0.0)) bad("data.split fractions must be positive");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) bad("data.split fractions must sum to 1");
  if (data.features.empty()) bad("data.features must not be empty");
  if (data.bar_interval_ms <= 0) bad("data.bar_interval_ms must be positive");
  if (data.window_out < 1 || data.stride < 1) bad("data.window_out and data.stride must be >= 1");
  if (data.source != DataSource::kSynthetic && data.path.empty()) bad("data.path is required for file sources");
  if (model.num_features != data.features.size()) bad("model feature count does not match data.features");
  if (baseline_window_in < 1) bad("baseline.window_in must be >= 1");
  if (compare.models.empty()) bad("compare.models must not be empty");
  try {
    model.validate();
    train.validate();
    metrics.validate();
    indicators.validate();
    strategy.validate();
    backtest.validate();
    if (data.source == DataSource::kSynthetic) synthetic.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigError, e.what());
  }
}

namespace {

class Parser {
 public:
  using Handler = std::function<void(std::string_view)>;

  void on(const std::string& section, const std::string& key, Handler h) {
    handlers_[section + "." + key] = std::move(h);
  }

  void run(std::string_view text) {
    std::string section;
    std::set<std::string> seen;
    std::size_t line_no = 0;
    for (std::string_view raw : split(text, '\n')) {
      ++line_no;
      std::string_view line = raw;
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') fail(line_no, "unterminated section header");
        section = std::string(trim(line.substr(1, line.size() - 2)));
        if (!sections().count(section)) fail(line_no, "unknown section [" + section + "]");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) fail(line_no, "expected key = value");
      if (section.empty()) fail(line_no, "key outside any section");
      const std::string key = section + "." + std::string(trim(line.substr(0, eq)));
      auto it = handlers_.find(key);
      if (it == handlers_.end()) fail(line_no, "unknown key '" + key + "'");
      if (!seen.insert(key).second) fail(line_no, "duplicate key '" + key + "'");
      try {
        it->second(trim(line.substr(eq + 1)));
      } catch (const Error& e) {
        fail(line_no, key + ": " + e.what());
      }
    }
  }

 private:
  std::set<std::string> sections() const {
    std::set<std::string> out;
    for (const auto& [k, h] : handlers_) out.insert(k.substr(0, k.find('.')));
    return out;
  }
  [[noreturn]] static void fail(std::size_t line, const std::string& msg) {
    throw Error(ErrorCode::kConfigError, "config line " + std::to_string(line) + ": " + msg);
  }
  std::map<std::string, Handler> handlers_;
};

[[noreturn]] void bad_value(std::string_view v, const char* what) {
  throw Error(ErrorCode::kConfigError, "expected " + std::string(what) + ", got '" + std::string(v) + "'");
}

double to_real(std::string_view v) {
  double x = 0.0;
  if (!parse_double(v, x) || !std::isfinite(x)) bad_value(v, "a number");
  return x;
}

std::int64_t to_int(std::string_view v) {
  std::int64_t x = 0;
  if (!parse_int(v, x)) bad_value(v, "an integer");
  return x;
}

std::size_t to_count(std::string_view v) {
  const std::int64_t x = to_int(v);
  if (x < 0) bad_value(v, "a non-negative integer");
  return static_cast<std::size_t>(x);
}

bool to_bool(std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(v, "true or false");
}

template <typename T, typename F>
std::vector<T> to_list(std::string_view v, F convert) {
  std::vector<T> out;
  if (trim(v).empty()) return out;
  for (auto part : split(v, ',')) out.push_back(convert(trim(part)));
  return out;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  Parser p;
  auto real = [](double& dst) { return [&dst](std::string_view v) { dst = to_real(v); }; };
  auto count = [](std::size_t& dst) { return [&dst](std::string_view v) { dst = to_count(v); }; };
  auto flag = [](bool& dst) { return [&dst](std::string_view v) { dst = to_bool(v); }; };
  auto counts = [](std::vector<std::size_t>& dst) {
    return [&dst](std::string_view v) { dst = to_list<std::size_t>(v, to_count); };
  };

  p.on("run", "seed", [&](std::string_view v) { c.seed = static_cast<std::uint64_t>(to_count(v)); });
  p.on("run", "out_dir", [&](std::string_view v) { c.out_dir = std::string(v); });

  p.on("data", "source", [&](std::string_view v) {
    if (v == "synthetic") c.data.source = DataSource::kSynthetic;
    else if (v == "ticks") c.data.source = DataSource::kTicks;
    else if (v == "bars") c.data.source = DataSource::kBars;
    else bad_value(v, "synthetic, ticks or bars");
  });
  p.on("data", "path", [&](std::string_view v) { c.data.path = std::string(v); });
  p.on("data", "delimiter", [&](std::string_view v) {
    if (v == "tab" || v == "\\t") c.data.delimiter = '\t';
    else if (v.size() == 1) c.data.delimiter = v.front();
    else bad_value(v, "a single character or 'tab'");
  });
  p.on("data", "timestamp_tolerance_ms", [&](std::string_view v) { c.data.timestamp_tolerance_ms = to_int(v); });
  p.on("data", "bar_interval_ms", [&](std::string_view v) { c.data.bar_interval_ms = to_int(v); });
  p.on("data", "features", [&](std::string_view v) {
    c.data.features = to_list<Feature>(v, [](std::string_view s) { return parse_feature(s); });
  });
  p.on("data", "window_out", count(c.data.window_out));
  p.on("data", "stride", count(c.data.stride));
  p.on("data", "split", [&](std::string_view v) { c.data.split = to_list<double>(v, to_real); });

  p.on("synthetic", "kind", [&](std::string_view v) { c.synthetic.kind = parse_synthetic_kind(v); });
  p.on("synthetic", "length", count(c.synthetic.length));
  p.on("synthetic", "phi", real(c.synthetic.phi));
  p.on("synthetic", "sigma0", real(c.synthetic.sigma0));
  p.on("synthetic", "kappa", real(c.synthetic.kappa));
  p.on("synthetic", "level", real(c.synthetic.level));
  p.on("synthetic", "regime_mean0", real(c.synthetic.regime_mean0));
  p.on("synthetic", "regime_mean1", real(c.synthetic.regime_mean1));
  p.on("synthetic", "stay_probability", real(c.synthetic.stay_probability));

  p.on("model", "window_in", count(c.model.window_in));
  p.on("model", "num_blocks", count(c.model.num_blocks));
  p.on("model", "num_heads", count(c.model.num_heads));
  p.on("model", "key_dim", count(c.model.key_dim));
  p.on("model", "conv_channels", count(c.model.conv_channels));
  p.on("model", "conv_kernel", count(c.model.conv_kernel));
  p.on("model", "dense_units", counts(c.model.dense_units));
  p.on("model", "dropout_rate", real(c.model.dropout_rate));
  p.on("model", "levels", [&](std::string_view v) { c.model.levels = QuantileLevels(to_list<double>(v, to_real)); });

  p.on("baseline", "window_in", count(c.baseline_window_in));
  p.on("baseline", "mlp_hidden", counts(c.baseline_mlp_hidden));

  p.on("train", "learning_rate", real(c.train.learning_rate));
  p.on("train", "epochs", count(c.train.epochs));
  p.on("train", "batch_size", count(c.train.batch_size));
  p.on("train", "optimizer", [&](std::string_view v) { c.train.optimizer = parse_optimizer(v); });
  p.on("train", "momentum", real(c.train.momentum));
  p.on("train", "adam_beta1", real(c.train.adam_beta1));
  p.on("train", "adam_beta2", real(c.train.adam_beta2));
  p.on("train", "adam_epsilon", real(c.train.adam_epsilon));
  p.on("train", "gradient_clip", [&](std::string_view v) {
    if (v == "none") c.train.gradient_clip.reset();
    else c.train.gradient_clip = to_real(v);
  });

  p.on("metrics", "beta", real(c.metrics.beta));
  p.on("metrics", "eta", real(c.metrics.eta));
  p.on("metrics", "cwc_variant", [&](std::string_view v) { c.metrics.cwc_variant = parse_cwc_variant(v); });

  p.on("indicators", "rsi_period", count(c.indicators.rsi_period));
  p.on("indicators", "atr_period", count(c.indicators.atr_period));
  p.on("indicators", "atr_low", real(c.indicators.atr_low));
  p.on("indicators", "atr_high", real(c.indicators.atr_high));
  p.on("indicators", "threshold", real(c.indicators.threshold));
  p.on("indicators", "use_predicted_median", flag(c.indicators.use_predicted_median));

  p.on("strategy", "sell_vs_upper_band", flag(c.strategy.sell_vs_upper_band));
  p.on("strategy", "cost_rate", real(c.strategy.cost_rate));

  p.on("backtest", "initial_capital", real(c.backtest.initial_capital));
  p.on("backtest", "horizons", [&](std::string_view v) {
    c.backtest.horizons = to_list<Horizon>(v, [](std::string_view item) {
      const auto colon = item.find(':');
      if (colon == std::string_view::npos) bad_value(item, "name:bars");
      return Horizon{std::string(trim(item.substr(0, colon))), to_count(trim(item.substr(colon + 1)))};
    });
  });

  p.on("compare", "models", [&](std::string_view v) {
    c.compare.models = to_list<std::string>(v, [](std::string_view s) {
      if (s != "futurequant" && s != "quantile-linear" && s != "quantile-mlp" && s != "quantile-intercept") {
        bad_value(s, "futurequant, quantile-linear, quantile-mlp or quantile-intercept");
      }
      return std::string(s);
    });
  });

  p.run(text);
  c.model.num_features = c.data.features.size();
  c.set_seed(c.seed);
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error&) {
    throw Error(ErrorCode::kConfigError, "cannot read config " + path.string());
  }
  return parse_config(text);
}

}  // namespace fq
