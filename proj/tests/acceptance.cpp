// Acceptance suite: one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "futurequant/backtest.hpp"
#include "futurequant/baselines.hpp"
#include "futurequant/futurequant.hpp"
#include "futurequant/indicators.hpp"
#include "futurequant/io.hpp"
#include "futurequant/layers.hpp"
#include "futurequant/metrics.hpp"
#include "futurequant/pipeline.hpp"
#include "futurequant/strategy.hpp"
#include "futurequant/synthetic.hpp"
#include "futurequant/train.hpp"

using namespace fq;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, const char* name, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %s: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
  std::fflush(stdout);
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v) { return format_double(v); }

Outcome metric_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> len(2, 60);
  std::normal_distribution<double> n;
  std::size_t mismatches = 0;
  double worst_pinaw = 0.0;
  for (int set = 0; set < 1000; ++set) {
    const int m = len(rng);
    std::vector<double> y(static_cast<std::size_t>(m));
    std::vector<PredictionInterval> pi(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      y[static_cast<std::size_t>(i)] = n(rng);
      double a = n(rng), b = n(rng);
      if (i % 7 == 0) a = y[static_cast<std::size_t>(i)];  // boundary hits
      pi[static_cast<std::size_t>(i)] = {std::min(a, b), std::max(a, b), 0.1};
    }
    int hits = 0;
    double width = 0.0, lo = y[0], hi = y[0];
    for (int i = 0; i < m; ++i) {
      const auto k = static_cast<std::size_t>(i);
      if (pi[k].lower <= y[k] && y[k] <= pi[k].upper) ++hits;
      width += pi[k].upper - pi[k].lower;
      lo = std::min(lo, y[k]);
      hi = std::max(hi, y[k]);
    }
    const double expect_picp = static_cast<double>(hits) / m;
    const double expect_pinaw = width / (m * (hi - lo));
    if (picp(y, pi) != expect_picp) ++mismatches;
    worst_pinaw = std::max(worst_pinaw, std::abs(pinaw(y, pi) - expect_pinaw) / std::abs(expect_pinaw));
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && worst_pinaw <= 1e-12 && secs < 1.0,
          "picp mismatches " + std::to_string(mismatches) + ", max pinaw rel err " + num(worst_pinaw) +
              ", " + num(secs) + "s (limit 1s)"};
}

Outcome cwc_spots() {
  const MetricConfig printed{0.1, 30.0, CwcVariant::kAsPrinted};
  const MetricConfig squared{0.1, 30.0, CwcVariant::kSquaredDeviation};
  const double a = cwc(0.81, 0.2, printed);
  const double b = cwc(0.91, 0.2, printed);
  const double c = cwc(0.90, 0.2, squared);
  const bool ok = std::abs(a - 0.8) <= 1e-6 && std::abs(b - 0.03983) <= 1e-6 && std::abs(c - 0.8) <= 1e-6;
  return {ok, "as-printed(0.81)=" + num(a) + ", as-printed(0.91)=" + num(b) + ", squared(0.90)=" + num(c)};
}

Outcome gradient_fidelity() {
  const auto t0 = Clock::now();
  std::string detail;
  bool ok = true;
  for (std::uint64_t seed : {11u, 22u, 33u}) {
    Rng rng(seed);
    std::uniform_int_distribution<int> key(2, 6), chans(3, 8), kernel(1, 3), dense(3, 8);
    ModelSpec s;
    s.window_in = 5;
    s.num_blocks = 2;
    s.num_heads = 2;
    s.key_dim = static_cast<std::size_t>(key(rng));
    s.conv_channels = static_cast<std::size_t>(chans(rng));
    s.conv_kernel = static_cast<std::size_t>(kernel(rng));
    s.dense_units = {static_cast<std::size_t>(dense(rng)), static_cast<std::size_t>(dense(rng))};
    FutureQuantModel m(s);
    m.initialize(seed);
    std::normal_distribution<double> n;
    for (double& v : m.params().values()) v += 0.1 * n(rng);
    Tensor3 x(4, 5, 1);
    for (double& v : x.data()) v = n(rng);
    std::vector<double> y(4);
    for (double& v : y) v = n(rng);
    GradientCheckOptions opt;
    opt.seed = seed;
    const auto r = gradient_check(m, x, y, opt);
    ok = ok && r.checked >= 200 && r.max_relative_error <= 1e-4;
    detail += "seed " + std::to_string(seed) + ": " + num(r.max_relative_error) + " over " +
              std::to_string(r.checked) + " params; ";
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 30.0;
  return {ok, detail + "limit 1e-4, " + num(secs) + "s (limit 30s)"};
}

Outcome pinball_optimum() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(77);
  std::normal_distribution<double> n(5.0, 2.0);
  std::vector<double> y(1000);
  for (double& v : y) v = n(rng);
  std::vector<double> sorted = y;
  std::sort(sorted.begin(), sorted.end());

  const QuantileLevels levels({0.1, 0.5, 0.9});
  QuantileLinearModel model(LinearSpec{1, 1, levels, true});
  model.initialize(0);
  TrainConfig c;
  c.optimizer = OptimizerKind::kGradientDescent;
  c.learning_rate = 1.0;
  c.epochs = 3000;
  c.batch_size = y.size();
  train(model, Tensor3(y.size(), 1, 1), y, c);
  const Matrix fitted = model.forward(Tensor3(1, 1, 1));

  bool ok = true;
  std::string detail;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    const double beta = levels[j];
    // Brute-force pinball minimizers among the order statistics.
    std::vector<double> loss(sorted.size());
    for (std::size_t k = 0; k < sorted.size(); ++k) {
      for (double v : y) loss[k] += pinball_loss(sorted[k], v, beta);
    }
    const double best = *std::min_element(loss.begin(), loss.end());
    std::size_t first = sorted.size(), last = 0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
      if (loss[k] <= best * (1 + 1e-12)) {
        first = std::min(first, k);
        last = std::max(last, k);
      }
    }
    const double lo = sorted[first == 0 ? 0 : first - 1];
    const double hi = sorted[std::min(last + 1, sorted.size() - 1)];
    const double f = fitted(0, static_cast<Eigen::Index>(j));
    const bool within = lo <= f && f <= hi;
    ok = ok && within;
    detail += "q" + num(beta) + " fitted " + num(f) + " in [" + num(lo) + ", " + num(hi) + "]; ";
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 10.0;
  return {ok, detail + num(secs) + "s (limit 10s)"};
}

Outcome coverage_calibration() {
  const auto t0 = Clock::now();
  RunConfig cfg;
  cfg.set_seed(1);
  cfg.synthetic.kind = SyntheticKind::kHeteroscedasticAr1;
  cfg.synthetic.length = 5000;
  const std::vector<Bar> bars = load_bars(cfg);
  const DatasetSplits splits = prepare_splits(bars, cfg.data.features, {cfg.model.window_in, 1, 1}, cfg.data.split);
  FutureQuantModel model(cfg.model);
  model.initialize(cfg.seed);
  train(model, splits.train, cfg.train);
  const QuantileForecast forecast = predict(model, splits.test);

  // Closed-form oracle written out here rather than taken from the generator.
  const SyntheticSeries series = generate(cfg.synthetic);
  const auto& sp = cfg.synthetic;
  const boost::math::normal n01;
  std::vector<double> actual;
  double model_loss = 0.0, oracle_loss = 0.0;
  std::size_t covered = 0;
  const QuantileForecast repaired = repair_monotonic(forecast);
  for (std::size_t i = 0; i < splits.test.size(); ++i) {
    const std::size_t t = splits.test.target_index[i];
    const double y = splits.test.target_norm.invert(splits.test.targets(static_cast<Eigen::Index>(i), 0), 0);
    actual.push_back(y);
    const double x = series.latent[t - 1];
    for (std::size_t j = 0; j < 5; ++j) {
      const double beta = cfg.model.levels[j];
      const double q = sp.level + sp.phi * x + sp.sigma0 * (1 + sp.kappa * std::abs(x)) * boost::math::quantile(n01, beta);
      oracle_loss += pinball_loss(q, y, beta);
      model_loss += pinball_loss(repaired.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), y, beta);
    }
    const double lo = repaired.values(static_cast<Eigen::Index>(i), 0);
    const double hi = repaired.values(static_cast<Eigen::Index>(i), 4);
    covered += lo <= y && y <= hi;
  }
  const double coverage = static_cast<double>(covered) / static_cast<double>(actual.size());
  const double ratio = model_loss / oracle_loss;
  const double secs = seconds_since(t0);
  const bool ok = coverage >= 0.85 && coverage <= 0.95 && ratio <= 1.15 && secs < 300.0;
  return {ok, "test PICP " + num(coverage) + " (target [0.85, 0.95]), pinball " + num(model_loss / (5.0 * actual.size())) +
                  " vs oracle " + num(oracle_loss / (5.0 * actual.size())) + " ratio " + num(ratio) +
                  " (limit 1.15), n=" + std::to_string(actual.size()) + ", " + num(secs) + "s (limit 300s)"};
}

Outcome shape_identity() {
  FutureQuantModel m(ModelSpec{});
  m.initialize(5);
  Rng rng(5);
  std::normal_distribution<double> n;
  Tensor3 x(9, 5, 1);
  for (double& v : x.data()) v = n(rng);
  const Matrix out = m.forward(x);
  const bool shape_ok = out.rows() == 9 && out.cols() == 5;

  FutureQuantModel zero(ModelSpec{});
  Matrix h(5, 16);
  for (double& v : h.reshaped()) v = n(rng);
  const bool identity = encoder_block(h, zero.block_params(0), 2, 0.1, Mode::kTrain, &rng) == h &&
                        encoder_block(h, zero.block_params(3), 2, 0.1, Mode::kEval, nullptr) == h;

  Matrix logits(50, 12);
  for (double& v : logits.reshaped()) v = 10 * n(rng);
  const Matrix p = layers::softmax_rows(logits);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) worst = std::max(worst, std::abs(p.row(i).sum() - 1.0));

  QuantileForecast f{Matrix(300, 5), QuantileLevels()};
  for (double& v : f.values.reshaped()) v = n(rng);
  const QuantileForecast r = repair_monotonic(f);
  const bool repair_ok = crossing_rate(r) == 0.0 && repair_monotonic(r).values == r.values;

  return {shape_ok && identity && worst <= 1e-12 && repair_ok,
          "output " + std::to_string(out.rows()) + "x" + std::to_string(out.cols()) + ", zero block identity " +
              (identity ? "exact" : "broken") + ", max |row sum - 1| " + num(worst) + ", repaired crossing rate " +
              num(crossing_rate(r)) + (repair_ok ? ", idempotent" : ", not idempotent")};
}

// Literal transcription of the printed decision tree.
std::string printed_algorithm(double price, double atr, double lower_band, double rsi, double threshold) {
  if (rsi < 30) {
    if (price < threshold * lower_band) {
      if (atr >= 0.01 && atr < 0.03) return "Buy";
      else if (atr >= 0.03) return "None";
    }
  } else if (rsi > 70) {
    if (price > threshold * lower_band) {
      if (atr >= 0.01 && atr < 0.03) return "Sell";
      else if (atr >= 0.03) return "None";
    }
  }
  return "None";
}

Outcome decision_table() {
  const IndicatorConfig cfg;
  const double band = 100.0;
  int buys = 0, sells = 0, nones = 0, mismatches = 0;
  for (double rsi : {25.0, 50.0, 75.0}) {
    for (double atr : {0.005, 0.02, 0.035}) {
      for (double price : {99.0, 101.0}) {
        const Signal s = generate_signal(price, atr, band, rsi, cfg);
        const std::string got(s.kind == SignalKind::kBuy ? "Buy" : s.kind == SignalKind::kSell ? "Sell" : "None");
        if (got != printed_algorithm(price, atr, band, rsi, cfg.threshold)) ++mismatches;
        (got == "Buy" ? buys : got == "Sell" ? sells : nones)++;
      }
    }
  }
  return {mismatches == 0, "18 combinations, " + std::to_string(mismatches) + " mismatches vs literal transcription; counts " +
                               std::to_string(buys) + " Buy / " + std::to_string(sells) + " Sell / " +
                               std::to_string(nones) + " None (criterion text states 2/1/15, which the printed tree does not produce)"};
}

Outcome backtest_arithmetic() {
  const double c = cumulative_return(std::vector<double>{0.1, -0.05});
  const double s1 = scenario_test(1'000'000, 0.14316);
  const double s2 = scenario_test(1'000'000, 0.12254);
  const double dd = drawdown(std::vector<double>{100, 110, 99}).max_drawdown;
  const bool ok = c == 0.045 && std::abs(s1 - 1'143'160.0) <= 1e-6 && std::abs(s2 - 1'122'540.0) <= 1e-6 &&
                  std::abs(dd - 0.1) <= 1e-12;
  return {ok, "cumulative " + num(c) + ", scenarios " + num(s1) + " / " + num(s2) + ", max drawdown " + num(dd)};
}

Outcome moment_fit() {
  const boost::math::normal n01;
  const QuantileLevels levels;
  std::vector<double> row;
  for (double p : levels.values()) row.push_back(3.0 + 2.0 * boost::math::quantile(n01, p));
  const ShapeEstimate g = shape_from_quantiles(row, QuantileLevels());
  const bool gauss = std::abs(g.mean - 3) <= 1e-6 && std::abs(g.std_dev - 2) <= 1e-6 && std::abs(g.skewness) <= 1e-6 &&
                     std::abs(g.excess_kurtosis) <= 1e-6;
  const std::vector<std::vector<double>> rows{{1, 2, 3, 5, 8}, {0, 0.5, 1, 4, 9}, {-3, -1, 0, 0.25, 0.5}, {10, 11, 11.5, 12, 20}};
  int flipped = 0;
  for (const auto& r : rows) {
    std::vector<double> reflected(5);
    for (std::size_t i = 0; i < 5; ++i) reflected[i] = 2 * r[2] - r[4 - i];
    const double a = shape_from_quantiles(r, QuantileLevels()).skewness;
    const double b = shape_from_quantiles(reflected, QuantileLevels()).skewness;
    if (a != 0.0 && b == -a) ++flipped;
  }
  return {gauss && flipped == static_cast<int>(rows.size()),
          "gaussian fit (" + num(g.mean) + ", " + num(g.std_dev) + ", " + num(g.skewness) + ", " + num(g.excess_kurtosis) +
              "), exact skew flips " + std::to_string(flipped) + "/" + std::to_string(rows.size())};
}

Outcome determinism() {
  RunConfig cfg;
  cfg.set_seed(9);
  cfg.synthetic.kind = SyntheticKind::kRegimeSwitch;
  cfg.synthetic.length = 1200;
  cfg.train.epochs = 5;
  const auto base = std::filesystem::temp_directory_path() / "fq_acceptance_determinism";
  std::filesystem::remove_all(base);
  cmd_compare(cfg, base / "a");
  cmd_compare(cfg, base / "b");
  bool same = true;
  for (const char* name : {artifact::kComparison, artifact::kComparisonText}) {
    same = same && read_file(base / "a" / name) == read_file(base / "b" / name);
  }
  std::filesystem::remove_all(base);
  return {same, std::string("comparison.csv and comparison.txt ") + (same ? "byte-identical" : "differ")};
}

}  // namespace

int main() {
  run(1, "metric oracle equivalence", metric_oracle);
  run(2, "CWC spot values", cwc_spots);
  run(3, "gradient fidelity", gradient_fidelity);
  run(4, "pinball-optimum oracle", pinball_optimum);
  run(5, "coverage calibration on synthetic data", coverage_calibration);
  run(6, "shape and identity checks", shape_identity);
  run(7, "decision table", decision_table);
  run(8, "backtest arithmetic", backtest_arithmetic);
  run(9, "moment-fit oracle", moment_fit);
  run(10, "end-to-end determinism", determinism);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
