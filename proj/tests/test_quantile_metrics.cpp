#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "futurequant/metrics.hpp"
#include "futurequant/quantile.hpp"
#include "test_util.hpp"

using namespace fq;

namespace {

QuantileForecast rows(std::initializer_list<std::initializer_list<double>> r) {
  QuantileForecast f{Matrix(static_cast<Eigen::Index>(r.size()), 5), QuantileLevels()};
  Eigen::Index i = 0;
  for (const auto& row : r) {
    Eigen::Index j = 0;
    for (double v : row) f.values(i, j++) = v;
    ++i;
  }
  return f;
}

std::vector<PredictionInterval> intervals(std::initializer_list<std::pair<double, double>> v) {
  std::vector<PredictionInterval> out;
  for (auto [l, u] : v) out.push_back({l, u, 0.1});
  return out;
}

}  // namespace

TEST(Pinball, Values) {
  EXPECT_DOUBLE_EQ(pinball_loss(10, 12, 0.9), 1.8);
  EXPECT_DOUBLE_EQ(pinball_loss(10, 8, 0.9), 0.2);
  for (double b : {0.05, 0.5, 0.95}) EXPECT_EQ(pinball_loss(3.0, 3.0, b), 0.0);
}

TEST(Levels, ValidationAndLookup) {
  QuantileLevels d;
  EXPECT_EQ(d.size(), 5u);
  EXPECT_EQ(d.index_of(0.9), 3u);
  EXPECT_FQ_ERROR(d.index_of(0.25), ErrorCode::kMissingLevel);
  EXPECT_FQ_ERROR(QuantileLevels({0.5, 0.1}), ErrorCode::kInvalidArgument);
  EXPECT_FQ_ERROR(QuantileLevels({0.0, 0.5}), ErrorCode::kInvalidArgument);
}

TEST(Repair, SortsAndIsIdempotent) {
  auto f = rows({{5, 4, 6, 7, 8}, {1, 2, 3, 4, 5}, {2, 2, 2, 2, 2}});
  const auto r = repair_monotonic(f);
  EXPECT_EQ(r.values.row(0), (RowVector(5) << 4, 5, 6, 7, 8).finished());
  EXPECT_EQ(r.values.row(1), f.values.row(1));
  EXPECT_EQ(r.values.row(2), f.values.row(2));
  EXPECT_EQ(repair_monotonic(r).values, r.values);
}

TEST(Repair, PropertyOnRandomRows) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  QuantileForecast f{Matrix(200, 5), QuantileLevels()};
  for (auto& v : f.values.reshaped()) v = n(rng);
  const auto r = repair_monotonic(f);
  EXPECT_TRUE(is_monotone(r));
  EXPECT_EQ(crossing_rate(r), 0.0);
  EXPECT_EQ(repair_monotonic(r).values, r.values);
  for (Eigen::Index i = 0; i < f.values.rows(); ++i) {
    std::vector<double> a(f.values.row(i).begin(), f.values.row(i).end());
    std::vector<double> b(r.values.row(i).begin(), r.values.row(i).end());
    std::sort(a.begin(), a.end());
    EXPECT_EQ(a, b);
  }
}

TEST(Intervals, PickLevels) {
  auto f = rows({{1, 2, 3, 4, 5}});
  auto pi = predict_intervals(f, 0.1);
  EXPECT_EQ(pi[0].lower, 1.0);
  EXPECT_EQ(pi[0].upper, 5.0);
  pi = predict_intervals(f, 0.2);
  EXPECT_EQ(pi[0].lower, 2.0);
  EXPECT_EQ(pi[0].upper, 4.0);
  EXPECT_FQ_ERROR(predict_intervals(f, 0.5), ErrorCode::kMissingLevel);
}

TEST(Picp, Examples) {
  const std::vector<double> y{1, 2, 3};
  EXPECT_DOUBLE_EQ(picp(y, intervals({{0, 2}, {0, 1}, {2, 4}})), 2.0 / 3.0);
  EXPECT_EQ(picp(y, intervals({{0, 4}, {0, 4}, {0, 4}})), 1.0);
  const std::vector<double> one{2};
  EXPECT_EQ(picp(one, intervals({{0, 2}})), 1.0);
  EXPECT_FQ_ERROR(picp(y, intervals({{0, 1}})), ErrorCode::kLengthMismatch);
  EXPECT_FQ_ERROR(picp({}, {}), ErrorCode::kEmptyInput);
}

TEST(Pinaw, Examples) {
  const std::vector<double> y{1, 2, 3};
  EXPECT_DOUBLE_EQ(pinaw(y, intervals({{0, 2}, {0, 1}, {2, 4}})), 5.0 / 6.0);
  EXPECT_EQ(pinaw(y, intervals({{1, 1}, {2, 2}, {3, 3}})), 0.0);
  const std::vector<double> flat{2, 2, 2};
  EXPECT_FQ_ERROR(pinaw(flat, intervals({{0, 2}, {0, 1}, {2, 4}})), ErrorCode::kZeroRange);
}

TEST(Pinaw, ShiftInvariant) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> y(50);
  std::vector<PredictionInterval> pi(50);
  for (std::size_t i = 0; i < 50; ++i) {
    y[i] = u(rng);
    pi[i] = {y[i] - u(rng), y[i] + u(rng), 0.1};
  }
  const double base = pinaw(y, pi);
  for (std::size_t i = 0; i < 50; ++i) {
    y[i] += 0.25;
    pi[i].lower += 0.25;
    pi[i].upper += 0.25;
  }
  EXPECT_NEAR(pinaw(y, pi), base, 1e-12);
}

TEST(Cwc, SpotValues) {
  MetricConfig printed{0.1, 30.0, CwcVariant::kAsPrinted};
  EXPECT_NEAR(cwc(0.81, 0.2, printed), 0.8, 1e-12);
  EXPECT_NEAR(cwc(0.91, 0.2, printed), 0.8 * std::exp(-3.0), 1e-12);
  EXPECT_NEAR(cwc(0.91, 0.2, printed), 0.03983, 1e-5);
  MetricConfig squared{0.1, 30.0, CwcVariant::kSquaredDeviation};
  EXPECT_NEAR(cwc(0.9, 0.2, squared), 0.8, 1e-12);
}

TEST(Cwc, MonotoneInBothArguments) {
  MetricConfig c;
  double prev = std::numeric_limits<double>::infinity();
  for (double p = 0.5; p <= 1.0; p += 0.05) {
    const double v = cwc(p, 0.3, c);
    EXPECT_LT(v, prev);
    prev = v;
  }
  prev = std::numeric_limits<double>::infinity();
  for (double w = 0.0; w <= 0.9; w += 0.1) {
    const double v = cwc(0.9, w, c);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(CrossingRate, Examples) {
  EXPECT_EQ(crossing_rate(rows({{1, 2, 3, 4, 5}})), 0.0);
  EXPECT_DOUBLE_EQ(crossing_rate(rows({{1, 2, 3, 4, 5}, {1, 3, 2, 4, 5}, {0, 0, 1, 1, 2}})), 1.0 / 3.0);
  EXPECT_EQ(crossing_rate(rows({{2, 2, 2, 2, 2}})), 0.0);
  EXPECT_FQ_ERROR(crossing_rate(QuantileForecast{Matrix(0, 5), QuantileLevels()}), ErrorCode::kEmptyInput);
}

TEST(Evaluate, DegenerateForecastCoversEverything) {
  const std::vector<double> y{1, 4, 2, 8};
  QuantileForecast f{Matrix(4, 5), QuantileLevels()};
  for (int i = 0; i < 4; ++i) f.values.row(i).setConstant(y[static_cast<std::size_t>(i)]);
  const auto r = evaluate(y, f);
  EXPECT_EQ(r.picp, 1.0);
  EXPECT_EQ(r.pinaw, 0.0);
  EXPECT_EQ(r.n, 4u);
  EXPECT_EQ(r.delta_y, 7.0);
  EXPECT_EQ(r.mean_pinball_all, 0.0);
  EXPECT_NE(to_key_value(r).find("cwc_variant = as-printed"), std::string::npos);
}

TEST(Evaluate, RequiresIntervalLevels) {
  QuantileForecast f{Matrix::Zero(2, 3), QuantileLevels({0.25, 0.5, 0.75})};
  const std::vector<double> y{0, 1};
  EXPECT_FQ_ERROR(evaluate(y, f), ErrorCode::kMissingLevel);
}
