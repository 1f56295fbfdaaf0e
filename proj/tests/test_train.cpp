#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "futurequant/baselines.hpp"
#include "futurequant/futurequant.hpp"
#include "futurequant/train.hpp"
#include "test_util.hpp"

using namespace fq;

namespace {

// Brute-force pinball minimizer over the sample points.
double empirical_quantile(std::vector<double> y, double beta) {
  double best = y[0], best_loss = INFINITY;
  for (double c : y) {
    double loss = 0.0;
    for (double v : y) loss += pinball_loss(c, v, beta);
    if (loss < best_loss) {
      best_loss = loss;
      best = c;
    }
  }
  return best;
}

TrainConfig gd(double lr, std::size_t epochs, std::size_t batch) {
  TrainConfig c;
  c.optimizer = OptimizerKind::kGradientDescent;
  c.learning_rate = lr;
  c.epochs = epochs;
  c.batch_size = batch;
  return c;
}

QuantileLinearModel intercept(std::vector<double> levels) {
  return QuantileLinearModel(LinearSpec{1, 1, QuantileLevels(std::move(levels)), true});
}

}  // namespace

TEST(Train, InterceptRecoversNinetiethPercentile) {
  std::vector<double> y(100);
  for (int i = 0; i < 100; ++i) y[static_cast<std::size_t>(i)] = i + 1;
  auto m = intercept({0.9});
  m.initialize(0);
  Tensor3 x(100, 1, 1);
  train(m, x, y, gd(5.0, 400, 100));
  const double fitted = m.forward(Tensor3(1, 1, 1))(0, 0);
  EXPECT_NEAR(fitted, empirical_quantile(y, 0.9), 1.0);
}

TEST(Train, InterceptMedianOfThree) {
  const std::vector<double> y{1, 2, 9};
  auto m = intercept({0.5});
  m.initialize(0);
  train(m, Tensor3(3, 1, 1), y, gd(0.01, 2000, 3));
  EXPECT_NEAR(m.forward(Tensor3(1, 1, 1))(0, 0), 2.0, 0.05);
}

TEST(Train, ConstantTargetMedian) {
  ModelSpec s;
  s.num_blocks = 1;
  s.levels = QuantileLevels({0.5});
  s.dropout_rate = 0.0;
  FutureQuantModel m(s);
  m.initialize(1);
  Rng rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  Tensor3 x(64, 5, 1);
  for (auto& v : x.data()) v = u(rng);
  const std::vector<double> y(64, 0.7);
  TrainConfig c;
  c.epochs = 300;
  c.learning_rate = 3e-3;
  c.batch_size = 16;
  c.seed = 1;
  train(m, x, y, c);
  const Matrix out = m.forward(x);
  EXPECT_LT((out.array() - 0.7).abs().maxCoeff(), 1e-2);
}

TEST(Train, LinearRecoversSlope) {
  std::vector<double> y;
  Tensor3 x(50, 1, 1);
  for (std::size_t i = 0; i < 50; ++i) {
    x(i, 0, 0) = static_cast<double>(i) / 50.0;
    y.push_back(2.0 * x(i, 0, 0));
  }
  QuantileLinearModel m(LinearSpec{1, 1, QuantileLevels({0.3}), false});
  m.initialize(2);
  TrainConfig c;
  c.epochs = 600;
  c.learning_rate = 1e-2;
  c.batch_size = 50;
  train(m, x, y, c);
  EXPECT_NEAR(m.params().matrix("linear.w")(0, 0), 2.0, 0.01);
}

TEST(Train, DeterministicAndDecreasing) {
  Rng rng(3);
  std::normal_distribution<double> n;
  Tensor3 x(40, 5, 1);
  for (auto& v : x.data()) v = n(rng);
  std::vector<double> y(40);
  for (std::size_t i = 0; i < 40; ++i) y[i] = 0.5 * x(i, 4, 0) + 0.1 * n(rng);
  ModelSpec s;
  s.num_blocks = 2;
  TrainConfig c;
  c.epochs = 8;
  c.batch_size = 8;
  c.seed = 42;
  c.learning_rate = 3e-3;
  FutureQuantModel a(s), b(s);
  a.initialize(5);
  b.initialize(5);
  const auto ra = train(a, x, y, c);
  const auto rb = train(b, x, y, c);
  EXPECT_EQ(ra.loss_history, rb.loss_history);
  EXPECT_TRUE(a.params() == b.params());
  EXPECT_LE(ra.loss_history.back(), ra.initial_loss);
  EXPECT_EQ(ra.loss_history.size(), 8u);
}

TEST(Train, OptimizersAndClipAllReduceLoss) {
  Rng rng(4);
  std::normal_distribution<double> n;
  Tensor3 x(32, 30, 1);
  for (auto& v : x.data()) v = n(rng);
  std::vector<double> y(32);
  for (std::size_t i = 0; i < 32; ++i) y[i] = x(i, 29, 0);
  for (auto kind : {OptimizerKind::kGradientDescent, OptimizerKind::kMomentum, OptimizerKind::kAdam}) {
    QuantileMlpModel m(MlpSpec{});
    m.initialize(6);
    TrainConfig c;
    c.optimizer = kind;
    c.epochs = 20;
    c.learning_rate = kind == OptimizerKind::kAdam ? 1e-3 : 1e-2;
    c.gradient_clip = 1.0;
    const auto r = train(m, x, y, c);
    EXPECT_LT(r.loss_history.back(), r.initial_loss) << to_string(kind);
  }
}

TEST(Train, ZeroEpochsLeavesParameters) {
  QuantileLinearModel m(LinearSpec{});
  m.initialize(7);
  const ParameterSet before = m.params();
  TrainConfig c;
  c.epochs = 0;
  const auto r = train(m, Tensor3(4, 30, 1, 0.5), std::vector<double>{1, 2, 3, 4}, c);
  EXPECT_TRUE(m.params() == before);
  EXPECT_TRUE(r.loss_history.empty());
}

TEST(Train, DivergenceIsReported) {
  QuantileLinearModel m(LinearSpec{1, 1, QuantileLevels({0.5}), false});
  m.initialize(8);
  Tensor3 x(4, 1, 1, 1e200);
  TrainConfig c = gd(1e200, 5, 4);
  c.loss = LossKind::kSquared;
  EXPECT_FQ_ERROR(train(m, x, std::vector<double>{1, 2, 3, 4}, c), ErrorCode::kNonFiniteLoss);
}

TEST(Train, ConfigValidation) {
  TrainConfig c;
  c.learning_rate = 0.0;
  QuantileLinearModel m(LinearSpec{});
  EXPECT_FQ_ERROR(train(m, Tensor3(1, 30, 1), std::vector<double>{1}, c), ErrorCode::kInvalidArgument);
  EXPECT_EQ(parse_optimizer("momentum"), OptimizerKind::kMomentum);
  EXPECT_FQ_ERROR(parse_optimizer("rmsprop"), ErrorCode::kInvalidArgument);
}
