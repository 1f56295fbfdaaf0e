#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "futurequant/market_data.hpp"
#include "futurequant/model.hpp"

namespace fq {

enum class OptimizerKind { kGradientDescent, kMomentum, kAdam };

std::string_view to_string(OptimizerKind kind) noexcept;
OptimizerKind parse_optimizer(std::string_view name);

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double momentum = 0.9;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  // Global L2 clip on each mini-batch gradient.
  std::optional<double> gradient_clip;
  LossKind loss = LossKind::kPinball;

  void validate() const;
};

struct TrainResult {
  double initial_loss = 0.0;
  // Eval-mode mean training loss after each epoch.
  std::vector<double> loss_history;
};

using EpochCallback = std::function<void(std::size_t epoch, double loss)>;

// Minimizes the mean loss over the first target column by mini-batch descent
// from the model's current parameters. Deterministic for a given seed.
TrainResult train(QuantileModel& model, const WindowedDataset& dataset, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

// Lower-level entry used by tests: explicit inputs and targets.
TrainResult train(QuantileModel& model, const Tensor3& inputs, std::span<const double> targets,
                  const TrainConfig& config, const EpochCallback& on_epoch = {});

// Quantile forecast in price units: model outputs mapped back through the
// dataset's target scaler. Rows are not repaired.
QuantileForecast predict(const QuantileModel& model, const WindowedDataset& dataset);

struct GradientCheckOptions {
  double step = 1e-5;
  std::size_t min_parameters = 200;
  std::uint64_t seed = 0;
  LossKind loss = LossKind::kPinball;
  // Outputs closer than this to a pinball kink disqualify a parameter.
  double kink_margin = 1e-7;
  // Denominator floor for the relative error of near-zero gradients.
  double denominator_floor = 1e-6;
};

struct GradientCheckReport {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped_kinks = 0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

// Central differences on a random subset of parameters, evaluated in eval
// mode. Parameters whose +-step perturbation changes any ReLU state or
// pinball branch are skipped. The model's parameters are restored exactly.
GradientCheckReport gradient_check(QuantileModel& model, const Tensor3& inputs,
                                   std::span<const double> targets,
                                   const GradientCheckOptions& options = {});

}  // namespace fq
