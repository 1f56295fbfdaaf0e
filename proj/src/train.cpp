#include "futurequant/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "futurequant/error.hpp"
#include "futurequant/io.hpp"

namespace fq {

std::string_view to_string(OptimizerKind kind) noexcept {
  switch (kind) {
    case OptimizerKind::kGradientDescent: return "sgd";
    case OptimizerKind::kMomentum: return "momentum";
    case OptimizerKind::kAdam: return "adam";
  }
  return "?";
}

OptimizerKind parse_optimizer(std::string_view name) {
  for (auto k : {OptimizerKind::kGradientDescent, OptimizerKind::kMomentum, OptimizerKind::kAdam}) {
    if (to_string(k) == trim(name)) return k;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown optimizer '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCode::kInvalidArgument, "learning_rate must be positive");
  }
  if (batch_size < 1) throw Error(ErrorCode::kInvalidArgument, "batch_size must be >= 1");
  if (gradient_clip && !(*gradient_clip > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "gradient_clip must be positive");
  }
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0) ||
      !(momentum >= 0.0 && momentum < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "optimizer decay rates must lie in [0,1)");
  }
}

namespace {

class Optimizer {
 public:
  Optimizer(const TrainConfig& config, std::size_t size)
      : config_(config), first_(size, 0.0), second_(size, 0.0) {}

  void step(std::span<double> params, std::span<const double> grad) {
    ++t_;
    const double lr = config_.learning_rate;
    switch (config_.optimizer) {
      case OptimizerKind::kGradientDescent:
        for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grad[i];
        break;
      case OptimizerKind::kMomentum:
        for (std::size_t i = 0; i < params.size(); ++i) {
          first_[i] = config_.momentum * first_[i] + grad[i];
          params[i] -= lr * first_[i];
        }
        break;
      case OptimizerKind::kAdam: {
        const double b1 = config_.adam_beta1;
        const double b2 = config_.adam_beta2;
        const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
        for (std::size_t i = 0; i < params.size(); ++i) {
          first_[i] = b1 * first_[i] + (1.0 - b1) * grad[i];
          second_[i] = b2 * second_[i] + (1.0 - b2) * grad[i] * grad[i];
          params[i] -= lr * (first_[i] / c1) / (std::sqrt(second_[i] / c2) + config_.adam_epsilon);
        }
        break;
      }
    }
  }

 private:
  const TrainConfig& config_;
  std::vector<double> first_;
  std::vector<double> second_;
  std::uint64_t t_ = 0;
};

void clip(std::span<double> grad, double max_norm) {
  double sq = 0.0;
  for (double g : grad) sq += g * g;
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double s = max_norm / norm;
    for (double& g : grad) g *= s;
  }
}

}  // namespace

TrainResult train(QuantileModel& model, const Tensor3& inputs, std::span<const double> targets,
                  const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (inputs.samples() == 0) throw Error(ErrorCode::kEmptyInput, "training set is empty");
  if (targets.size() != inputs.samples()) {
    throw Error(ErrorCode::kLengthMismatch, "targets and inputs differ in sample count");
  }

  TrainResult result;
  result.initial_loss = model.loss(inputs, targets, config.loss);

  Rng rng(config.seed ^ 0x9E3779B97F4A7C15ULL);
  std::vector<std::size_t> order(inputs.samples());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Optimizer optimizer(config, model.params().size());
  ParameterSet grad = model.params().zeros_like();
  std::vector<double> batch_targets;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const std::span<const std::size_t> idx(order.data() + start, end - start);
      const Tensor3 batch = inputs.gather(idx);
      batch_targets.clear();
      for (std::size_t i : idx) batch_targets.push_back(targets[i]);

      const double loss =
          model.loss_and_gradient(batch, batch_targets, config.loss, Mode::kTrain, &rng, grad);
      if (!std::isfinite(loss)) {
        throw Error(ErrorCode::kNonFiniteLoss, "loss became " + format_double(loss) + " at epoch " +
                                                   std::to_string(epoch) + ", batch offset " +
                                                   std::to_string(start));
      }
      if (config.gradient_clip) clip(grad.values(), *config.gradient_clip);
      optimizer.step(model.params().values(), grad.values());
    }
    const double epoch_loss = model.loss(inputs, targets, config.loss);
    if (!std::isfinite(epoch_loss) || !model.params().all_finite()) {
      throw Error(ErrorCode::kNonFiniteLoss,
                  "training diverged at epoch " + std::to_string(epoch) + " (loss " +
                      format_double(epoch_loss) + ")");
    }
    result.loss_history.push_back(epoch_loss);
    if (on_epoch) on_epoch(epoch, epoch_loss);
  }
  return result;
}

TrainResult train(QuantileModel& model, const WindowedDataset& dataset, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  const Vector y = dataset.first_target();
  return train(model, dataset.inputs, std::span<const double>(y.data(), static_cast<std::size_t>(y.size())),
               config, on_epoch);
}

QuantileForecast predict(const QuantileModel& model, const WindowedDataset& dataset) {
  QuantileForecast f{model.forward(dataset.inputs), model.levels()};
  if (dataset.normalized()) {
    f.values = f.values.unaryExpr([&](double z) { return dataset.target_norm.invert(z, 0); });
  }
  return f;
}

GradientCheckReport gradient_check(QuantileModel& model, const Tensor3& inputs,
                                   std::span<const double> targets,
                                   const GradientCheckOptions& options) {
  ParameterSet grad = model.params().zeros_like();
  model.loss_and_gradient(inputs, targets, options.loss, Mode::kEval, nullptr, grad);

  auto signature = [&](std::vector<std::uint8_t>& pattern) {
    pattern.clear();
    const Matrix out = model.forward(inputs, Mode::kEval, nullptr, &pattern);
    bool near_kink = false;
    if (options.loss == LossKind::kPinball) {
      for (Eigen::Index i = 0; i < out.rows(); ++i) {
        for (Eigen::Index j = 0; j < out.cols(); ++j) {
          const double r = out(i, j) - targets[static_cast<std::size_t>(i)];
          pattern.push_back(r >= 0.0 ? 1 : 0);
          if (std::abs(r) < options.kink_margin) near_kink = true;
        }
      }
    }
    return near_kink;
  };

  auto values = model.params().values();
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(options.seed);
  std::shuffle(order.begin(), order.end(), rng);

  GradientCheckReport report;
  std::vector<std::uint8_t> base, plus, minus;
  const bool base_near = signature(base);

  for (std::size_t idx : order) {
    if (report.checked >= options.min_parameters) break;
    const double original = values[idx];
    values[idx] = original + options.step;
    const bool plus_near = signature(plus);
    const double f_plus = model.loss(inputs, targets, options.loss);
    values[idx] = original - options.step;
    const bool minus_near = signature(minus);
    const double f_minus = model.loss(inputs, targets, options.loss);
    values[idx] = original;

    if (base_near || plus_near || minus_near || plus != base || minus != base) {
      ++report.skipped_kinks;
      continue;
    }
    const double numeric = (f_plus - f_minus) / (2.0 * options.step);
    const double analytic = grad.values()[idx];
    const double denom =
        std::max({std::abs(numeric), std::abs(analytic), options.denominator_floor});
    const double rel = std::abs(numeric - analytic) / denom;
    ++report.checked;
    if (rel >= report.max_relative_error) {
      report.max_relative_error = rel;
      report.worst_index = idx;
      report.worst_analytic = analytic;
      report.worst_numeric = numeric;
    }
  }
  return report;
}

}  // namespace fq
