#include "futurequant/model.hpp"

#include <cmath>
#include <string>

#include "futurequant/error.hpp"

namespace fq {

void QuantileModel::check_input(const Tensor3& x) const {
  if (x.steps() != window_in() || x.features() != num_features()) {
    throw Error(ErrorCode::kShapeMismatch,
                "model expects windows of " + std::to_string(window_in()) + "x" +
                    std::to_string(num_features()) + ", got " + std::to_string(x.steps()) + "x" +
                    std::to_string(x.features()));
  }
}

Matrix QuantileModel::forward(const Tensor3& x, Mode mode, Rng* rng,
                              std::vector<std::uint8_t>* relu_pattern) const {
  check_input(x);
  if (mode == Mode::kTrain && rng == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "train-mode forward needs a random source");
  }
  Matrix out(static_cast<Eigen::Index>(x.samples()), static_cast<Eigen::Index>(levels().size()));
  for (std::size_t i = 0; i < x.samples(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = forward_sample(x.sample(i), mode, rng, relu_pattern);
  }
  return out;
}

double QuantileModel::loss_and_gradient(const Tensor3& x, std::span<const double> targets,
                                        LossKind loss, Mode mode, Rng* rng,
                                        ParameterSet& grad) const {
  check_input(x);
  if (targets.size() != x.samples()) {
    throw Error(ErrorCode::kLengthMismatch, "targets and inputs differ in sample count");
  }
  if (x.samples() == 0) throw Error(ErrorCode::kEmptyInput, "empty batch");
  if (mode == Mode::kTrain && rng == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "train-mode pass needs a random source");
  }
  if (!grad.same_layout(params_)) grad = params_.zeros_like();
  grad.set_zero();

  const auto& lv = levels().values();
  const double norm = 1.0 / (static_cast<double>(x.samples()) * static_cast<double>(lv.size()));
  double total = 0.0;
  for (std::size_t i = 0; i < x.samples(); ++i) {
    const double y = targets[i];
    auto output_gradient = [&](const RowVector& out) {
      RowVector d(out.size());
      for (Eigen::Index j = 0; j < out.size(); ++j) {
        const double q = out(j);
        if (loss == LossKind::kPinball) {
          total += pinball_loss(q, y, lv[static_cast<std::size_t>(j)]);
          d(j) = norm * pinball_gradient(q, y, lv[static_cast<std::size_t>(j)]);
        } else {
          total += (q - y) * (q - y);
          d(j) = norm * 2.0 * (q - y);
        }
      }
      return d;
    };
    backward_sample(x.sample(i), mode, rng, output_gradient, grad);
  }
  return total * norm;
}

double QuantileModel::loss(const Tensor3& x, std::span<const double> targets, LossKind loss,
                           Mode mode, Rng* rng) const {
  if (targets.size() != x.samples()) {
    throw Error(ErrorCode::kLengthMismatch, "targets and inputs differ in sample count");
  }
  if (x.samples() == 0) throw Error(ErrorCode::kEmptyInput, "empty batch");
  const Matrix out = forward(x, mode, rng);
  const auto& lv = levels().values();
  double total = 0.0;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      const double q = out(i, j);
      const double y = targets[static_cast<std::size_t>(i)];
      total += loss == LossKind::kPinball ? pinball_loss(q, y, lv[static_cast<std::size_t>(j)])
                                          : (q - y) * (q - y);
    }
  }
  return total / (static_cast<double>(out.rows()) * static_cast<double>(out.cols()));
}

void glorot_uniform(MatrixMap weights, Rng& rng, std::size_t fan_in, std::size_t fan_out) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (Eigen::Index r = 0; r < weights.rows(); ++r) {
    for (Eigen::Index c = 0; c < weights.cols(); ++c) weights(r, c) = dist(rng);
  }
}

}  // namespace fq
