#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "futurequant/params.hpp"
#include "futurequant/quantile.hpp"
#include "futurequant/tensor.hpp"

namespace fq {

enum class Mode { kTrain, kEval };
enum class LossKind { kPinball, kSquared };

using Rng = std::mt19937_64;
using SpecEntries = std::vector<std::pair<std::string, std::string>>;

// A model mapping (window_in x features) windows to one value per quantile
// level. Outputs are in normalized target units.
class QuantileModel {
 public:
  virtual ~QuantileModel() = default;

  virtual std::string_view kind() const noexcept = 0;
  virtual std::size_t window_in() const noexcept = 0;
  virtual std::size_t num_features() const noexcept = 0;
  virtual const QuantileLevels& levels() const noexcept = 0;
  virtual SpecEntries spec_entries() const = 0;
  virtual std::unique_ptr<QuantileModel> clone() const = 0;

  // Glorot-uniform weight matrices, zero biases, unit layer-norm gains.
  virtual void initialize(std::uint64_t seed) = 0;

  ParameterSet& params() noexcept { return params_; }
  const ParameterSet& params() const noexcept { return params_; }

  // (N x Q). In train mode `rng` drives dropout; `relu_pattern`, when given,
  // receives every ReLU on/off bit in evaluation order.
  Matrix forward(const Tensor3& x, Mode mode = Mode::kEval, Rng* rng = nullptr,
                 std::vector<std::uint8_t>* relu_pattern = nullptr) const;

  // Mean loss over samples and levels. `grad` (same layout as params) is
  // overwritten with the gradient.
  double loss_and_gradient(const Tensor3& x, std::span<const double> targets, LossKind loss,
                           Mode mode, Rng* rng, ParameterSet& grad) const;

  double loss(const Tensor3& x, std::span<const double> targets, LossKind loss = LossKind::kPinball,
              Mode mode = Mode::kEval, Rng* rng = nullptr) const;

 protected:
  using OutputGradient = std::function<RowVector(const RowVector&)>;

  virtual RowVector forward_sample(const Matrix& x, Mode mode, Rng* rng,
                                   std::vector<std::uint8_t>* relu_pattern) const = 0;
  // Runs the forward pass, asks `output_gradient` for d loss / d output and
  // accumulates parameter gradients into `grad`.
  virtual void backward_sample(const Matrix& x, Mode mode, Rng* rng,
                               const OutputGradient& output_gradient, ParameterSet& grad) const = 0;

  void check_input(const Tensor3& x) const;

  ParameterSet params_;
};

// Uniform in +-sqrt(6 / (fan_in + fan_out)); fan_in = rows, fan_out = cols.
void glorot_uniform(MatrixMap weights, Rng& rng, std::size_t fan_in, std::size_t fan_out);

}  // namespace fq
