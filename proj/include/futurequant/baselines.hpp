#pragma once

#include <cstddef>
#include <vector>

#include "futurequant/model.hpp"

namespace fq {

struct LinearSpec {
  std::size_t window_in = 30;
  std::size_t num_features = 1;
  QuantileLevels levels;
  // Drops the weight matrix: every sample gets the same per-level constant.
  bool intercept_only = false;
};

// One affine map per quantile level over the flattened window.
class QuantileLinearModel final : public QuantileModel {
 public:
  explicit QuantileLinearModel(LinearSpec spec);

  const LinearSpec& spec() const noexcept { return spec_; }

  std::string_view kind() const noexcept override {
    return spec_.intercept_only ? "quantile-intercept" : "quantile-linear";
  }
  std::size_t window_in() const noexcept override { return spec_.window_in; }
  std::size_t num_features() const noexcept override { return spec_.num_features; }
  const QuantileLevels& levels() const noexcept override { return spec_.levels; }
  SpecEntries spec_entries() const override;
  std::unique_ptr<QuantileModel> clone() const override;
  void initialize(std::uint64_t seed) override;

 protected:
  RowVector forward_sample(const Matrix& x, Mode mode, Rng* rng,
                           std::vector<std::uint8_t>* relu_pattern) const override;
  void backward_sample(const Matrix& x, Mode mode, Rng* rng, const OutputGradient& output_gradient,
                       ParameterSet& grad) const override;

 private:
  LinearSpec spec_;
  std::size_t w_ = 0, b_ = 0;
};

struct MlpSpec {
  std::size_t window_in = 30;
  std::size_t num_features = 1;
  std::vector<std::size_t> hidden_units{32, 16};
  QuantileLevels levels;
};

// Flattened window -> ReLU hidden layers -> linear quantile head.
class QuantileMlpModel final : public QuantileModel {
 public:
  explicit QuantileMlpModel(MlpSpec spec);

  const MlpSpec& spec() const noexcept { return spec_; }

  std::string_view kind() const noexcept override { return "quantile-mlp"; }
  std::size_t window_in() const noexcept override { return spec_.window_in; }
  std::size_t num_features() const noexcept override { return spec_.num_features; }
  const QuantileLevels& levels() const noexcept override { return spec_.levels; }
  SpecEntries spec_entries() const override;
  std::unique_ptr<QuantileModel> clone() const override;
  void initialize(std::uint64_t seed) override;

 protected:
  RowVector forward_sample(const Matrix& x, Mode mode, Rng* rng,
                           std::vector<std::uint8_t>* relu_pattern) const override;
  void backward_sample(const Matrix& x, Mode mode, Rng* rng, const OutputGradient& output_gradient,
                       ParameterSet& grad) const override;

 private:
  MlpSpec spec_;
  std::vector<std::pair<std::size_t, std::size_t>> layers_;  // (w, b); last is the output head
};

}  // namespace fq
