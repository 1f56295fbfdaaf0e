#pragma once

#include <cstddef>
#include <vector>

#include "futurequant/layers.hpp"
#include "futurequant/model.hpp"

namespace fq {

// Encoder-stack configuration. The residual stream width is
// num_heads * key_dim.
struct ModelSpec {
  std::size_t window_in = 5;
  std::size_t num_features = 1;
  std::size_t num_blocks = 4;
  std::size_t num_heads = 2;
  std::size_t key_dim = 8;
  std::size_t conv_channels = 16;
  std::size_t conv_kernel = 3;
  std::vector<std::size_t> dense_units{32, 16};
  double dropout_rate = 0.1;
  QuantileLevels levels;

  std::size_t model_dim() const noexcept { return num_heads * key_dim; }
  void validate() const;
};

struct EncoderBlockParams {
  layers::ConstRef ln1_gamma, ln1_shift;
  layers::AttentionParams attention;
  layers::ConstRef ln2_gamma, ln2_shift;
  layers::ConstRef conv_kernel, conv_bias;  // width conv_kernel, d -> conv_channels, ReLU
  layers::ConstRef proj_kernel, proj_bias;  // width 1, conv_channels -> d
};

struct EncoderBlockCache {
  layers::LayerNormCache ln1, ln2;
  layers::AttentionCache attention;
  Matrix dropout_mask;  // empty when dropout is inactive
  layers::ConvCache conv, proj;
};

// y1 = x + Dropout(MHA(LN(x)));  y2 = y1 + Proj(ReLU(Conv(LN(y1)))).
// Dropout is applied only in train mode with a positive rate.
Matrix encoder_block(const Matrix& x, const EncoderBlockParams& p, std::size_t num_heads,
                     double dropout_rate, Mode mode, Rng* rng, EncoderBlockCache* cache = nullptr);

// Per-step input projection -> encoder blocks -> global average pool ->
// dense ReLU layers -> linear head with one output per quantile level.
class FutureQuantModel final : public QuantileModel {
 public:
  explicit FutureQuantModel(ModelSpec spec);

  const ModelSpec& spec() const noexcept { return spec_; }
  EncoderBlockParams block_params(std::size_t block) const;

  std::string_view kind() const noexcept override { return "futurequant"; }
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
  struct BlockSlots {
    std::size_t ln1_gamma, ln1_shift, wq, bq, wk, bk, wv, bv, wo, bo;
    std::size_t ln2_gamma, ln2_shift, conv_kernel, conv_bias, proj_kernel, proj_bias;
  };
  struct DenseSlots {
    std::size_t w, b;
  };
  struct Trace;

  void forward_trace(const Matrix& x, Mode mode, Rng* rng, Trace& trace,
                     std::vector<std::uint8_t>* relu_pattern) const;

  ModelSpec spec_;
  std::size_t input_w_ = 0, input_b_ = 0;
  std::vector<BlockSlots> blocks_;
  std::vector<DenseSlots> dense_;
  DenseSlots output_{};
};

}  // namespace fq
