#pragma once

#include <cstddef>
#include <vector>

#include "futurequant/tensor.hpp"

// Forward and backward passes of the encoder building blocks. Activations
// are (time steps x channels) matrices; backward functions accumulate
// parameter gradients into the supplied references and return the gradient
// with respect to the layer input.
namespace fq::layers {

using ConstRef = Eigen::Ref<const Matrix>;
using Ref = Eigen::Ref<Matrix>;

inline constexpr double kLayerNormEpsilon = 1e-5;

struct LayerNormCache {
  Matrix xhat;
  Vector inv_std;
};

// Normalizes each row over its features, then applies gain and shift.
Matrix layer_norm(const Matrix& x, const ConstRef& gamma, const ConstRef& shift,
                  double epsilon = kLayerNormEpsilon, LayerNormCache* cache = nullptr);
RowVector layer_norm(const RowVector& x, const RowVector& gamma, const RowVector& shift,
                     double epsilon = kLayerNormEpsilon);
Matrix layer_norm_backward(const Matrix& dy, const ConstRef& gamma, const LayerNormCache& cache,
                           Ref dgamma, Ref dshift);

// Numerically stable row-wise softmax.
Matrix softmax_rows(const Matrix& logits);

struct AttentionParams {
  ConstRef wq, bq, wk, bk, wv, bv, wo, bo;
};
struct AttentionGrads {
  Ref wq, bq, wk, bk, wv, bv, wo, bo;
};
struct AttentionCache {
  Matrix input, q, k, v, concat;
  std::vector<Matrix> weights;  // one (T x T) row-stochastic matrix per head
};

// Scaled dot-product attention per head on column slices of width d/num_heads,
// heads concatenated and projected by wo.
Matrix multi_head_attention(const Matrix& x, const AttentionParams& p, std::size_t num_heads,
                            AttentionCache* cache = nullptr);
Matrix multi_head_attention_backward(const Matrix& dout, const AttentionParams& p,
                                     std::size_t num_heads, const AttentionCache& cache,
                                     AttentionGrads& g);

struct ConvCache {
  Matrix columns;  // (T x width*d_in) unrolled same-padded windows
  Matrix pre;      // pre-activation output
};

// Same-padded 1-D convolution along time. kernel is (width*d_in x d_out),
// rows ordered by tap then input channel.
Matrix conv1d_same(const Matrix& x, const ConstRef& kernel, const ConstRef& bias,
                   ConvCache* cache = nullptr);
Matrix conv1d_same_backward(const Matrix& dpre, const ConstRef& kernel, const ConvCache& cache,
                            std::size_t input_channels, Ref dkernel, Ref dbias);

// ReLU(conv1d_same(x)).
Matrix conv_feedforward(const Matrix& x, const ConstRef& kernel, const ConstRef& bias,
                        ConvCache* cache = nullptr);

inline Matrix relu(const Matrix& x) { return x.cwiseMax(0.0); }
inline Matrix relu_backward(const Matrix& dy, const Matrix& pre) {
  return (pre.array() > 0.0).select(dy, 0.0);
}

RowVector global_average_pool(const Matrix& x);

}  // namespace fq::layers
