#include "futurequant/layers.hpp"

#include <cmath>
#include <string>

#include "futurequant/error.hpp"

namespace fq::layers {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kDimensionMismatch, what);
}

Eigen::Index pad_left(Eigen::Index width) { return (width - 1) / 2; }

}  // namespace

Matrix layer_norm(const Matrix& x, const ConstRef& gamma, const ConstRef& shift, double epsilon,
                  LayerNormCache* cache) {
  require(gamma.rows() == 1 && shift.rows() == 1 && gamma.cols() == x.cols() &&
              shift.cols() == x.cols(),
          "layer_norm: width mismatch");
  const Eigen::Index d = x.cols();
  Matrix xhat(x.rows(), d);
  Vector inv_std(x.rows());
  for (Eigen::Index t = 0; t < x.rows(); ++t) {
    const double mean = x.row(t).mean();
    const double var = (x.row(t).array() - mean).square().mean();
    inv_std(t) = 1.0 / std::sqrt(var + epsilon);
    xhat.row(t) = (x.row(t).array() - mean) * inv_std(t);
  }
  Matrix y(x.rows(), d);
  for (Eigen::Index t = 0; t < x.rows(); ++t) {
    y.row(t) = xhat.row(t).cwiseProduct(gamma.row(0)) + shift.row(0);
  }
  if (cache) {
    cache->xhat = std::move(xhat);
    cache->inv_std = std::move(inv_std);
  }
  return y;
}

RowVector layer_norm(const RowVector& x, const RowVector& gamma, const RowVector& shift,
                     double epsilon) {
  const Matrix xm = x;
  const Matrix gm = gamma;
  const Matrix sm = shift;
  return layer_norm(xm, gm, sm, epsilon).row(0);
}

Matrix layer_norm_backward(const Matrix& dy, const ConstRef& gamma, const LayerNormCache& cache,
                           Ref dgamma, Ref dshift) {
  const Eigen::Index d = dy.cols();
  const RowVector g = gamma.row(0);
  Matrix dx(dy.rows(), d);
  for (Eigen::Index t = 0; t < dy.rows(); ++t) {
    const RowVector dxhat = dy.row(t).cwiseProduct(g);
    const double mean_dxhat = dxhat.mean();
    const double mean_dxhat_xhat = dxhat.cwiseProduct(cache.xhat.row(t)).mean();
    dx.row(t) = cache.inv_std(t) *
                (dxhat.array() - mean_dxhat - cache.xhat.row(t).array() * mean_dxhat_xhat).matrix();
    dgamma.row(0) += dy.row(t).cwiseProduct(cache.xhat.row(t));
    dshift.row(0) += dy.row(t);
  }
  return dx;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double m = logits.row(r).maxCoeff();
    out.row(r) = (logits.row(r).array() - m).exp().matrix();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

Matrix multi_head_attention(const Matrix& x, const AttentionParams& p, std::size_t num_heads,
                            AttentionCache* cache) {
  const Eigen::Index d = x.cols();
  require(num_heads > 0 && d % static_cast<Eigen::Index>(num_heads) == 0,
          "attention: width not divisible by head count");
  require(p.wq.rows() == d && p.wq.cols() == d && p.wk.rows() == d && p.wk.cols() == d &&
              p.wv.rows() == d && p.wv.cols() == d && p.wo.rows() == d && p.wo.cols() == d,
          "attention: projection shape mismatch");
  require(p.bq.rows() == 1 && p.bk.rows() == 1 && p.bv.rows() == 1 && p.bo.rows() == 1 &&
              p.bq.cols() == d && p.bk.cols() == d && p.bv.cols() == d && p.bo.cols() == d,
          "attention: bias shape mismatch");
  const auto heads = static_cast<Eigen::Index>(num_heads);
  const Eigen::Index dk = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));

  Matrix q = x * p.wq;
  Matrix k = x * p.wk;
  Matrix v = x * p.wv;
  q.rowwise() += p.bq.row(0);
  k.rowwise() += p.bk.row(0);
  v.rowwise() += p.bv.row(0);

  Matrix concat(x.rows(), d);
  std::vector<Matrix> weights;
  weights.reserve(num_heads);
  for (Eigen::Index h = 0; h < heads; ++h) {
    const auto qh = q.middleCols(h * dk, dk);
    const auto kh = k.middleCols(h * dk, dk);
    const auto vh = v.middleCols(h * dk, dk);
    Matrix w = softmax_rows((qh * kh.transpose()) * scale);
    concat.middleCols(h * dk, dk) = w * vh;
    weights.push_back(std::move(w));
  }
  Matrix out = concat * p.wo;
  out.rowwise() += p.bo.row(0);
  if (cache) {
    cache->input = x;
    cache->q = std::move(q);
    cache->k = std::move(k);
    cache->v = std::move(v);
    cache->concat = std::move(concat);
    cache->weights = std::move(weights);
  }
  return out;
}

Matrix multi_head_attention_backward(const Matrix& dout, const AttentionParams& p,
                                     std::size_t num_heads, const AttentionCache& cache,
                                     AttentionGrads& g) {
  const Eigen::Index d = dout.cols();
  const auto heads = static_cast<Eigen::Index>(num_heads);
  const Eigen::Index dk = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));

  g.wo.noalias() += cache.concat.transpose() * dout;
  g.bo.row(0) += dout.colwise().sum();
  const Matrix dconcat = dout * p.wo.transpose();

  Matrix dq(dout.rows(), d), dk_(dout.rows(), d), dv(dout.rows(), d);
  for (Eigen::Index h = 0; h < heads; ++h) {
    const Matrix& w = cache.weights[static_cast<std::size_t>(h)];
    const auto qh = cache.q.middleCols(h * dk, dk);
    const auto kh = cache.k.middleCols(h * dk, dk);
    const auto vh = cache.v.middleCols(h * dk, dk);
    const auto dov = dconcat.middleCols(h * dk, dk);
    const Matrix dw = dov * vh.transpose();
    dv.middleCols(h * dk, dk) = w.transpose() * dov;
    Matrix ds = w.cwiseProduct(dw);
    const Vector row_dot = ds.rowwise().sum();
    ds -= w.cwiseProduct(row_dot.replicate(1, w.cols()));
    ds *= scale;
    dq.middleCols(h * dk, dk) = ds * kh;
    dk_.middleCols(h * dk, dk) = ds.transpose() * qh;
  }
  g.wq.noalias() += cache.input.transpose() * dq;
  g.wk.noalias() += cache.input.transpose() * dk_;
  g.wv.noalias() += cache.input.transpose() * dv;
  g.bq.row(0) += dq.colwise().sum();
  g.bk.row(0) += dk_.colwise().sum();
  g.bv.row(0) += dv.colwise().sum();
  return dq * p.wq.transpose() + dk_ * p.wk.transpose() + dv * p.wv.transpose();
}

Matrix conv1d_same(const Matrix& x, const ConstRef& kernel, const ConstRef& bias,
                   ConvCache* cache) {
  const Eigen::Index t_len = x.rows();
  const Eigen::Index d_in = x.cols();
  require(d_in > 0 && kernel.rows() % d_in == 0, "conv1d: kernel rows not a multiple of input width");
  const Eigen::Index width = kernel.rows() / d_in;
  require(width >= 1 && width <= t_len, "conv1d: kernel wider than sequence");
  require(bias.rows() == 1 && bias.cols() == kernel.cols(), "conv1d: bias width mismatch");

  const Eigen::Index left = pad_left(width);
  Matrix columns = Matrix::Zero(t_len, width * d_in);
  for (Eigen::Index t = 0; t < t_len; ++t) {
    for (Eigen::Index j = 0; j < width; ++j) {
      const Eigen::Index src = t + j - left;
      if (src >= 0 && src < t_len) columns.block(t, j * d_in, 1, d_in) = x.row(src);
    }
  }
  Matrix pre = columns * kernel;
  pre.rowwise() += bias.row(0);
  if (cache) {
    cache->columns = std::move(columns);
    cache->pre = pre;
  }
  return pre;
}

Matrix conv1d_same_backward(const Matrix& dpre, const ConstRef& kernel, const ConvCache& cache,
                            std::size_t input_channels, Ref dkernel, Ref dbias) {
  const auto d_in = static_cast<Eigen::Index>(input_channels);
  const Eigen::Index t_len = dpre.rows();
  const Eigen::Index width = kernel.rows() / d_in;
  const Eigen::Index left = pad_left(width);
  dkernel.noalias() += cache.columns.transpose() * dpre;
  dbias.row(0) += dpre.colwise().sum();
  const Matrix dcols = dpre * kernel.transpose();
  Matrix dx = Matrix::Zero(t_len, d_in);
  for (Eigen::Index t = 0; t < t_len; ++t) {
    for (Eigen::Index j = 0; j < width; ++j) {
      const Eigen::Index src = t + j - left;
      if (src >= 0 && src < t_len) dx.row(src) += dcols.block(t, j * d_in, 1, d_in);
    }
  }
  return dx;
}

Matrix conv_feedforward(const Matrix& x, const ConstRef& kernel, const ConstRef& bias,
                        ConvCache* cache) {
  return relu(conv1d_same(x, kernel, bias, cache));
}

RowVector global_average_pool(const Matrix& x) {
  if (x.rows() == 0) throw Error(ErrorCode::kDimensionMismatch, "pooling over zero time steps");
  return x.colwise().mean();
}

}  // namespace fq::layers
