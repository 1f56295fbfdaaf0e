#include "futurequant/futurequant.hpp"

#include <string>

#include "futurequant/error.hpp"
#include "futurequant/io.hpp"

namespace fq {
namespace {

std::string join_sizes(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

std::string join_levels(const QuantileLevels& levels) {
  std::string out;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (i) out += ',';
    out += format_double(levels[i]);
  }
  return out;
}

void append_pattern(std::vector<std::uint8_t>* pattern, const Matrix& pre) {
  if (!pattern) return;
  for (Eigen::Index i = 0; i < pre.size(); ++i) pattern->push_back(pre.data()[i] > 0.0 ? 1 : 0);
}

}  // namespace

void ModelSpec::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::kInvalidSpec, what); };
  if (window_in < 1 || num_features < 1) bad("window_in and num_features must be >= 1");
  if (num_blocks < 1) bad("num_blocks must be >= 1");
  if (num_heads < 1 || key_dim < 1) bad("num_heads and key_dim must be >= 1");
  if (conv_channels < 1 || conv_kernel < 1) bad("conv dims must be >= 1");
  if (conv_kernel > window_in) bad("conv_kernel wider than window_in");
  if (dense_units.empty()) bad("dense_units must be non-empty");
  for (auto u : dense_units) {
    if (u < 1) bad("dense units must be >= 1");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) bad("dropout_rate must lie in [0,1)");
}

Matrix encoder_block(const Matrix& x, const EncoderBlockParams& p, std::size_t num_heads,
                     double dropout_rate, Mode mode, Rng* rng, EncoderBlockCache* cache) {
  EncoderBlockCache local;
  EncoderBlockCache& c = cache ? *cache : local;

  const Matrix a = layers::layer_norm(x, p.ln1_gamma, p.ln1_shift, layers::kLayerNormEpsilon, &c.ln1);
  Matrix attn = layers::multi_head_attention(a, p.attention, num_heads, &c.attention);
  c.dropout_mask.resize(0, 0);
  if (mode == Mode::kTrain && dropout_rate > 0.0) {
    if (!rng) throw Error(ErrorCode::kInvalidArgument, "dropout needs a random source");
    std::bernoulli_distribution keep(1.0 - dropout_rate);
    const double scale = 1.0 / (1.0 - dropout_rate);
    c.dropout_mask.resize(attn.rows(), attn.cols());
    for (Eigen::Index i = 0; i < attn.size(); ++i) {
      c.dropout_mask.data()[i] = keep(*rng) ? scale : 0.0;
    }
    attn = attn.cwiseProduct(c.dropout_mask);
  }
  const Matrix y1 = x + attn;
  const Matrix b = layers::layer_norm(y1, p.ln2_gamma, p.ln2_shift, layers::kLayerNormEpsilon, &c.ln2);
  const Matrix hidden = layers::conv_feedforward(b, p.conv_kernel, p.conv_bias, &c.conv);
  const Matrix out = layers::conv1d_same(hidden, p.proj_kernel, p.proj_bias, &c.proj);
  return y1 + out;
}

FutureQuantModel::FutureQuantModel(ModelSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const std::size_t d = spec_.model_dim();
  input_w_ = params_.add("input.w", spec_.num_features, d);
  input_b_ = params_.add("input.b", 1, d);
  for (std::size_t b = 0; b < spec_.num_blocks; ++b) {
    const std::string pre = "block" + std::to_string(b) + ".";
    BlockSlots s{};
    s.ln1_gamma = params_.add(pre + "ln1.gamma", 1, d);
    s.ln1_shift = params_.add(pre + "ln1.shift", 1, d);
    s.wq = params_.add(pre + "attn.wq", d, d);
    s.bq = params_.add(pre + "attn.bq", 1, d);
    s.wk = params_.add(pre + "attn.wk", d, d);
    s.bk = params_.add(pre + "attn.bk", 1, d);
    s.wv = params_.add(pre + "attn.wv", d, d);
    s.bv = params_.add(pre + "attn.bv", 1, d);
    s.wo = params_.add(pre + "attn.wo", d, d);
    s.bo = params_.add(pre + "attn.bo", 1, d);
    s.ln2_gamma = params_.add(pre + "ln2.gamma", 1, d);
    s.ln2_shift = params_.add(pre + "ln2.shift", 1, d);
    s.conv_kernel = params_.add(pre + "conv.kernel", spec_.conv_kernel * d, spec_.conv_channels);
    s.conv_bias = params_.add(pre + "conv.bias", 1, spec_.conv_channels);
    s.proj_kernel = params_.add(pre + "proj.kernel", spec_.conv_channels, d);
    s.proj_bias = params_.add(pre + "proj.bias", 1, d);
    blocks_.push_back(s);
  }
  std::size_t width = d;
  for (std::size_t i = 0; i < spec_.dense_units.size(); ++i) {
    const std::string pre = "dense" + std::to_string(i) + ".";
    dense_.push_back({params_.add(pre + "w", width, spec_.dense_units[i]),
                      params_.add(pre + "b", 1, spec_.dense_units[i])});
    width = spec_.dense_units[i];
  }
  output_ = {params_.add("output.w", width, spec_.levels.size()),
             params_.add("output.b", 1, spec_.levels.size())};
}

SpecEntries FutureQuantModel::spec_entries() const {
  return {
      {"kind", std::string(kind())},
      {"window_in", std::to_string(spec_.window_in)},
      {"num_features", std::to_string(spec_.num_features)},
      {"num_blocks", std::to_string(spec_.num_blocks)},
      {"num_heads", std::to_string(spec_.num_heads)},
      {"key_dim", std::to_string(spec_.key_dim)},
      {"conv_channels", std::to_string(spec_.conv_channels)},
      {"conv_kernel", std::to_string(spec_.conv_kernel)},
      {"dense_units", join_sizes(spec_.dense_units)},
      {"dropout_rate", format_double(spec_.dropout_rate)},
      {"levels", join_levels(spec_.levels)},
  };
}

std::unique_ptr<QuantileModel> FutureQuantModel::clone() const {
  return std::make_unique<FutureQuantModel>(*this);
}

void FutureQuantModel::initialize(std::uint64_t seed) {
  Rng rng(seed);
  params_.set_zero();
  auto glorot = [&](std::size_t slot) {
    const auto& s = params_.layout()[slot];
    glorot_uniform(params_.matrix(slot), rng, s.rows, s.cols);
  };
  glorot(input_w_);
  for (const auto& b : blocks_) {
    params_.matrix(b.ln1_gamma).setOnes();
    params_.matrix(b.ln2_gamma).setOnes();
    for (std::size_t slot : {b.wq, b.wk, b.wv, b.wo, b.conv_kernel, b.proj_kernel}) glorot(slot);
  }
  for (const auto& dl : dense_) glorot(dl.w);
  glorot(output_.w);
}

EncoderBlockParams FutureQuantModel::block_params(std::size_t block) const {
  const auto& s = blocks_.at(block);
  const auto m = [&](std::size_t slot) { return params_.matrix(slot); };
  return EncoderBlockParams{
      m(s.ln1_gamma),
      m(s.ln1_shift),
      layers::AttentionParams{m(s.wq), m(s.bq), m(s.wk), m(s.bk), m(s.wv), m(s.bv), m(s.wo), m(s.bo)},
      m(s.ln2_gamma),
      m(s.ln2_shift),
      m(s.conv_kernel),
      m(s.conv_bias),
      m(s.proj_kernel),
      m(s.proj_bias),
  };
}

struct FutureQuantModel::Trace {
  std::vector<Matrix> block_inputs;
  std::vector<EncoderBlockCache> blocks;
  Matrix encoded;
  std::vector<RowVector> dense_inputs;  // input of each dense layer, then of the output layer
  std::vector<RowVector> dense_pre;
  RowVector output;
};

void FutureQuantModel::forward_trace(const Matrix& x, Mode mode, Rng* rng, Trace& trace,
                                     std::vector<std::uint8_t>* relu_pattern) const {
  Matrix h = x * params_.matrix(input_w_);
  h.rowwise() += params_.matrix(input_b_).row(0);

  trace.block_inputs.clear();
  trace.blocks.assign(blocks_.size(), {});
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    trace.block_inputs.push_back(h);
    h = encoder_block(h, block_params(b), spec_.num_heads, spec_.dropout_rate, mode, rng,
                      &trace.blocks[b]);
    append_pattern(relu_pattern, trace.blocks[b].conv.pre);
  }
  trace.encoded = h;

  RowVector z = layers::global_average_pool(h);
  trace.dense_inputs.clear();
  trace.dense_pre.clear();
  for (const auto& dl : dense_) {
    trace.dense_inputs.push_back(z);
    RowVector pre = z * params_.matrix(dl.w) + params_.matrix(dl.b).row(0);
    if (relu_pattern) append_pattern(relu_pattern, Matrix(pre));
    z = pre.cwiseMax(0.0);
    trace.dense_pre.push_back(std::move(pre));
  }
  trace.dense_inputs.push_back(z);
  trace.output = z * params_.matrix(output_.w) + params_.matrix(output_.b).row(0);
}

RowVector FutureQuantModel::forward_sample(const Matrix& x, Mode mode, Rng* rng,
                                           std::vector<std::uint8_t>* relu_pattern) const {
  Trace trace;
  forward_trace(x, mode, rng, trace, relu_pattern);
  return trace.output;
}

void FutureQuantModel::backward_sample(const Matrix& x, Mode mode, Rng* rng,
                                       const OutputGradient& output_gradient,
                                       ParameterSet& grad) const {
  Trace trace;
  forward_trace(x, mode, rng, trace, nullptr);
  const RowVector dout = output_gradient(trace.output);

  grad.matrix(output_.w).noalias() += trace.dense_inputs.back().transpose() * dout;
  grad.matrix(output_.b).row(0) += dout;
  RowVector dz = dout * params_.matrix(output_.w).transpose();
  for (std::size_t i = dense_.size(); i-- > 0;) {
    const auto& dl = dense_[i];
    const RowVector dpre = (trace.dense_pre[i].array() > 0.0).select(dz, 0.0);
    grad.matrix(dl.w).noalias() += trace.dense_inputs[i].transpose() * dpre;
    grad.matrix(dl.b).row(0) += dpre;
    dz = dpre * params_.matrix(dl.w).transpose();
  }

  // Pooling spreads the gradient evenly over time steps.
  const auto steps = trace.encoded.rows();
  Matrix dh = dz.replicate(steps, 1) / static_cast<double>(steps);

  const std::size_t d = spec_.model_dim();
  for (std::size_t b = blocks_.size(); b-- > 0;) {
    const auto& s = blocks_[b];
    const auto& c = trace.blocks[b];
    const EncoderBlockParams p = block_params(b);

    // Feed-forward branch: y2 = y1 + proj(relu(conv(ln2(y1)))).
    const Matrix dhidden = layers::conv1d_same_backward(
        dh, p.proj_kernel, c.proj, spec_.conv_channels, grad.matrix(s.proj_kernel),
        grad.matrix(s.proj_bias));
    const Matrix dconv_pre = layers::relu_backward(dhidden, c.conv.pre);
    const Matrix dln2 = layers::conv1d_same_backward(dconv_pre, p.conv_kernel, c.conv, d,
                                                     grad.matrix(s.conv_kernel),
                                                     grad.matrix(s.conv_bias));
    Matrix dy1 = dh + layers::layer_norm_backward(dln2, p.ln2_gamma, c.ln2,
                                                  grad.matrix(s.ln2_gamma), grad.matrix(s.ln2_shift));

    // Attention branch: y1 = x + dropout(mha(ln1(x))).
    Matrix dattn = dy1;
    if (c.dropout_mask.size() > 0) dattn = dattn.cwiseProduct(c.dropout_mask);
    layers::AttentionGrads g{grad.matrix(s.wq), grad.matrix(s.bq), grad.matrix(s.wk),
                                   grad.matrix(s.bk), grad.matrix(s.wv), grad.matrix(s.bv),
                                   grad.matrix(s.wo), grad.matrix(s.bo)};
    const Matrix dln1 =
        layers::multi_head_attention_backward(dattn, p.attention, spec_.num_heads, c.attention, g);
    dh = dy1 + layers::layer_norm_backward(dln1, p.ln1_gamma, c.ln1, grad.matrix(s.ln1_gamma),
                                           grad.matrix(s.ln1_shift));
  }

  grad.matrix(input_w_).noalias() += x.transpose() * dh;
  grad.matrix(input_b_).row(0) += dh.colwise().sum();
}

}  // namespace fq
