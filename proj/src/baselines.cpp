#include "futurequant/baselines.hpp"

#include <string>

#include "futurequant/error.hpp"
#include "futurequant/io.hpp"

namespace fq {
namespace {

RowVector flatten(const Matrix& x) { return x.reshaped<Eigen::RowMajor>().transpose(); }

std::string join_levels(const QuantileLevels& levels) {
  std::string out;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (i) out += ',';
    out += format_double(levels[i]);
  }
  return out;
}

}  // namespace

QuantileLinearModel::QuantileLinearModel(LinearSpec spec) : spec_(std::move(spec)) {
  if (spec_.window_in < 1 || spec_.num_features < 1) {
    throw Error(ErrorCode::kInvalidSpec, "window_in and num_features must be >= 1");
  }
  if (!spec_.intercept_only) {
    w_ = params_.add("linear.w", spec_.window_in * spec_.num_features, spec_.levels.size());
  }
  b_ = params_.add("linear.b", 1, spec_.levels.size());
}

SpecEntries QuantileLinearModel::spec_entries() const {
  return {
      {"kind", std::string(kind())},
      {"window_in", std::to_string(spec_.window_in)},
      {"num_features", std::to_string(spec_.num_features)},
      {"levels", join_levels(spec_.levels)},
  };
}

std::unique_ptr<QuantileModel> QuantileLinearModel::clone() const {
  return std::make_unique<QuantileLinearModel>(*this);
}

void QuantileLinearModel::initialize(std::uint64_t seed) {
  Rng rng(seed);
  params_.set_zero();
  if (!spec_.intercept_only) {
    const auto& s = params_.layout()[w_];
    glorot_uniform(params_.matrix(w_), rng, s.rows, s.cols);
  }
}

RowVector QuantileLinearModel::forward_sample(const Matrix& x, Mode, Rng*,
                                              std::vector<std::uint8_t>*) const {
  RowVector out = params_.matrix(b_).row(0);
  if (!spec_.intercept_only) out += flatten(x) * params_.matrix(w_);
  return out;
}

void QuantileLinearModel::backward_sample(const Matrix& x, Mode mode, Rng* rng,
                                          const OutputGradient& output_gradient,
                                          ParameterSet& grad) const {
  const RowVector dout = output_gradient(forward_sample(x, mode, rng, nullptr));
  grad.matrix(b_).row(0) += dout;
  if (!spec_.intercept_only) grad.matrix(w_).noalias() += flatten(x).transpose() * dout;
}

QuantileMlpModel::QuantileMlpModel(MlpSpec spec) : spec_(std::move(spec)) {
  if (spec_.window_in < 1 || spec_.num_features < 1) {
    throw Error(ErrorCode::kInvalidSpec, "window_in and num_features must be >= 1");
  }
  std::size_t width = spec_.window_in * spec_.num_features;
  for (std::size_t i = 0; i < spec_.hidden_units.size(); ++i) {
    if (spec_.hidden_units[i] < 1) throw Error(ErrorCode::kInvalidSpec, "hidden units must be >= 1");
    const std::string pre = "hidden" + std::to_string(i) + ".";
    layers_.emplace_back(params_.add(pre + "w", width, spec_.hidden_units[i]),
                         params_.add(pre + "b", 1, spec_.hidden_units[i]));
    width = spec_.hidden_units[i];
  }
  layers_.emplace_back(params_.add("output.w", width, spec_.levels.size()),
                       params_.add("output.b", 1, spec_.levels.size()));
}

SpecEntries QuantileMlpModel::spec_entries() const {
  std::string hidden;
  for (std::size_t i = 0; i < spec_.hidden_units.size(); ++i) {
    if (i) hidden += ',';
    hidden += std::to_string(spec_.hidden_units[i]);
  }
  return {
      {"kind", std::string(kind())},
      {"window_in", std::to_string(spec_.window_in)},
      {"num_features", std::to_string(spec_.num_features)},
      {"hidden_units", hidden},
      {"levels", join_levels(spec_.levels)},
  };
}

std::unique_ptr<QuantileModel> QuantileMlpModel::clone() const {
  return std::make_unique<QuantileMlpModel>(*this);
}

void QuantileMlpModel::initialize(std::uint64_t seed) {
  Rng rng(seed);
  params_.set_zero();
  for (const auto& [w, b] : layers_) {
    const auto& s = params_.layout()[w];
    glorot_uniform(params_.matrix(w), rng, s.rows, s.cols);
  }
}

RowVector QuantileMlpModel::forward_sample(const Matrix& x, Mode, Rng*,
                                           std::vector<std::uint8_t>* relu_pattern) const {
  RowVector z = flatten(x);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto [w, b] = layers_[i];
    RowVector pre = z * params_.matrix(w) + params_.matrix(b).row(0);
    if (i + 1 == layers_.size()) return pre;
    if (relu_pattern) {
      for (Eigen::Index k = 0; k < pre.size(); ++k) relu_pattern->push_back(pre(k) > 0.0 ? 1 : 0);
    }
    z = pre.cwiseMax(0.0);
  }
  return z;
}

void QuantileMlpModel::backward_sample(const Matrix& x, Mode, Rng*,
                                       const OutputGradient& output_gradient,
                                       ParameterSet& grad) const {
  std::vector<RowVector> inputs;
  std::vector<RowVector> pres;
  RowVector z = flatten(x);
  for (const auto& [w, b] : layers_) {
    inputs.push_back(z);
    RowVector pre = z * params_.matrix(w) + params_.matrix(b).row(0);
    z = pre.cwiseMax(0.0);
    pres.push_back(std::move(pre));
  }
  RowVector dpre = output_gradient(pres.back());
  for (std::size_t i = layers_.size(); i-- > 0;) {
    const auto [w, b] = layers_[i];
    if (i + 1 < layers_.size()) dpre = (pres[i].array() > 0.0).select(dpre, 0.0);
    grad.matrix(w).noalias() += inputs[i].transpose() * dpre;
    grad.matrix(b).row(0) += dpre;
    if (i > 0) dpre = dpre * params_.matrix(w).transpose();
  }
}

}  // namespace fq
