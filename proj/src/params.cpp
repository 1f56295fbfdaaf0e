#include "futurequant/params.hpp"

#include <algorithm>
#include <cmath>

#include "futurequant/error.hpp"

namespace fq {

std::size_t ParameterSet::add(std::string name, std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) {
    throw Error(ErrorCode::kInvalidSpec, "parameter '" + name + "' has an empty shape");
  }
  for (const auto& s : layout_) {
    if (s.name == name) throw Error(ErrorCode::kInvalidSpec, "duplicate parameter '" + name + "'");
  }
  layout_.push_back({std::move(name), rows, cols, values_.size()});
  values_.resize(values_.size() + rows * cols, 0.0);
  return layout_.size() - 1;
}

std::size_t ParameterSet::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < layout_.size(); ++i) {
    if (layout_[i].name == name) return i;
  }
  throw Error(ErrorCode::kInvalidArgument, "no parameter named '" + std::string(name) + "'");
}

ParameterSet ParameterSet::zeros_like() const {
  ParameterSet out;
  out.layout_ = layout_;
  out.values_.assign(values_.size(), 0.0);
  return out;
}

void ParameterSet::set_zero() noexcept { std::fill(values_.begin(), values_.end(), 0.0); }

bool ParameterSet::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace fq
