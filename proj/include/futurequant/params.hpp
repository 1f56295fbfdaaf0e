#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "futurequant/tensor.hpp"

namespace fq {

struct ParamShape {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t offset = 0;

  std::size_t size() const noexcept { return rows * cols; }
  bool operator==(const ParamShape&) const = default;
};

// Named matrices laid out back to back in one contiguous buffer, so that
// optimizers and the gradient checker can treat all weights as a flat vector.
class ParameterSet {
 public:
  // Returns the index of the new (zero-filled) entry.
  std::size_t add(std::string name, std::size_t rows, std::size_t cols);

  std::size_t size() const noexcept { return values_.size(); }
  std::size_t count() const noexcept { return layout_.size(); }
  const std::vector<ParamShape>& layout() const noexcept { return layout_; }
  std::size_t index_of(std::string_view name) const;

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  MatrixMap matrix(std::size_t index) {
    const auto& s = layout_[index];
    return MatrixMap(values_.data() + s.offset, static_cast<Eigen::Index>(s.rows),
                     static_cast<Eigen::Index>(s.cols));
  }
  ConstMatrixMap matrix(std::size_t index) const {
    const auto& s = layout_[index];
    return ConstMatrixMap(values_.data() + s.offset, static_cast<Eigen::Index>(s.rows),
                          static_cast<Eigen::Index>(s.cols));
  }
  MatrixMap matrix(std::string_view name) { return matrix(index_of(name)); }
  ConstMatrixMap matrix(std::string_view name) const { return matrix(index_of(name)); }

  // Same layout, all zeros.
  ParameterSet zeros_like() const;
  void set_zero() noexcept;
  bool same_layout(const ParameterSet& other) const noexcept { return layout_ == other.layout_; }
  bool all_finite() const noexcept;

  bool operator==(const ParameterSet&) const = default;

 private:
  std::vector<ParamShape> layout_;
  std::vector<double> values_;
};

}  // namespace fq
