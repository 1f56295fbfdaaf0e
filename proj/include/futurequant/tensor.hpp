#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace fq {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using MatrixMap = Eigen::Map<Matrix>;
using ConstMatrixMap = Eigen::Map<const Matrix>;

// Dense row-major (samples, steps, features) array.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(std::size_t samples, std::size_t steps, std::size_t features, double fill = 0.0)
      : samples_(samples), steps_(steps), features_(features),
        data_(samples * steps * features, fill) {}

  std::size_t samples() const noexcept { return samples_; }
  std::size_t steps() const noexcept { return steps_; }
  std::size_t features() const noexcept { return features_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t n, std::size_t t, std::size_t f) {
    return data_[(n * steps_ + t) * features_ + f];
  }
  double operator()(std::size_t n, std::size_t t, std::size_t f) const {
    return data_[(n * steps_ + t) * features_ + f];
  }

  // (steps x features) view of one sample.
  ConstMatrixMap sample(std::size_t n) const {
    return ConstMatrixMap(data_.data() + n * steps_ * features_,
                          static_cast<Eigen::Index>(steps_), static_cast<Eigen::Index>(features_));
  }
  MatrixMap sample(std::size_t n) {
    return MatrixMap(data_.data() + n * steps_ * features_, static_cast<Eigen::Index>(steps_),
                     static_cast<Eigen::Index>(features_));
  }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  // Copies the listed samples, in order, into a new tensor.
  Tensor3 gather(std::span<const std::size_t> indices) const;

 private:
  std::size_t samples_ = 0;
  std::size_t steps_ = 0;
  std::size_t features_ = 0;
  std::vector<double> data_;
};

}  // namespace fq
