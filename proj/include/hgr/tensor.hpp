#pragma once

#include <Eigen/Core>

#include <array>
#include <string>

#include "hgr/error.hpp"

namespace hgr {

using Index = Eigen::Index;

template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using MapMat = Eigen::Map<MatX<Scalar>>;

template <typename Scalar>
using ConstMapMat = Eigen::Map<const MatX<Scalar>>;

template <typename Scalar>
using MapVec = Eigen::Map<VecX<Scalar>>;

template <typename Scalar>
using ConstMapVec = Eigen::Map<const VecX<Scalar>>;

// Dense rank-4 tensor (height, width, channels, count). The count axis is
// outermost: slice k (a sample in a batch, or kernel k in a weight tensor)
// occupies a contiguous block laid out row-major as (height, width, channel)
// with channel fastest. Feature maps use count as the batch axis; weight
// tensors use it as the kernel axis, so each kernel's weights are contiguous.
template <typename Scalar>
class Tensor {
 public:
  Tensor() : shape_{0, 0, 0, 0} {}

  Tensor(Index h, Index w, Index c = 1, Index n = 1) : shape_{h, w, c, n} {
    require(h > 0 && w > 0 && c > 0 && n > 0, "Tensor: dimensions must be positive");
    data_.setZero(h * w * c * n);
  }

  static Tensor constant(Index h, Index w, Index c, Index n, Scalar value) {
    Tensor t(h, w, c, n);
    t.data_.setConstant(value);
    return t;
  }

  Index height() const { return shape_[0]; }
  Index width() const { return shape_[1]; }
  Index channels() const { return shape_[2]; }
  Index count() const { return shape_[3]; }
  const std::array<Index, 4>& shape() const { return shape_; }

  Index slice_size() const { return shape_[0] * shape_[1] * shape_[2]; }
  Index size() const { return data_.size(); }
  bool empty() const { return data_.size() == 0; }

  Scalar& operator()(Index y, Index x, Index c = 0, Index n = 0) {
    return data_[flat(y, x, c, n)];
  }
  Scalar operator()(Index y, Index x, Index c = 0, Index n = 0) const {
    return data_[flat(y, x, c, n)];
  }

  Scalar* data() { return data_.data(); }
  const Scalar* data() const { return data_.data(); }

  Scalar* slice(Index n) { return data_.data() + n * slice_size(); }
  const Scalar* slice(Index n) const { return data_.data() + n * slice_size(); }

  // whole storage as a flat column vector
  MapVec<Scalar> vec() { return MapVec<Scalar>(data_.data(), data_.size()); }
  ConstMapVec<Scalar> vec() const { return ConstMapVec<Scalar>(data_.data(), data_.size()); }

  MapVec<Scalar> slice_vec(Index n) { return MapVec<Scalar>(slice(n), slice_size()); }
  ConstMapVec<Scalar> slice_vec(Index n) const {
    return ConstMapVec<Scalar>(slice(n), slice_size());
  }

  // count x slice_size view; row k is slice k flattened
  MapMat<Scalar> rows() { return MapMat<Scalar>(data_.data(), count(), slice_size()); }
  ConstMapMat<Scalar> rows() const {
    return ConstMapMat<Scalar>(data_.data(), count(), slice_size());
  }

  void set_zero() { data_.setZero(); }

  bool all_finite() const { return data_.allFinite(); }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  std::string shape_str() const {
    return std::to_string(shape_[0]) + "x" + std::to_string(shape_[1]) + "x" +
           std::to_string(shape_[2]) + (shape_[3] == 1 ? "" : "x" + std::to_string(shape_[3]));
  }

  template <typename Other>
  Tensor<Other> cast() const {
    Tensor<Other> out(shape_[0], shape_[1], shape_[2], shape_[3]);
    out.vec() = data_.template cast<Other>();
    return out;
  }

 private:
  Index flat(Index y, Index x, Index c, Index n) const {
    return ((n * shape_[0] + y) * shape_[1] + x) * shape_[2] + c;
  }

  std::array<Index, 4> shape_;
  VecX<Scalar> data_;
};

}  // namespace hgr
