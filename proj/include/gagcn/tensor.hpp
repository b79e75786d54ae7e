// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "gagcn/errors.hpp"

namespace gagcn {

enum class Precision { binary32, binary64 };

template <class T>
struct precision_of;
template <>
struct precision_of<float> {
  static constexpr Precision value = Precision::binary32;
};
template <>
struct precision_of<double> {
  static constexpr Precision value = Precision::binary64;
};

inline std::string format_shape(const std::vector<int>& shape) {
  if (shape.empty()) return "scalar";
  std::string s;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(shape[i]);
  }
  return s;
}

inline std::size_t shape_product(const std::vector<int>& shape) {
  std::size_t p = 1;
  for (const int e : shape) {
    if (e <= 0) throw ShapeError("non-positive extent in shape " + format_shape(shape));
    p *= static_cast<std::size_t>(e);
  }
  return p;
}

/// Dense row-major tensor with explicit shape. Element (i0,...,ik) lives at
/// offset sum(i_j * stride_j) with strides derived from the shape.
template <class T>
class Tensor {
public:
  Tensor() = default;

  explicit Tensor(std::vector<int> shape)
      : shape_(std::move(shape)), data_(shape_product(shape_), T(0)) {}

  Tensor(std::vector<int> shape, std::vector<T> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_product(shape_) != data_.size()) {
      throw ShapeError("data length " + std::to_string(data_.size()) +
                       " does not match shape " + format_shape(shape_));
    }
  }

  static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }

  static Tensor full(std::vector<int> shape, T v) {
    Tensor t(std::move(shape));
    for (auto& x : t.data_) x = v;
    return t;
  }

  static Tensor identity(int n) {
    Tensor t({n, n});
    for (int i = 0; i < n; ++i) t.at(i, i) = T(1);
    return t;
  }

  static Tensor row(std::initializer_list<T> vals) {
    return Tensor({static_cast<int>(vals.size())}, std::vector<T>(vals));
  }

  static Tensor matrix(std::initializer_list<std::initializer_list<T>> rows) {
    const int r = static_cast<int>(rows.size());
    const int c = r ? static_cast<int>(rows.begin()->size()) : 0;
    std::vector<T> data;
    data.reserve(static_cast<std::size_t>(r) * static_cast<std::size_t>(c));
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != c) throw ShapeError("ragged matrix literal");
      data.insert(data.end(), row.begin(), row.end());
    }
    return Tensor({r, c}, std::move(data));
  }

  int rank() const { return static_cast<int>(shape_.size()); }
  const std::vector<int>& shape() const { return shape_; }
  int extent(int axis) const { return shape_[static_cast<std::size_t>(axis)]; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  std::string shape_str() const { return format_shape(shape_); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::vector<T>& values() { return data_; }
  const std::vector<T>& values() const { return data_; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  T& at(int i, int j) { return data_[static_cast<std::size_t>(i) * shape_[1] + j]; }
  const T& at(int i, int j) const { return data_[static_cast<std::size_t>(i) * shape_[1] + j]; }

  T& at(int i, int j, int k) {
    return data_[(static_cast<std::size_t>(i) * shape_[1] + j) * shape_[2] + k];
  }
  const T& at(int i, int j, int k) const {
    return data_[(static_cast<std::size_t>(i) * shape_[1] + j) * shape_[2] + k];
  }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  template <class U>
  Tensor<U> cast() const {
    std::vector<U> out(data_.size());
    for (std::size_t i = 0; i < data_.size(); ++i) out[i] = static_cast<U>(data_[i]);
    return Tensor<U>(shape_, std::move(out));
  }

  void fill(T v) {
    for (auto& x : data_) x = v;
  }

private:
  std::vector<int> shape_;
  std::vector<T> data_;
};

}  // namespace gagcn
