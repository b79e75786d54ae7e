// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gagcn/kernels.hpp"
#include "gagcn/rng.hpp"
#include "gagcn/tensor.hpp"

namespace gagcn {

enum class Activation { tanh, relu, identity };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

// ---- raw accumulate helpers (row-major buffers) ----------------------------
// matmul_nn_acc: C[m x n] += A[m x k] * B[k x n]
// matmul_nt_acc: C[m x n] += A[m x k] * B^T, B stored [n x k]
// matmul_tn_acc: C[m x n] += A^T * B,   A stored [k x m], B stored [k x n]

template <class T>
void matmul_nn_acc(const T* a, const T* b, T* c, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    for (int l = 0; l < k; ++l) {
      kern::axpy<T>(static_cast<std::size_t>(n), a[static_cast<std::size_t>(i) * k + l],
                    b + static_cast<std::size_t>(l) * n, c + static_cast<std::size_t>(i) * n);
    }
  }
}

template <class T>
void matmul_nt_acc(const T* a, const T* b, T* c, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      c[static_cast<std::size_t>(i) * n + j] +=
          kern::dot<T>(a + static_cast<std::size_t>(i) * k, b + static_cast<std::size_t>(j) * k,
                       static_cast<std::size_t>(k));
    }
  }
}

template <class T>
void matmul_tn_acc(const T* a, const T* b, T* c, int m, int k, int n) {
  for (int l = 0; l < k; ++l) {
    for (int i = 0; i < m; ++i) {
      kern::axpy<T>(static_cast<std::size_t>(n), a[static_cast<std::size_t>(l) * m + i],
                    b + static_cast<std::size_t>(l) * n, c + static_cast<std::size_t>(i) * n);
    }
  }
}

// ---- shaped operations ------------------------------------------------------

template <class T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.rank() != 2 || b.rank() != 2) {
    throw ShapeError("matmul: expected 2-D operands, got " + a.shape_str() + " and " +
                     b.shape_str());
  }
  if (a.extent(1) != b.extent(0)) {
    throw ShapeError("matmul: inner extents differ: " + a.shape_str() + " vs " + b.shape_str());
  }
  Tensor<T> c({a.extent(0), b.extent(1)});
  matmul_nn_acc(a.data(), b.data(), c.data(), a.extent(0), a.extent(1), b.extent(1));
  return c;
}

template <class T>
Tensor<T> transpose(const Tensor<T>& a) {
  if (a.rank() != 2) throw ShapeError("transpose: expected 2-D, got " + a.shape_str());
  Tensor<T> out({a.extent(1), a.extent(0)});
  for (int i = 0; i < a.extent(0); ++i)
    for (int j = 0; j < a.extent(1); ++j) out.at(j, i) = a.at(i, j);
  return out;
}

template <class T>
Tensor<T> reshape(const Tensor<T>& a, std::vector<int> shape) {
  if (shape_product(shape) != a.size()) {
    throw ShapeError("reshape: " + a.shape_str() + " to " + format_shape(shape));
  }
  return Tensor<T>(std::move(shape), a.values());
}

/// Numerically stable softmax of a 1-D tensor (max subtraction).
template <class T>
Tensor<T> softmax(const Tensor<T>& x) {
  if (x.rank() != 1 || x.size() == 0) {
    throw ShapeError("softmax: expected non-empty 1-D input, got " + x.shape_str());
  }
  T mx = x[0];
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(static_cast<double>(x[i]))) {
      throw NumericError("softmax: non-finite input entry");
    }
    if (x[i] > mx) mx = x[i];
  }
  Tensor<T> y(x.shape());
  T total = T(0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = std::exp(x[i] - mx);
    total += y[i];
  }
  for (std::size_t i = 0; i < x.size(); ++i) y[i] /= total;
  return y;
}

/// Kronecker product of 2-D tensors: out[i*r+u, j*s+v] = a[i,j] * b[u,v].
template <class T>
Tensor<T> kronecker(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.rank() != 2 || b.rank() != 2) {
    throw ShapeError("kronecker: expected 2-D operands, got " + a.shape_str() + " and " +
                     b.shape_str());
  }
  const int p = a.extent(0), q = a.extent(1);
  const int r = b.extent(0), s = b.extent(1);
  Tensor<T> out({p * r, q * s});
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < q; ++j) {
      const T aij = a.at(i, j);
      for (int u = 0; u < r; ++u) {
        for (int v = 0; v < s; ++v) {
          out.at(i * r + u, j * s + v) = aij * b.at(u, v);
        }
      }
    }
  }
  return out;
}

template <class T>
T activation_scalar(T x, Activation kind) {
  switch (kind) {
    case Activation::tanh:
      return std::tanh(x);
    case Activation::relu:
      return x > T(0) ? x : T(0);
    case Activation::identity:
      return x;
  }
  return x;
}

template <class T>
Tensor<T> activation(const Tensor<T>& x, Activation kind) {
  Tensor<T> y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = activation_scalar(x[i], kind);
  return y;
}

/// Two-sided spatio-temporal application: out[c] = as * h[c] * at^T for each
/// channel of h [w x N x T]. Equals applying (as (x) at) to the row-major
/// (joint*T + frame) flattening of each channel.
template <class T>
Tensor<T> st_apply_eval(const Tensor<T>& as, const Tensor<T>& at, const Tensor<T>& h) {
  if (as.rank() != 2 || as.extent(0) != as.extent(1)) {
    throw ShapeError("st_apply: spatial matrix must be square, got " + as.shape_str());
  }
  if (at.rank() != 2 || at.extent(0) != at.extent(1)) {
    throw ShapeError("st_apply: temporal matrix must be square, got " + at.shape_str());
  }
  if (h.rank() != 3 || h.extent(1) != as.extent(0) || h.extent(2) != at.extent(0)) {
    throw ShapeError("st_apply: feature tensor " + h.shape_str() + " incompatible with " +
                     as.shape_str() + " and " + at.shape_str());
  }
  const int w = h.extent(0), joints = h.extent(1), frames = h.extent(2);
  const std::size_t plane = static_cast<std::size_t>(joints) * frames;
  Tensor<T> out(h.shape());
  Tensor<T> tmp({joints, frames});
  for (int c = 0; c < w; ++c) {
    tmp.fill(T(0));
    // tmp = h_c * at^T
    matmul_nt_acc(h.data() + c * plane, at.data(), tmp.data(), joints, frames, frames);
    // out_c = as * tmp
    matmul_nn_acc(as.data(), tmp.data(), out.data() + c * plane, joints, joints, frames);
  }
  return out;
}

// ---- layout transforms -------------------------------------------------------

/// [F x N x C] frame-major to [C x N x F] channel-major.
template <class T>
Tensor<T> frames_to_cnt(const Tensor<T>& fnc) {
  if (fnc.rank() != 3) throw ShapeError("frames_to_cnt: expected 3-D, got " + fnc.shape_str());
  const int f = fnc.extent(0), n = fnc.extent(1), c = fnc.extent(2);
  Tensor<T> out({c, n, f});
  for (int i = 0; i < f; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < c; ++k) out.at(k, j, i) = fnc.at(i, j, k);
  return out;
}

/// [C x N x F] channel-major to [F x N x C] frame-major.
template <class T>
Tensor<T> cnt_to_frames(const Tensor<T>& cnf) {
  if (cnf.rank() != 3) throw ShapeError("cnt_to_frames: expected 3-D, got " + cnf.shape_str());
  const int c = cnf.extent(0), n = cnf.extent(1), f = cnf.extent(2);
  Tensor<T> out({f, n, c});
  for (int k = 0; k < c; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < f; ++i) out.at(i, j, k) = cnf.at(k, j, i);
  return out;
}

// ---- initializers --------------------------------------------------------------

template <class T>
void fill_uniform(Rng& rng, Tensor<T>& t, double lo, double hi) {
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<T>(rng.uniform(lo, hi));
}

template <class T>
void fill_normal(Rng& rng, Tensor<T>& t, double scale) {
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<T>(scale * rng.normal());
}

/// Uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)].
template <class T>
Tensor<T> uniform_fan_in(std::vector<int> shape, int fan_in, Rng rng) {
  Tensor<T> t(std::move(shape));
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  fill_uniform(rng, t, -bound, bound);
  return t;
}

/// Identity plus elementwise uniform noise of the given scale.
template <class T>
Tensor<T> identity_plus_noise(int d, double noise_scale, Rng rng) {
  Tensor<T> t = Tensor<T>::identity(d);
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] += static_cast<T>(noise_scale * rng.uniform(-1.0, 1.0));
  }
  return t;
}

}  // namespace gagcn
