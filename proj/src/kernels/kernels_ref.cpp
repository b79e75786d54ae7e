// SPDX-License-Identifier: Apache-2.0
#include "gagcn/kernels.hpp"

namespace gagcn::kern::ref {

namespace {

template <class T>
T dot_impl(const T* x, const T* y, std::size_t n) {
  T acc = T(0);
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

template <class T>
void axpy_impl(std::size_t n, T a, const T* x, T* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

template <class T>
T sum_impl(const T* x, std::size_t n) {
  T acc = T(0);
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

template <class T>
void scale_impl(std::size_t n, T a, T* x) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

template <class T>
void mul_impl(std::size_t n, const T* a, const T* b, T* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

}  // namespace

float dot(const float* x, const float* y, std::size_t n) { return dot_impl(x, y, n); }
double dot(const double* x, const double* y, std::size_t n) { return dot_impl(x, y, n); }
void axpy(std::size_t n, float a, const float* x, float* y) { axpy_impl(n, a, x, y); }
void axpy(std::size_t n, double a, const double* x, double* y) { axpy_impl(n, a, x, y); }
float sum(const float* x, std::size_t n) { return sum_impl(x, n); }
double sum(const double* x, std::size_t n) { return sum_impl(x, n); }
void scale(std::size_t n, float a, float* x) { scale_impl(n, a, x); }
void scale(std::size_t n, double a, double* x) { scale_impl(n, a, x); }
void mul(std::size_t n, const float* a, const float* b, float* out) { mul_impl(n, a, b, out); }
void mul(std::size_t n, const double* a, const double* b, double* out) { mul_impl(n, a, b, out); }

}  // namespace gagcn::kern::ref
