// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel inner loops behind the tensor ops. Scalar reference kernels
// are the semantic definition; SIMD variants are selected at runtime and are
// equivalence-tested against the reference in tests/test_kernels.cpp.

namespace gagcn::kern {

namespace ref {
float dot(const float* x, const float* y, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
void axpy(std::size_t n, float a, const float* x, float* y);   // y += a*x
void axpy(std::size_t n, double a, const double* x, double* y);
float sum(const float* x, std::size_t n);
double sum(const double* x, std::size_t n);
void scale(std::size_t n, float a, float* x);  // x *= a
void scale(std::size_t n, double a, double* x);
void mul(std::size_t n, const float* a, const float* b, float* out);  // out = a.*b
void mul(std::size_t n, const double* a, const double* b, double* out);
}  // namespace ref

template <class T>
struct Table {
  T (*dot)(const T*, const T*, std::size_t);
  void (*axpy)(std::size_t, T, const T*, T*);
  T (*sum)(const T*, std::size_t);
  void (*scale)(std::size_t, T, T*);
  void (*mul)(std::size_t, const T*, const T*, T*);
};

const Table<float>& table_f32();
const Table<double>& table_f64();

template <class T>
const Table<T>& table();
template <>
inline const Table<float>& table<float>() {
  return table_f32();
}
template <>
inline const Table<double>& table<double>() {
  return table_f64();
}

/// Name of the instruction set the dispatched kernels currently run on:
/// "avx2" or "ref".
std::string_view active_isa();

/// Select "ref", "avx2" or "auto" (best supported). Returns false and leaves
/// the selection unchanged if the requested ISA is not available on this
/// build/CPU. The GAGCN_ISA environment variable provides the initial choice.
bool select_isa(std::string_view name);

template <class T>
inline T dot(const T* x, const T* y, std::size_t n) {
  return table<T>().dot(x, y, n);
}
template <class T>
inline void axpy(std::size_t n, T a, const T* x, T* y) {
  table<T>().axpy(n, a, x, y);
}
template <class T>
inline T sum(const T* x, std::size_t n) {
  return table<T>().sum(x, n);
}
template <class T>
inline void scale(std::size_t n, T a, T* x) {
  table<T>().scale(n, a, x);
}
template <class T>
inline void mul(std::size_t n, const T* a, const T* b, T* out) {
  table<T>().mul(n, a, b, out);
}

}  // namespace gagcn::kern
