// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

// AVX2 + FMA kernel variants. Compiled only when the toolchain supports
// -mavx2 -mfma (GAGCN_HAVE_AVX2); callers must additionally check CPU support
// at runtime before installing these into the dispatch table.

namespace gagcn::kern::avx2 {

float dot(const float* x, const float* y, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
void axpy(std::size_t n, float a, const float* x, float* y);
void axpy(std::size_t n, double a, const double* x, double* y);
float sum(const float* x, std::size_t n);
double sum(const double* x, std::size_t n);
void scale(std::size_t n, float a, float* x);
void scale(std::size_t n, double a, double* x);
void mul(std::size_t n, const float* a, const float* b, float* out);
void mul(std::size_t n, const double* a, const double* b, double* out);

}  // namespace gagcn::kern::avx2
