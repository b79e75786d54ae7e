// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <mutex>

#include "gagcn/kernels.hpp"

#if defined(GAGCN_HAVE_AVX2)
#include "kernels_avx2.h"
#endif

namespace gagcn::kern {

namespace {

Table<float> g_f32;
Table<double> g_f64;
std::string_view g_isa = "ref";
std::once_flag g_once;

void install_ref() {
  g_f32 = {&ref::dot, &ref::axpy, &ref::sum, &ref::scale, &ref::mul};
  g_f64 = {&ref::dot, &ref::axpy, &ref::sum, &ref::scale, &ref::mul};
  g_isa = "ref";
}

bool avx2_usable() {
#if defined(GAGCN_HAVE_AVX2) && defined(__GNUC__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

bool install_avx2() {
#if defined(GAGCN_HAVE_AVX2)
  if (!avx2_usable()) return false;
  g_f32 = {&avx2::dot, &avx2::axpy, &avx2::sum, &avx2::scale, &avx2::mul};
  g_f64 = {&avx2::dot, &avx2::axpy, &avx2::sum, &avx2::scale, &avx2::mul};
  g_isa = "avx2";
  return true;
#else
  return false;
#endif
}

bool apply(std::string_view name) {
  if (name == "ref") {
    install_ref();
    return true;
  }
  if (name == "avx2") return install_avx2();
  if (name == "auto") {
    if (!install_avx2()) install_ref();
    return true;
  }
  return false;
}

void ensure_init() {
  std::call_once(g_once, [] {
    const char* env = std::getenv("GAGCN_ISA");
    if (env == nullptr || !apply(env)) apply("auto");
  });
}

}  // namespace

const Table<float>& table_f32() {
  ensure_init();
  return g_f32;
}

const Table<double>& table_f64() {
  ensure_init();
  return g_f64;
}

std::string_view active_isa() {
  ensure_init();
  return g_isa;
}

bool select_isa(std::string_view name) {
  ensure_init();
  return apply(name);
}

}  // namespace gagcn::kern
