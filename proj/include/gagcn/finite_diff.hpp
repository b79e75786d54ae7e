// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>

#include "gagcn/tape.hpp"

namespace gagcn {

/// Max relative error between the analytic gradient already stored in
/// p.grad and a central finite difference of f around the current value:
///   max_i |analytic_i - numeric_i| / max(1, |numeric_i|).
///
/// f must be a deterministic scalar function of the current parameter values;
/// this is verified by evaluating it twice up front. The parameter is
/// restored entry by entry, so f's other inputs are untouched.
template <class T>
double finite_diff_check(const std::function<double()>& f, Parameter<T>& p, double eps) {
  static_assert(precision_of<T>::value == Precision::binary64,
                "finite_diff_check requires binary64 parameters");
  if (eps <= 0.0) throw ContractError("finite_diff_check: eps must be positive");
  const double f0 = f();
  const double f1 = f();
  if (!(f0 == f1)) {
    throw OracleError("finite_diff_check: target function is not deterministic (" +
                      std::to_string(f0) + " vs " + std::to_string(f1) + ")");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < p.value.size(); ++i) {
    const T saved = p.value[i];
    p.value[i] = saved + static_cast<T>(eps);
    const double plus = f();
    p.value[i] = saved - static_cast<T>(eps);
    const double minus = f();
    p.value[i] = saved;
    const double numeric = (plus - minus) / (2.0 * eps);
    const double analytic = static_cast<double>(p.grad[i]);
    const double rel = std::abs(analytic - numeric) / std::max(1.0, std::abs(numeric));
    if (rel > worst) worst = rel;
  }
  return worst;
}

}  // namespace gagcn
