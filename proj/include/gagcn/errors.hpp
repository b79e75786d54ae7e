// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

namespace gagcn {

/// Shape or dimension violation (mismatched extents, bad rank, ...).
class ShapeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (candidate counts, widths, config files).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// File and stream problems: missing paths, parse failures, truncated payloads.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values where finite ones are required, divergence, NaN gradients.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// API contract violation (e.g. backward on a non-scalar node).
class ContractError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// The finite-difference oracle found the target function unusable
/// (non-deterministic repeated evaluation).
class OracleError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace gagcn
