// SPDX-License-Identifier: Apache-2.0
#include "gagcn/trainer.hpp"

namespace gagcn {

std::string to_string(LossKind k) { return k == LossKind::mpjpe ? "mpjpe" : "mae"; }

LossKind loss_from_string(const std::string& s) {
  if (s == "mpjpe") return LossKind::mpjpe;
  if (s == "mae") return LossKind::mae;
  throw ConfigError("unknown loss '" + s + "' (expected mpjpe or mae)");
}

}  // namespace gagcn
