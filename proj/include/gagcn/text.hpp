// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace gagcn {

/// Shortest decimal text that round-trips the value (std::to_chars).
std::string num_str(double v);
std::string num_str(float v);

/// Strict full-string parse; throws IoError with the given context on failure.
double parse_double(std::string_view s, const std::string& context);
long parse_long(std::string_view s, const std::string& context);

std::vector<std::string> split(std::string_view line, char sep);
std::string_view trim(std::string_view s);

}  // namespace gagcn
