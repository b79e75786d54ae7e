// SPDX-License-Identifier: Apache-2.0
#include "gagcn/text.hpp"

#include <charconv>

#include "gagcn/errors.hpp"

namespace gagcn {

namespace {

template <class T>
std::string to_chars_str(T v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string num_str(double v) { return to_chars_str(v); }
std::string num_str(float v) { return to_chars_str(v); }

double parse_double(std::string_view s, const std::string& context) {
  s = trim(s);
  double out = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw IoError(context + ": not a number: '" + std::string(s) + "'");
  }
  return out;
}

long parse_long(std::string_view s, const std::string& context) {
  s = trim(s);
  long out = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw IoError(context + ": not an integer: '" + std::string(s) + "'");
  }
  return out;
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace gagcn
