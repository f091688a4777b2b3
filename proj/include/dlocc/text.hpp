// Copyright 2026 The dlocc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Number formatting shared by the text serializers. Doubles are written in
// shortest round-trip form so parsing restores the identical bit pattern.
#pragma once

#include <charconv>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dlocc::text {

inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view token) {
  double x = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), x);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size())
    throw std::invalid_argument("bad number '" + std::string(token) + "'");
  return x;
}

template <typename Int = int>
Int parse_int(std::string_view token) {
  Int x = 0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), x);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size())
    throw std::invalid_argument("bad integer '" + std::string(token) + "'");
  return x;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace dlocc::text
