// Copyright 2026 The SpikeForge Authors.
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


#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

#include "spikeforge/error.hpp"

namespace spikeforge {

/// Exact rate p/q. Used wherever a rate must be represented without rounding.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  constexpr Rational() = default;
  constexpr Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {}

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  void validate_rate() const {
    if (den == 0) throw DomainError("rate denominator must be nonzero");
    if ((num < 0) != (den < 0) && num != 0) throw DomainError("rate must be nonnegative");
  }
  /// Same value with a positive denominator.
  Rational normalized() const {
    validate_rate();
    return den < 0 ? Rational{-num, -den} : *this;
  }
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }

  /// Accepts "p/q" or a bare integer "p".
  static Rational parse(std::string_view text) {
    auto parse_int = [&](std::string_view s) {
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        throw DomainError("invalid rational '" + std::string(text) + "'");
      return v;
    };
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return {parse_int(text), 1};
    return {parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1))};
  }
};

}  // namespace spikeforge
