/*
 * Copyright 2026 The bbastar Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <string>
#include <tuple>

#include "bba/errors.hpp"

namespace bba {

/// Discrete probabilities are kept as integer ticks of 1e-4 so that the
/// protocol constants (0.75, 0.7424, 0.5, ...) and their complements are
/// exact. Range: 0..10000 inclusive.
using ProbTicks = std::int32_t;

inline constexpr ProbTicks kProbOne = 10000;

/// Renders ticks as a decimal with no trailing zeros beyond one digit:
/// 5000 -> "0.5", 7424 -> "0.7424", 0 -> "0.0", 10000 -> "1.0".
inline std::string format_prob(ProbTicks ticks) {
  if (ticks < 0 || ticks > kProbOne)
    throw InternalError("probability ticks out of range: " +
                        std::to_string(ticks));
  std::string out = ticks >= kProbOne ? "1" : "0";
  int frac = static_cast<int>(ticks % kProbOne);
  char digits[5];
  for (int i = 3; i >= 0; --i) {
    digits[i] = static_cast<char>('0' + frac % 10);
    frac /= 10;
  }
  digits[4] = '\0';
  int len = 4;
  while (len > 1 && digits[len - 1] == '0') --len;
  out += '.';
  out.append(digits, static_cast<std::size_t>(len));
  return out;
}

/// Inverse of format_prob. Accepts at most four fractional digits. Throws
/// ParseError on malformed text or out-of-range values.
inline ProbTicks parse_prob(const std::string& text) {
  std::size_t dot = text.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 >= text.size())
    throw ParseError("probability must look like D.DDDD: '" + text + "'");
  std::int64_t whole = 0;
  for (std::size_t i = 0; i < dot; ++i) {
    if (text[i] < '0' || text[i] > '9')
      throw ParseError("bad digit in probability '" + text + "'", i);
    whole = whole * 10 + (text[i] - '0');
    if (whole > 1) throw ParseError("probability above 1: '" + text + "'");
  }
  std::size_t frac_len = text.size() - dot - 1;
  if (frac_len > 4)
    throw ParseError("more than four fractional digits in '" + text + "'");
  std::int64_t frac = 0;
  for (std::size_t i = dot + 1; i < text.size(); ++i) {
    if (text[i] < '0' || text[i] > '9')
      throw ParseError("bad digit in probability '" + text + "'", i);
    frac = frac * 10 + (text[i] - '0');
  }
  for (std::size_t i = frac_len; i < 4; ++i) frac *= 10;
  std::int64_t ticks = whole * kProbOne + frac;
  if (ticks > kProbOne)
    throw ParseError("probability above 1: '" + text + "'");
  return static_cast<ProbTicks>(ticks);
}

enum class ValueKind : std::uint8_t {
  Bit,       // 0 | 1
  Pid,       // node identity, 1-based
  Step,      // voting step tag, 0 | 1 | 2
  Tag,       // barrier tag, BEGIN | END
  Count,     // saturating vote count, >= 0
  Prob,      // probability ticks, 0..10000
  Abstract,  // opaque symbol, e.g. the canonical placeholder "X"
};

/// One offer value on a transition label. Immutable after construction;
/// every factory range-checks its argument.
class Value {
 public:
  static Value bit(int b) {
    if (b != 0 && b != 1)
      throw InternalError("bit out of range: " + std::to_string(b));
    return Value(ValueKind::Bit, b);
  }
  static Value pid(int id) {
    if (id < 1) throw InternalError("pid must be >= 1: " + std::to_string(id));
    return Value(ValueKind::Pid, id);
  }
  static Value step(int s) {
    if (s < 0 || s > 2)
      throw InternalError("step out of range: " + std::to_string(s));
    return Value(ValueKind::Step, s);
  }
  static Value tag_begin() { return Value(ValueKind::Tag, 0); }
  static Value tag_end() { return Value(ValueKind::Tag, 1); }
  static Value count(int c) {
    if (c < 0)
      throw InternalError("count must be >= 0: " + std::to_string(c));
    return Value(ValueKind::Count, c);
  }
  static Value prob(ProbTicks ticks) {
    if (ticks < 0 || ticks > kProbOne)
      throw InternalError("probability ticks out of range: " +
                          std::to_string(ticks));
    return Value(ValueKind::Prob, ticks);
  }
  static Value abstract(std::string symbol) {
    if (symbol.empty())
      throw InternalError("abstract symbol must be nonempty");
    Value v(ValueKind::Abstract, 0);
    v.sym_ = std::move(symbol);
    return v;
  }

  ValueKind kind() const { return kind_; }
  std::int32_t num() const { return num_; }
  const std::string& sym() const { return sym_; }

  bool is_numeric() const {
    return kind_ == ValueKind::Bit || kind_ == ValueKind::Pid ||
           kind_ == ValueKind::Step || kind_ == ValueKind::Count ||
           kind_ == ValueKind::Prob;
  }

  std::string text() const {
    switch (kind_) {
      case ValueKind::Tag:
        return num_ == 0 ? "BEGIN" : "END";
      case ValueKind::Prob:
        return format_prob(num_);
      case ValueKind::Abstract:
        return sym_;
      default:
        return std::to_string(num_);
    }
  }

  friend bool operator==(const Value& a, const Value& b) {
    return a.kind_ == b.kind_ && a.num_ == b.num_ && a.sym_ == b.sym_;
  }
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }
  friend bool operator<(const Value& a, const Value& b) {
    return std::tie(a.kind_, a.num_, a.sym_) <
           std::tie(b.kind_, b.num_, b.sym_);
  }

 private:
  Value(ValueKind kind, std::int32_t num) : kind_(kind), num_(num) {}

  ValueKind kind_;
  std::int32_t num_;
  std::string sym_;  // nonempty only for Abstract
};

}  // namespace bba
