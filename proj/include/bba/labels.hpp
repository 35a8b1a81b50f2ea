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

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bba/errors.hpp"
#include "bba/values.hpp"

namespace bba {

// The protocol gate alphabet. Gate names double as label prefixes in the
// canonical text rendering, so they are plain upper-case identifiers.
inline constexpr const char* kGateSync = "SYNC";
inline constexpr const char* kGateReceive = "RECEIVE_BLOCK_PROPOSAL";
inline constexpr const char* kGateCommitProposed = "COMMIT_PROPOSED_BLOCK";
inline constexpr const char* kGateCommitEmpty = "COMMIT_EMPTY_BLOCK";
inline constexpr const char* kGateSetBit = "SET_BIT";
inline constexpr const char* kGatePZero = "P_ZERO";
inline constexpr const char* kGatePOne = "P_ONE";
inline constexpr const char* kGatePIn = "P_IN";
inline constexpr const char* kGatePOut = "P_OUT";
inline constexpr const char* kGateSelfPropagate = "SELF_PROPAGATE";
inline constexpr const char* kGatePropagate = "PROPAGATE";
inline constexpr const char* kGateTally = "TALLY";

/// A transition label: either the internal action tau or a gate name with a
/// (possibly empty) list of offer values.
class Label {
 public:
  static Label tau() { return Label(); }

  Label(std::string gate, std::vector<Value> offers)
      : tau_(false), gate_(std::move(gate)), offers_(std::move(offers)) {
    if (gate_.empty()) throw InternalError("gate name must be nonempty");
    if (gate_ == "i")
      throw InternalError("gate name 'i' collides with the tau rendering");
    for (char c : gate_)
      if (c == ' ' || c == '!' || c == '"')
        throw InternalError("bad character in gate name '" + gate_ + "'");
  }

  bool is_tau() const { return tau_; }
  const std::string& gate() const { return gate_; }
  const std::vector<Value>& offers() const { return offers_; }

  friend bool operator==(const Label& a, const Label& b) {
    return a.tau_ == b.tau_ && a.gate_ == b.gate_ && a.offers_ == b.offers_;
  }
  friend bool operator!=(const Label& a, const Label& b) { return !(a == b); }

 private:
  Label() : tau_(true) {}

  bool tau_;
  std::string gate_;
  std::vector<Value> offers_;
};

/// Offer type profiles of the protocol gates, used to give parsed offers
/// their intended kinds. Unknown gates fall back to a purely syntactic rule.
inline const std::map<std::string, std::vector<ValueKind>>& gate_schemas() {
  static const std::map<std::string, std::vector<ValueKind>> schemas = {
      {kGateSync, {ValueKind::Tag}},
      {kGateReceive, {ValueKind::Bit}},
      {kGateCommitProposed, {}},
      {kGateCommitEmpty, {}},
      {kGateSetBit, {ValueKind::Pid, ValueKind::Step, ValueKind::Bit}},
      {kGatePZero, {ValueKind::Pid, ValueKind::Prob}},
      {kGatePOne, {ValueKind::Pid, ValueKind::Prob}},
      {kGatePIn, {ValueKind::Pid, ValueKind::Prob}},
      {kGatePOut, {ValueKind::Pid, ValueKind::Prob}},
      {kGateSelfPropagate, {ValueKind::Pid, ValueKind::Bit}},
      {kGatePropagate, {ValueKind::Pid, ValueKind::Bit}},
      {kGateTally, {ValueKind::Pid, ValueKind::Count, ValueKind::Count}},
  };
  return schemas;
}

/// Canonical text: "i" for tau, otherwise the gate followed by one " !"-
/// prefixed token per offer, e.g. `TALLY !2 !0 !3`. Injective over well-formed
/// labels (gate names cannot contain '!', offer tokens cannot contain spaces).
inline std::string format_label(const Label& label) {
  if (label.is_tau()) return "i";
  std::string out = label.gate();
  for (const Value& v : label.offers()) {
    out += " !";
    out += v.text();
  }
  return out;
}

namespace detail {

inline bool is_integer_token(const std::string& t) {
  if (t.empty()) return false;
  for (char c : t)
    if (c < '0' || c > '9') return false;
  return true;
}

inline bool is_fraction_token(const std::string& t) {
  std::size_t dot = t.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 >= t.size())
    return false;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (i != dot && (t[i] < '0' || t[i] > '9')) return false;
  return true;
}

inline Value parse_offer_token(const std::string& gate, std::size_t index,
                               const std::string& token, std::size_t offset) {
  const auto& schemas = gate_schemas();
  auto it = schemas.find(gate);
  const ValueKind* expected = nullptr;
  if (it != schemas.end() && index < it->second.size())
    expected = &it->second[index];

  if (token == "BEGIN" || token == "END") {
    if (expected && *expected == ValueKind::Tag)
      return token == "BEGIN" ? Value::tag_begin() : Value::tag_end();
    return Value::abstract(token);
  }
  if (is_integer_token(token)) {
    if (token.size() > 9)
      throw ParseError("numeric offer too large: '" + token + "'", offset);
    int n = std::stoi(token);
    if (expected) {
      switch (*expected) {
        case ValueKind::Pid:
          if (n >= 1) return Value::pid(n);
          break;
        case ValueKind::Bit:
          if (n == 0 || n == 1) return Value::bit(n);
          break;
        case ValueKind::Step:
          if (n >= 0 && n <= 2) return Value::step(n);
          break;
        case ValueKind::Count:
          return Value::count(n);
        default:
          break;
      }
    }
    // Shape fallback: any other decimal reads as a count.
    return Value::count(n);
  }
  if (is_fraction_token(token)) return Value::prob(parse_prob(token));
  if (token[0] >= '0' && token[0] <= '9')
    throw ParseError("malformed offer token '" + token + "'", offset);
  return Value::abstract(token);
}

}  // namespace detail

/// Inverse of format_label on the protocol alphabet; on unknown gates the
/// offers are typed by shape (decimal -> Count, decimal fraction -> Prob,
/// BEGIN/END or other names -> Abstract). Throws ParseError with a byte
/// offset into `text` on malformed input.
inline Label parse_label(const std::string& text) {
  if (text == "i") return Label::tau();
  if (text.empty()) throw ParseError("empty label", 0);
  std::size_t pos = text.find(' ');
  std::string gate = text.substr(0, pos);
  if (gate.empty()) throw ParseError("empty gate name", 0);
  for (std::size_t i = 0; i < gate.size(); ++i)
    if (gate[i] == '!' || gate[i] == '"')
      throw ParseError("bad character in gate name", i);
  std::vector<Value> offers;
  while (pos != std::string::npos) {
    if (pos + 1 >= text.size() || text[pos + 1] != '!')
      throw ParseError("expected '!' to start an offer", pos + 1);
    std::size_t start = pos + 2;
    std::size_t end = text.find(' ', start);
    std::string token = text.substr(
        start, end == std::string::npos ? std::string::npos : end - start);
    if (token.empty()) throw ParseError("empty offer token", start);
    offers.push_back(detail::parse_offer_token(gate, offers.size(), token,
                                               start));
    pos = end;
  }
  return Label(std::move(gate), std::move(offers));
}

}  // namespace bba
