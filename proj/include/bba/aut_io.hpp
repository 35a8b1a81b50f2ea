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
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bba/errors.hpp"
#include "bba/lts.hpp"

namespace bba {

/// Serializes to the Aldebaran format:
///
///   des (I, T, S)
///   (src, "LABEL", dst)
///   ...
///
/// Transitions are emitted sorted by (src, canonical label text, dst), lines
/// end with a single LF, and the output is byte-stable for a given LTS. The
/// input should be normalized; write_aut itself only sorts.
inline std::string write_aut(const Lts& l) {
  std::string out = "des (" + std::to_string(l.initial()) + ", " +
                    std::to_string(l.transitions().size()) + ", " +
                    std::to_string(l.state_count()) + ")\n";
  for (const Transition& t : sorted_transitions(l)) {
    out += "(" + std::to_string(t.src) + ", \"" + format_label(t.label) +
           "\", " + std::to_string(t.dst) + ")\n";
  }
  return out;
}

inline void write_aut_file(const Lts& l, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  std::string text = write_aut(l);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw IoError("short write to '" + path + "'");
}

namespace detail {

struct AutCursor {
  const std::string& text;
  std::size_t pos = 0;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }

  void skip_spaces() {
    while (!done() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }

  void expect(char c, const char* what) {
    skip_spaces();
    if (done() || text[pos] != c)
      throw ParseError(std::string("expected ") + what, pos);
    ++pos;
  }

  std::uint64_t number(const char* what) {
    skip_spaces();
    std::size_t start = pos;
    std::uint64_t n = 0;
    while (!done() && text[pos] >= '0' && text[pos] <= '9') {
      n = n * 10 + static_cast<std::uint64_t>(text[pos] - '0');
      if (n > 0xFFFFFFFFull)
        throw ParseError(std::string(what) + " too large", start);
      ++pos;
    }
    if (pos == start)
      throw ParseError(std::string("expected ") + what, pos);
    return n;
  }
};

}  // namespace detail

/// Parses Aldebaran text. Labels may be quoted or bare (bare `i` is tau, as
/// is quoted "i"); arbitrary blanks are tolerated around punctuation. Throws
/// ParseError with a byte offset on malformed input, wrong transition counts,
/// or out-of-range state indexes.
inline Lts read_aut(const std::string& text) {
  detail::AutCursor c{text};
  c.skip_spaces();
  if (text.compare(c.pos, 3, "des") != 0)
    throw ParseError("expected 'des' header", c.pos);
  c.pos += 3;
  c.expect('(', "'('");
  std::uint64_t initial = c.number("initial state");
  c.expect(',', "','");
  std::uint64_t n_trans = c.number("transition count");
  c.expect(',', "','");
  std::uint64_t n_states = c.number("state count");
  c.expect(')', "')'");
  c.skip_spaces();
  if (c.done() || c.peek() != '\n')
    throw ParseError("junk after header", c.pos);
  ++c.pos;
  if (n_states == 0) throw ParseError("state count must be positive", 0);
  if (initial >= n_states)
    throw ParseError("initial state out of range", 0);

  std::vector<Transition> transitions;
  transitions.reserve(n_trans);
  while (true) {
    c.skip_spaces();
    while (!c.done() && c.peek() == '\n') {  // tolerate blank lines
      ++c.pos;
      c.skip_spaces();
    }
    if (c.done()) break;
    std::size_t line_start = c.pos;
    c.expect('(', "'('");
    std::uint64_t src = c.number("source state");
    c.expect(',', "','");
    c.skip_spaces();
    std::string label_text;
    if (!c.done() && c.peek() == '"') {
      ++c.pos;
      std::size_t end = text.find('"', c.pos);
      if (end == std::string::npos)
        throw ParseError("unterminated label quote", c.pos);
      label_text = text.substr(c.pos, end - c.pos);
      c.pos = end + 1;
      c.expect(',', "','");
    } else {
      // Bare label: everything up to the comma preceding the target state.
      std::size_t eol = text.find('\n', c.pos);
      if (eol == std::string::npos) eol = text.size();
      std::size_t close = text.rfind(')', eol);
      if (close == std::string::npos || close < c.pos)
        throw ParseError("expected ')'", eol);
      std::size_t comma = text.rfind(',', close);
      if (comma == std::string::npos || comma < c.pos)
        throw ParseError("expected ','", close);
      std::size_t end = comma;
      while (end > c.pos &&
             (text[end - 1] == ' ' || text[end - 1] == '\t'))
        --end;
      label_text = text.substr(c.pos, end - c.pos);
      if (label_text.empty()) throw ParseError("empty label", c.pos);
      c.pos = comma + 1;
    }
    std::uint64_t dst = c.number("target state");
    c.expect(')', "')'");
    c.skip_spaces();
    if (!c.done()) {
      if (c.peek() != '\n')
        throw ParseError("junk after transition", c.pos);
      ++c.pos;
    }
    if (src >= n_states)
      throw ParseError("source state out of range", line_start);
    if (dst >= n_states)
      throw ParseError("target state out of range", line_start);
    Label label = Label::tau();
    if (label_text != "i") {
      try {
        label = parse_label(label_text);
      } catch (const ParseError& e) {
        throw ParseError("bad label '" + label_text + "': " + e.what(),
                         line_start);
      }
    }
    transitions.push_back(Transition{static_cast<StateId>(src), label,
                                     static_cast<StateId>(dst)});
  }
  if (transitions.size() != n_trans)
    throw ParseError("header announces " + std::to_string(n_trans) +
                         " transitions but file has " +
                         std::to_string(transitions.size()),
                     0);
  return Lts(static_cast<StateId>(n_states), static_cast<StateId>(initial),
             std::move(transitions));
}

inline Lts read_aut_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << f.rdbuf();
  return read_aut(buf.str());
}

}  // namespace bba
