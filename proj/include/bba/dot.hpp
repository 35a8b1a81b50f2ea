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

#include <string>
#include <vector>

#include "bba/lts.hpp"

namespace bba {

namespace detail {

inline std::string dot_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace detail

/// Renders the LTS as a GraphViz digraph. The initial state is pointed at by
/// an unlabeled arrow from an invisible dot; with `deadlocks_red`, states
/// without outgoing transitions are filled red.
inline std::string write_dot(const Lts& l, bool deadlocks_red = false) {
  std::vector<bool> has_out(l.state_count(), false);
  for (const Transition& t : l.transitions()) has_out[t.src] = true;

  std::string out = "digraph lts {\n";
  out += "  rankdir=LR;\n";
  out += "  node [shape=circle];\n";
  out += "  entry [shape=point, style=invis];\n";
  for (StateId s = 0; s < l.state_count(); ++s) {
    out += "  s" + std::to_string(s) + " [label=\"" + std::to_string(s) + "\"";
    if (deadlocks_red && !has_out[s])
      out += ", style=filled, fillcolor=red";
    out += "];\n";
  }
  out += "  entry -> s" + std::to_string(l.initial()) + ";\n";
  for (const Transition& t : sorted_transitions(l)) {
    out += "  s" + std::to_string(t.src) + " -> s" + std::to_string(t.dst) +
           " [label=\"" + detail::dot_escape(format_label(t.label)) + "\"];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace bba
