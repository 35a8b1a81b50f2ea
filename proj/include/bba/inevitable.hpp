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

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bba/labels.hpp"
#include "bba/lts.hpp"
#include "bba/slicing.hpp"

namespace bba {

struct InevitabilityWitness {
  Transition trigger;          // the x-transition whose target can escape
  std::vector<Label> escape;   // labels of the escaping path from trigger.dst
  // Index into `escape` where a forever-repeatable cycle starts; npos when
  // the escape ends in a deadlock or with a forbidden event instead.
  std::size_t cycle_start = static_cast<std::size_t>(-1);
  std::string reason;          // "deadlock", "forbidden event", "cycle"

  bool is_lasso() const {
    return cycle_start != static_cast<std::size_t>(-1);
  }
};

struct InevitabilityVerdict {
  bool holds = false;
  std::optional<InevitabilityWitness> witness;
};

/// After every transition matching `x`, each maximal path must reach a
/// transition matching `z` with no `y`-matching (and not `z`-matching)
/// transition strictly before it. A state satisfies the obligation when it
/// belongs to the least fixpoint of: every outgoing edge either matches z,
/// or matches neither y nor z and leads back into the set; deadlocks and
/// z-avoiding cycles therefore escape. On failure the witness carries the
/// first offending x-transition (in canonical transition order) and a
/// shortest escaping path.
inline InevitabilityVerdict inevitable(const Lts& l, const LabelPatternSet& x,
                                       const LabelPatternSet& y,
                                       const LabelPatternSet& z) {
  IndexedLts ix(l);
  std::size_t label_count = ix.label_text.size();
  std::vector<bool> is_x(label_count), is_y(label_count), is_z(label_count);
  for (std::size_t i = 0; i < label_count; ++i) {
    is_x[i] = x.matches(ix.label_text[i]);
    is_y[i] = y.matches(ix.label_text[i]);
    is_z[i] = z.matches(ix.label_text[i]);
  }

  // Least-fixpoint attractor. pending[s] counts edges that still need their
  // destination inside the set; states with a forbidden (y and not z) edge
  // or no edge at all are out for good.
  std::vector<std::uint32_t> pending(ix.state_count, 0);
  std::vector<bool> eligible(ix.state_count, true), good(ix.state_count,
                                                         false);
  for (StateId s = 0; s < ix.state_count; ++s) {
    if (ix.out_begin[s] == ix.out_begin[s + 1]) {
      eligible[s] = false;
      continue;
    }
    for (std::uint32_t e = ix.out_begin[s]; e < ix.out_begin[s + 1]; ++e) {
      if (is_z[ix.label[e]]) continue;
      if (is_y[ix.label[e]]) {
        eligible[s] = false;
        break;
      }
      ++pending[s];
    }
  }
  // Reverse adjacency over the edges that wait on their destination.
  std::vector<std::vector<StateId>> preds(ix.state_count);
  for (StateId s = 0; s < ix.state_count; ++s) {
    if (!eligible[s]) continue;
    for (std::uint32_t e = ix.out_begin[s]; e < ix.out_begin[s + 1]; ++e)
      if (!is_z[ix.label[e]]) preds[ix.dst[e]].push_back(s);
  }
  std::vector<StateId> queue;
  for (StateId s = 0; s < ix.state_count; ++s)
    if (eligible[s] && pending[s] == 0) {
      good[s] = true;
      queue.push_back(s);
    }
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    for (StateId p : preds[queue[qi]]) {
      if (good[p]) continue;
      if (--pending[p] == 0) {
        good[p] = true;
        queue.push_back(p);
      }
    }
  }

  InevitabilityVerdict verdict;
  verdict.holds = true;
  for (std::size_t e = 0; e < ix.transition_count(); ++e) {
    if (!is_x[ix.label[e]] || good[ix.dst[e]]) continue;
    verdict.holds = false;
    InevitabilityWitness w;
    w.trigger = Transition{ix.src[e],
                           ix.label_is_tau[ix.label[e]]
                               ? Label::tau()
                               : parse_label(ix.label_text[ix.label[e]]),
                           ix.dst[e]};

    // Shortest escape: BFS from the target over neutral (neither y nor z)
    // edges through escaping states, stopping at a deadlock or at a state
    // with a forbidden edge.
    StateId start = ix.dst[e];
    constexpr std::uint32_t kNone = ~std::uint32_t{0};
    std::vector<std::uint32_t> parent_edge(ix.state_count, kNone);
    std::vector<bool> seen(ix.state_count, false);
    std::vector<StateId> bfs{start};
    seen[start] = true;
    auto label_of = [&](std::uint32_t edge) {
      return ix.label_is_tau[ix.label[edge]]
                 ? Label::tau()
                 : parse_label(ix.label_text[ix.label[edge]]);
    };
    auto path_to = [&](StateId state) {
      std::vector<Label> out;
      for (StateId at = state; at != start;) {
        std::uint32_t pe = parent_edge[at];
        out.push_back(label_of(pe));
        at = ix.src[pe];
      }
      std::reverse(out.begin(), out.end());
      return out;
    };
    bool done = false;
    for (std::size_t qi = 0; qi < bfs.size() && !done; ++qi) {
      StateId s = bfs[qi];
      if (ix.out_begin[s] == ix.out_begin[s + 1]) {
        w.escape = path_to(s);
        w.reason = "deadlock";
        done = true;
        break;
      }
      for (std::uint32_t f = ix.out_begin[s]; f < ix.out_begin[s + 1]; ++f) {
        if (is_z[ix.label[f]]) continue;
        if (is_y[ix.label[f]]) {
          w.escape = path_to(s);
          w.escape.push_back(label_of(f));
          w.reason = "forbidden event";
          done = true;
          break;
        }
        if (!good[ix.dst[f]] && !seen[ix.dst[f]]) {
          seen[ix.dst[f]] = true;
          parent_edge[ix.dst[f]] = f;
          bfs.push_back(ix.dst[f]);
        }
      }
    }
    if (!done) {
      // No deadlock and no forbidden edge in reach: the escape region is
      // closed under neutral edges, so a z-avoiding cycle exists. Walk the
      // first neutral edge into the region until a state repeats.
      std::vector<std::uint32_t> visited_at(ix.state_count, kNone);
      std::vector<Label> walk;
      StateId at = start;
      while (visited_at[at] == kNone) {
        visited_at[at] = static_cast<std::uint32_t>(walk.size());
        for (std::uint32_t f = ix.out_begin[at]; f < ix.out_begin[at + 1];
             ++f) {
          if (is_z[ix.label[f]] || is_y[ix.label[f]] || good[ix.dst[f]])
            continue;
          walk.push_back(label_of(f));
          at = ix.dst[f];
          break;
        }
      }
      w.escape = std::move(walk);
      w.cycle_start = visited_at[at];
      w.reason = "cycle";
    }
    verdict.witness = std::move(w);
    break;
  }
  return verdict;
}

}  // namespace bba
