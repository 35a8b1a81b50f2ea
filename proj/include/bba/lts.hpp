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
#include <cstdint>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bba/errors.hpp"
#include "bba/labels.hpp"

namespace bba {

using StateId = std::uint32_t;

struct Transition {
  StateId src;
  Label label;
  StateId dst;

  friend bool operator==(const Transition& a, const Transition& b) {
    return a.src == b.src && a.dst == b.dst && a.label == b.label;
  }
};

/// A finite labelled transition system with a designated initial state.
/// States are dense indices 0..state_count-1.
class Lts {
 public:
  Lts(StateId state_count, StateId initial, std::vector<Transition> transitions)
      : state_count_(state_count),
        initial_(initial),
        transitions_(std::move(transitions)) {
    if (state_count_ == 0) throw InternalError("LTS must have a state");
    if (initial_ >= state_count_)
      throw InternalError("initial state out of range");
    for (const Transition& t : transitions_)
      if (t.src >= state_count_ || t.dst >= state_count_)
        throw InternalError("transition endpoint out of range");
  }

  StateId state_count() const { return state_count_; }
  StateId initial() const { return initial_; }
  const std::vector<Transition>& transitions() const { return transitions_; }

 private:
  StateId state_count_;
  StateId initial_;
  std::vector<Transition> transitions_;
};

struct Stats {
  std::uint64_t states = 0;
  std::uint64_t transitions = 0;
  std::uint64_t distinct_visible_labels = 0;
  std::uint64_t tau_transitions = 0;
  std::uint64_t deadlock_states = 0;

  friend bool operator==(const Stats& a, const Stats& b) {
    return a.states == b.states && a.transitions == b.transitions &&
           a.distinct_visible_labels == b.distinct_visible_labels &&
           a.tau_transitions == b.tau_transitions &&
           a.deadlock_states == b.deadlock_states;
  }
};

inline Stats stats(const Lts& l) {
  Stats s;
  s.states = l.state_count();
  s.transitions = l.transitions().size();
  std::set<std::string> visible;
  std::vector<bool> has_out(l.state_count(), false);
  for (const Transition& t : l.transitions()) {
    has_out[t.src] = true;
    if (t.label.is_tau())
      ++s.tau_transitions;
    else
      visible.insert(format_label(t.label));
  }
  s.distinct_visible_labels = visible.size();
  for (bool b : has_out)
    if (!b) ++s.deadlock_states;
  return s;
}

/// A label-interned, adjacency-indexed view of an Lts, shared by the
/// analysis algorithms. Label id 0 is reserved for tau when present.
struct IndexedLts {
  StateId state_count = 0;
  StateId initial = 0;
  std::vector<std::string> label_text;  // by label id
  std::vector<bool> label_is_tau;       // by label id
  // Transitions sorted by (src, label text, dst); out[s] is the half-open
  // range of indexes with source s.
  std::vector<StateId> src, dst;
  std::vector<std::uint32_t> label;
  std::vector<std::uint32_t> out_begin;  // size state_count + 1

  std::size_t transition_count() const { return src.size(); }

  explicit IndexedLts(const Lts& l) {
    state_count = l.state_count();
    initial = l.initial();
    std::unordered_map<std::string, std::uint32_t> intern;
    struct Row {
      StateId s;
      std::uint32_t lab;
      StateId d;
      const std::string* text;
    };
    std::vector<std::string> texts;
    texts.reserve(l.transitions().size());
    for (const Transition& t : l.transitions())
      texts.push_back(format_label(t.label));
    std::vector<Row> rows;
    rows.reserve(l.transitions().size());
    for (std::size_t i = 0; i < l.transitions().size(); ++i) {
      const Transition& t = l.transitions()[i];
      auto [it, fresh] = intern.emplace(texts[i], label_text.size());
      if (fresh) {
        label_text.push_back(texts[i]);
        label_is_tau.push_back(t.label.is_tau());
      }
      rows.push_back(Row{t.src, it->second, t.dst, &texts[i]});
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      if (a.s != b.s) return a.s < b.s;
      if (*a.text != *b.text) return *a.text < *b.text;
      return a.d < b.d;
    });
    src.reserve(rows.size());
    label.reserve(rows.size());
    dst.reserve(rows.size());
    out_begin.assign(state_count + 1, 0);
    for (const Row& r : rows) {
      src.push_back(r.s);
      label.push_back(r.lab);
      dst.push_back(r.d);
      ++out_begin[r.s + 1];
    }
    for (StateId s = 0; s < state_count; ++s) out_begin[s + 1] += out_begin[s];
  }
};

/// Drops states unreachable from the initial state, renumbers the rest in
/// BFS order (per-state successors visited by canonical label text, ties by
/// the dst index in the input numbering), deduplicates transitions, and
/// sorts them by (src, label text, dst). Idempotent. When `renum_out` is
/// given it receives the old-to-new state map, kDropped for states the
/// renumbering removed.
inline constexpr StateId kDropped = ~StateId{0};

inline Lts normalize(const Lts& l, std::vector<StateId>* renum_out = nullptr) {
  struct Edge {
    std::string text;
    StateId dst;
    std::size_t index;  // into l.transitions()
  };
  std::vector<std::vector<Edge>> adj(l.state_count());
  for (std::size_t i = 0; i < l.transitions().size(); ++i) {
    const Transition& t = l.transitions()[i];
    adj[t.src].push_back(Edge{format_label(t.label), t.dst, i});
  }
  for (auto& edges : adj)
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
      if (a.text != b.text) return a.text < b.text;
      return a.dst < b.dst;
    });

  constexpr StateId kUnseen = kDropped;
  std::vector<StateId> renum(l.state_count(), kUnseen);
  std::vector<StateId> order;
  order.reserve(l.state_count());
  renum[l.initial()] = 0;
  order.push_back(l.initial());
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (const Edge& e : adj[order[head]]) {
      if (renum[e.dst] == kUnseen) {
        renum[e.dst] = static_cast<StateId>(order.size());
        order.push_back(e.dst);
      }
    }
  }

  std::vector<Transition> out;
  out.reserve(l.transitions().size());
  for (StateId old : order)
    for (const Edge& e : adj[old])
      out.push_back(Transition{renum[old], l.transitions()[e.index].label,
                               renum[e.dst]});
  std::sort(out.begin(), out.end(), [](const Transition& a, const Transition& b) {
    if (a.src != b.src) return a.src < b.src;
    std::string ta = format_label(a.label), tb = format_label(b.label);
    if (ta != tb) return ta < tb;
    return a.dst < b.dst;
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Transition& a, const Transition& b) {
                          return a == b;
                        }),
            out.end());
  if (renum_out) *renum_out = std::move(renum);
  return Lts(static_cast<StateId>(order.size()), 0, std::move(out));
}

/// Sorts by (src, label text, dst) without renumbering; used by writers.
inline std::vector<Transition> sorted_transitions(const Lts& l) {
  std::vector<Transition> out = l.transitions();
  std::sort(out.begin(), out.end(),
            [](const Transition& a, const Transition& b) {
              if (a.src != b.src) return a.src < b.src;
              std::string ta = format_label(a.label), tb = format_label(b.label);
              if (ta != tb) return ta < tb;
              return a.dst < b.dst;
            });
  return out;
}

}  // namespace bba
