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
#include <chrono>
#include <cstdint>
#include <set>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bba/errors.hpp"
#include "bba/log.hpp"
#include "bba/lts.hpp"
#include "bba/semantics.hpp"

namespace bba {

struct Limits {
  std::uint64_t max_states = 10'000'000;
  double max_seconds = 600.0;
};

/// Breadth-first reachability from the network's initial state. The result
/// is normalized and independent of `jobs`: workers only parallelize
/// successor computation within one BFS level, and the merge that assigns
/// state numbers walks the level in discovery order.
inline Lts generate(const ProcessNetwork& net, const Limits& lim = {},
                    unsigned jobs = 1) {
  CompiledNetwork cn = compile(net);
  auto started = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         started)
        .count();
  };

  std::vector<GlobalState> states{initial_state(cn, net)};
  std::unordered_map<std::string, StateId> index;
  index.emplace(encode_state(states[0]), 0);
  std::vector<Transition> transitions;

  std::size_t level_begin = 0;
  std::uint64_t next_report = 10000;
  while (level_begin < states.size()) {
    std::size_t level_end = states.size();
    std::vector<std::vector<SuccessorRec>> level(level_end - level_begin);
    std::size_t count = level_end - level_begin;
    if (jobs > 1 && count > 1) {
      unsigned workers = std::min<unsigned>(jobs, count);
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          for (std::size_t i = w; i < count; i += workers)
            level[i] = successors(cn, states[level_begin + i]);
        });
      }
      for (std::thread& t : pool) t.join();
    } else {
      for (std::size_t i = 0; i < count; ++i)
        level[i] = successors(cn, states[level_begin + i]);
    }
    for (std::size_t i = 0; i < count; ++i) {
      StateId src = static_cast<StateId>(level_begin + i);
      for (SuccessorRec& rec : level[i]) {
        auto [it, fresh] =
            index.emplace(rec.key, static_cast<StateId>(states.size()));
        if (fresh) states.push_back(std::move(rec.state));
        transitions.push_back(Transition{src, rec.label, it->second});
      }
    }
    level_begin = level_end;
    if (states.size() > lim.max_states)
      throw LimitError("state limit exceeded", states.size(),
                       states.size() - level_begin, elapsed());
    if (elapsed() > lim.max_seconds)
      throw LimitError("time limit exceeded", states.size(),
                       states.size() - level_begin, elapsed());
    if (states.size() >= next_report) {
      log_line(LogLevel::Info,
               "explored " + std::to_string(level_begin) + " states, " +
                   std::to_string(states.size() - level_begin) +
                   " in frontier, " + std::to_string(transitions.size()) +
                   " transitions, " + std::to_string(elapsed()) + "s");
      while (next_report <= states.size()) next_report += 10000;
    }
  }
  log_line(LogLevel::Debug, "generation done: " +
                                std::to_string(states.size()) + " states, " +
                                std::to_string(transitions.size()) +
                                " transitions, " + std::to_string(elapsed()) +
                                "s");
  return normalize(Lts(static_cast<StateId>(states.size()), 0,
                       std::move(transitions)));
}

/// BFS-shortest label sequence from the initial state to `target`.
inline std::vector<Label> trace_to(const Lts& l, StateId target) {
  if (target >= l.state_count())
    throw Error("trace target " + std::to_string(target) + " out of range");
  IndexedLts ix(l);
  constexpr std::uint32_t kNone = ~std::uint32_t{0};
  std::vector<std::uint32_t> parent_edge(l.state_count(), kNone);
  std::vector<bool> seen(l.state_count(), false);
  std::vector<StateId> queue{l.initial()};
  seen[l.initial()] = true;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    StateId s = queue[qi];
    if (s == target) break;
    for (std::uint32_t e = ix.out_begin[s]; e < ix.out_begin[s + 1]; ++e) {
      if (seen[ix.dst[e]]) continue;
      seen[ix.dst[e]] = true;
      parent_edge[ix.dst[e]] = e;
      queue.push_back(ix.dst[e]);
    }
  }
  if (!seen[target])
    throw Error("state " + std::to_string(target) +
                " is not reachable from the initial state");
  std::vector<Label> trace;
  for (StateId s = target; s != l.initial();) {
    std::uint32_t e = parent_edge[s];
    trace.push_back(ix.label_is_tau[ix.label[e]]
                        ? Label::tau()
                        : parse_label(ix.label_text[ix.label[e]]));
    s = ix.src[e];
  }
  std::reverse(trace.begin(), trace.end());
  return trace;
}

struct DeadlockReport {
  StateId state;
  std::vector<Label> trace;
};

/// Every reachable state with no outgoing transition, each with a shortest
/// trace. Unreachable states can occur in hand-written input files and have
/// no replayable trace, so they are not reported.
inline std::vector<DeadlockReport> deadlocks(const Lts& l) {
  IndexedLts ix(l);
  constexpr std::uint32_t kNone = ~std::uint32_t{0};
  std::vector<std::uint32_t> parent_edge(l.state_count(), kNone);
  std::vector<bool> seen(l.state_count(), false);
  std::vector<StateId> queue{l.initial()};
  seen[l.initial()] = true;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    StateId s = queue[qi];
    for (std::uint32_t e = ix.out_begin[s]; e < ix.out_begin[s + 1]; ++e) {
      if (seen[ix.dst[e]]) continue;
      seen[ix.dst[e]] = true;
      parent_edge[ix.dst[e]] = e;
      queue.push_back(ix.dst[e]);
    }
  }
  std::vector<DeadlockReport> out;
  for (StateId s = 0; s < l.state_count(); ++s) {
    if (ix.out_begin[s] != ix.out_begin[s + 1]) continue;
    if (!seen[s]) continue;
    DeadlockReport rep;
    rep.state = s;
    for (StateId at = s; at != l.initial();) {
      std::uint32_t e = parent_edge[at];
      rep.trace.push_back(ix.label_is_tau[ix.label[e]]
                              ? Label::tau()
                              : parse_label(ix.label_text[ix.label[e]]));
      at = ix.src[e];
    }
    std::reverse(rep.trace.begin(), rep.trace.end());
    out.push_back(std::move(rep));
  }
  return out;
}

/// Synchronous product: labels whose gate is listed in `sync_gates` need an
/// identical full label on both sides and move jointly; every other label,
/// tau included, interleaves. The result is normalized.
inline Lts product(const Lts& a, const Lts& b,
                   const std::set<std::string>& sync_gates) {
  IndexedLts ia(a), ib(b);
  auto is_synced = [&](const IndexedLts& ix, std::uint32_t lab) {
    if (ix.label_is_tau[lab]) return false;
    const std::string& text = ix.label_text[lab];
    std::size_t sp = text.find(' ');
    std::string gate = sp == std::string::npos ? text : text.substr(0, sp);
    return sync_gates.count(gate) > 0;
  };

  auto key_of = [&](StateId sa, StateId sb) {
    return (std::uint64_t{sa} << 32) | sb;
  };
  std::unordered_map<std::uint64_t, StateId> index;
  std::vector<std::pair<StateId, StateId>> pairs{{a.initial(), b.initial()}};
  index.emplace(key_of(a.initial(), b.initial()), 0);
  std::vector<Transition> transitions;

  auto lookup = [&](StateId sa, StateId sb) {
    auto [it, fresh] =
        index.emplace(key_of(sa, sb), static_cast<StateId>(pairs.size()));
    if (fresh) pairs.emplace_back(sa, sb);
    return it->second;
  };
  auto label_of = [](const IndexedLts& ix, std::uint32_t lab) {
    return ix.label_is_tau[lab] ? Label::tau()
                                : parse_label(ix.label_text[lab]);
  };

  for (std::size_t qi = 0; qi < pairs.size(); ++qi) {
    auto [sa, sb] = pairs[qi];
    StateId src = static_cast<StateId>(qi);
    for (std::uint32_t e = ia.out_begin[sa]; e < ia.out_begin[sa + 1]; ++e) {
      if (is_synced(ia, ia.label[e])) {
        for (std::uint32_t f = ib.out_begin[sb]; f < ib.out_begin[sb + 1];
             ++f) {
          if (ib.label_text[ib.label[f]] != ia.label_text[ia.label[e]])
            continue;
          if (ib.label_is_tau[ib.label[f]]) continue;
          transitions.push_back(Transition{src, label_of(ia, ia.label[e]),
                                           lookup(ia.dst[e], ib.dst[f])});
        }
      } else {
        transitions.push_back(
            Transition{src, label_of(ia, ia.label[e]), lookup(ia.dst[e], sb)});
      }
    }
    for (std::uint32_t f = ib.out_begin[sb]; f < ib.out_begin[sb + 1]; ++f) {
      if (is_synced(ib, ib.label[f])) continue;
      transitions.push_back(
          Transition{src, label_of(ib, ib.label[f]), lookup(sa, ib.dst[f])});
    }
  }
  return normalize(Lts(static_cast<StateId>(pairs.size()), 0,
                       std::move(transitions)));
}

}  // namespace bba
