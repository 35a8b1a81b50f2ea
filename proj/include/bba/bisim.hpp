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
#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bba/errors.hpp"
#include "bba/labels.hpp"
#include "bba/lts.hpp"

namespace bba {

enum class Relation { Strong, Branching };

inline const char* relation_name(Relation r) {
  return r == Relation::Strong ? "strong" : "branching";
}

/// Maps every input state to its quotient state (kDropped for states that
/// were unreachable in the input and so absent from the quotient).
struct Partition {
  std::vector<StateId> block;
  StateId block_count = 0;
};

struct MinimizeResult {
  Lts lts;
  Partition partition;
};

struct EquivalenceVerdict {
  bool equal = false;
  std::uint32_t rounds = 0;
  // On distinct: labels of the distinguishing experiment, one move per
  // refinement level. Exact for Strong; for Branching the moves come from
  // the tau-closure signatures, so the trace is indicative (inert tau
  // prefixes are not spelled out).
  std::vector<Label> trace;
  std::string detail;
};

namespace detail {

// Refinement operates on a compact graph; for Branching this is the
// tau-cycle condensation of the input, for Strong the input itself.
struct RGraph {
  StateId n = 0;
  std::vector<std::uint32_t> out_begin;  // size n + 1
  std::vector<StateId> dst;
  std::vector<std::uint32_t> label;
  std::vector<std::string> label_text;
  std::vector<bool> label_is_tau;
  std::vector<StateId> topo;  // tau-topological order (Branching only)
};

inline RGraph rgraph_from(const IndexedLts& ix) {
  RGraph g;
  g.n = ix.state_count;
  g.out_begin = ix.out_begin;
  g.dst = ix.dst;
  g.label = ix.label;
  g.label_text = ix.label_text;
  g.label_is_tau = ix.label_is_tau;
  return g;
}

/// Iterative Tarjan over the tau-edge subgraph. States on a common tau
/// cycle are equivalent for the (divergence-insensitive) branching relation
/// and are contracted up front, leaving the tau edges acyclic.
inline std::vector<StateId> tau_scc(const IndexedLts& ix,
                                    StateId& scc_count) {
  constexpr StateId kNone = ~StateId{0};
  std::vector<StateId> index(ix.state_count, kNone), low(ix.state_count, 0),
      comp(ix.state_count, kNone);
  std::vector<bool> on_stack(ix.state_count, false);
  std::vector<StateId> stack;
  StateId next_index = 0;
  scc_count = 0;

  struct Frame {
    StateId v;
    std::uint32_t edge;
  };
  std::vector<Frame> call;
  for (StateId root = 0; root < ix.state_count; ++root) {
    if (index[root] != kNone) continue;
    call.push_back(Frame{root, ix.out_begin[root]});
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& fr = call.back();
      StateId v = fr.v;
      bool descended = false;
      while (fr.edge < ix.out_begin[v + 1]) {
        std::uint32_t e = fr.edge++;
        if (!ix.label_is_tau[ix.label[e]]) continue;
        StateId w = ix.dst[e];
        if (index[w] == kNone) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back(Frame{w, ix.out_begin[w]});
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;
      if (low[v] == index[v]) {
        for (;;) {
          StateId w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = scc_count;
          if (w == v) break;
        }
        ++scc_count;
      }
      call.pop_back();
      if (!call.empty())
        low[call.back().v] = std::min(low[call.back().v], low[v]);
    }
  }
  return comp;
}

/// Condenses tau cycles; intra-component tau edges vanish (inert by
/// construction), everything else is kept deduplicated. Fills `topo` with
/// the components in topological order of the remaining tau edges.
inline RGraph condense_tau(const IndexedLts& ix, std::vector<StateId>& node_of) {
  StateId scc_count = 0;
  node_of = tau_scc(ix, scc_count);

  struct Edge {
    StateId s;
    std::uint32_t lab;
    StateId d;
  };
  std::vector<Edge> edges;
  edges.reserve(ix.transition_count());
  for (std::size_t e = 0; e < ix.transition_count(); ++e) {
    StateId s = node_of[ix.src[e]], d = node_of[ix.dst[e]];
    if (ix.label_is_tau[ix.label[e]] && s == d) continue;
    edges.push_back(Edge{s, ix.label[e], d});
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.s != b.s) return a.s < b.s;
    if (a.lab != b.lab) return a.lab < b.lab;
    return a.d < b.d;
  });
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const Edge& a, const Edge& b) {
                            return a.s == b.s && a.lab == b.lab && a.d == b.d;
                          }),
              edges.end());

  RGraph g;
  g.n = scc_count;
  g.label_text = ix.label_text;
  g.label_is_tau = ix.label_is_tau;
  g.out_begin.assign(g.n + 1, 0);
  for (const Edge& e : edges) ++g.out_begin[e.s + 1];
  for (StateId s = 0; s < g.n; ++s) g.out_begin[s + 1] += g.out_begin[s];
  g.dst.reserve(edges.size());
  g.label.reserve(edges.size());
  for (const Edge& e : edges) {
    g.dst.push_back(e.d);
    g.label.push_back(e.lab);
  }

  // Kahn order over the remaining (acyclic) tau edges.
  std::vector<std::uint32_t> indeg(g.n, 0);
  for (std::size_t e = 0; e < g.dst.size(); ++e)
    if (g.label_is_tau[g.label[e]]) ++indeg[g.dst[e]];
  std::vector<StateId> queue;
  for (StateId s = 0; s < g.n; ++s)
    if (indeg[s] == 0) queue.push_back(s);
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    StateId s = queue[qi];
    g.topo.push_back(s);
    for (std::uint32_t e = g.out_begin[s]; e < g.out_begin[s + 1]; ++e)
      if (g.label_is_tau[g.label[e]] && --indeg[g.dst[e]] == 0)
        queue.push_back(g.dst[e]);
  }
  if (g.topo.size() != g.n)
    throw InternalError("tau condensation left a cycle");
  return g;
}

inline std::uint64_t sig_entry(std::uint32_t label, std::uint32_t block) {
  return (std::uint64_t{label} << 32) | block;
}

/// One signature pass. For Strong the signature of a state is its set of
/// (label, successor block) pairs; for Branching it additionally absorbs the
/// signatures reachable through inert tau steps (tau into the own block),
/// computed bottom-up in reverse tau-topological order. Non-inert tau steps
/// contribute ordinary (tau, block) entries.
inline void signature_pass(const RGraph& g, Relation rel,
                           const std::vector<std::uint32_t>& block,
                           std::vector<std::vector<std::uint64_t>>& sig) {
  sig.assign(g.n, {});
  if (rel == Relation::Strong) {
    // Every edge counts, tau included, whatever block it stays in.
    for (StateId s = 0; s < g.n; ++s) {
      std::vector<std::uint64_t>& out = sig[s];
      for (std::uint32_t e = g.out_begin[s]; e < g.out_begin[s + 1]; ++e)
        out.push_back(sig_entry(g.label[e], block[g.dst[e]]));
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
    }
    return;
  }
  for (std::size_t i = g.topo.size(); i-- > 0;) {
    StateId s = g.topo[i];
    std::vector<std::uint64_t>& out = sig[s];
    for (std::uint32_t e = g.out_begin[s]; e < g.out_begin[s + 1]; ++e) {
      if (g.label_is_tau[g.label[e]]) {
        if (block[g.dst[e]] != block[s])
          out.push_back(sig_entry(g.label[e], block[g.dst[e]]));
        else
          out.insert(out.end(), sig[g.dst[e]].begin(), sig[g.dst[e]].end());
      } else {
        out.push_back(sig_entry(g.label[e], block[g.dst[e]]));
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
}

struct RefineResult {
  std::vector<std::uint32_t> block;
  std::uint32_t block_count = 0;
  std::uint32_t rounds = 0;
  // history[r] is the partition after splitting pass r+1 (only when asked).
  std::vector<std::vector<std::uint32_t>> history;
};

/// Coarsest partition stable under the chosen signature, starting from the
/// trivial partition. Deterministic: new block numbers follow the
/// lexicographic order of (old block, signature).
inline RefineResult refine(const RGraph& g, Relation rel, bool track_history) {
  RefineResult res;
  res.block.assign(g.n, 0);
  res.block_count = g.n == 0 ? 0 : 1;
  std::vector<std::vector<std::uint64_t>> sig;
  std::vector<StateId> order(g.n);
  for (;;) {
    signature_pass(g, rel, res.block, sig);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](StateId a, StateId b) {
      if (res.block[a] != res.block[b]) return res.block[a] < res.block[b];
      return sig[a] < sig[b];
    });
    std::vector<std::uint32_t> next(g.n, 0);
    std::uint32_t count = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (i > 0 && (res.block[order[i]] != res.block[order[i - 1]] ||
                    sig[order[i]] != sig[order[i - 1]]))
        ++count;
      next[order[i]] = count;
    }
    if (g.n > 0) ++count;  // blocks = last id + 1
    if (count == res.block_count) break;
    res.block = std::move(next);
    res.block_count = count;
    ++res.rounds;
    if (track_history) res.history.push_back(res.block);
  }
  return res;
}

}  // namespace detail

/// Quotient under the coarsest strong or branching bisimulation. The
/// quotient keeps one transition per (block, label, block) triple; for
/// Branching, tau transitions inside a block (inert) are dropped. Result is
/// normalized; the partition maps input states to quotient states.
inline MinimizeResult minimize(const Lts& l, Relation rel) {
  IndexedLts ix(l);
  std::vector<StateId> node_of;
  detail::RGraph g;
  if (rel == Relation::Branching) {
    g = detail::condense_tau(ix, node_of);
  } else {
    g = detail::rgraph_from(ix);
    node_of.resize(ix.state_count);
    std::iota(node_of.begin(), node_of.end(), 0);
  }
  detail::RefineResult ref = detail::refine(g, rel, false);

  std::set<std::tuple<StateId, std::uint32_t, StateId>> edges;
  for (StateId s = 0; s < g.n; ++s) {
    for (std::uint32_t e = g.out_begin[s]; e < g.out_begin[s + 1]; ++e) {
      StateId bs = ref.block[s], bd = ref.block[g.dst[e]];
      if (rel == Relation::Branching && g.label_is_tau[g.label[e]] &&
          bs == bd)
        continue;
      edges.emplace(bs, g.label[e], bd);
    }
  }
  std::vector<Transition> transitions;
  transitions.reserve(edges.size());
  for (const auto& [bs, lab, bd] : edges)
    transitions.push_back(
        Transition{bs,
                   g.label_is_tau[lab] ? Label::tau()
                                       : parse_label(g.label_text[lab]),
                   bd});
  StateId quotient_initial = ref.block[node_of[l.initial()]];
  std::vector<StateId> renum;
  Lts quotient = normalize(
      Lts(std::max<StateId>(ref.block_count, 1), quotient_initial,
          std::move(transitions)),
      &renum);

  MinimizeResult out{std::move(quotient), Partition{}};
  out.partition.block.resize(l.state_count());
  for (StateId s = 0; s < l.state_count(); ++s)
    out.partition.block[s] = renum[ref.block[node_of[s]]];
  out.partition.block_count = out.lts.state_count();
  return out;
}

namespace detail {

/// Signature of one node with respect to an arbitrary (earlier-round)
/// partition; Branching closures are expanded iteratively with a memo so
/// deep inert tau chains cannot overflow the call stack.
inline std::vector<std::uint64_t> sig_at(const RGraph& g, Relation rel,
                                         const std::vector<std::uint32_t>& part,
                                         StateId node) {
  std::map<StateId, std::vector<std::uint64_t>> memo;
  std::vector<std::pair<StateId, bool>> stack{{node, false}};
  while (!stack.empty()) {
    auto [s, expanded] = stack.back();
    stack.pop_back();
    if (memo.count(s)) continue;
    if (!expanded && rel == Relation::Branching) {
      stack.emplace_back(s, true);
      for (std::uint32_t e = g.out_begin[s]; e < g.out_begin[s + 1]; ++e)
        if (g.label_is_tau[g.label[e]] && part[g.dst[e]] == part[s] &&
            !memo.count(g.dst[e]))
          stack.emplace_back(g.dst[e], false);
      continue;
    }
    std::vector<std::uint64_t> out;
    for (std::uint32_t e = g.out_begin[s]; e < g.out_begin[s + 1]; ++e) {
      bool inert = rel == Relation::Branching &&
                   g.label_is_tau[g.label[e]] && part[g.dst[e]] == part[s];
      if (inert) {
        const auto& inner = memo.at(g.dst[e]);
        out.insert(out.end(), inner.begin(), inner.end());
      } else {
        out.push_back(sig_entry(g.label[e], part[g.dst[e]]));
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    memo.emplace(s, std::move(out));
  }
  return memo.at(node);
}

inline Label label_from_id(const RGraph& g, std::uint32_t lab) {
  return g.label_is_tau[lab] ? Label::tau() : parse_label(g.label_text[lab]);
}

/// Distinguishing experiment from the per-round partition history: each
/// step picks a signature entry one side has and the other lacks, plays it,
/// and descends to a strictly earlier round. Ends when the opponent cannot
/// answer the chosen label at all.
inline void build_witness(const RGraph& g, Relation rel,
                          const RefineResult& ref, StateId left, StateId right,
                          EquivalenceVerdict& verdict) {
  auto part_at = [&](std::uint32_t r) -> std::vector<std::uint32_t> {
    // Round r partition; r = 0 is the trivial one.
    if (r == 0) return std::vector<std::uint32_t>(g.n, 0);
    return ref.history[r - 1];
  };
  auto diff_round = [&](StateId u, StateId v) -> std::uint32_t {
    for (std::uint32_t r = 0; r < ref.history.size(); ++r)
      if (ref.history[r][u] != ref.history[r][v]) return r + 1;
    return 0;  // equivalent
  };

  StateId u = left, v = right;
  std::uint32_t r = diff_round(u, v);
  while (r >= 1) {
    std::vector<std::uint32_t> prev = part_at(r - 1);
    std::vector<std::uint64_t> su = sig_at(g, rel, prev, u);
    std::vector<std::uint64_t> sv = sig_at(g, rel, prev, v);
    std::vector<std::uint64_t> only_u, only_v;
    std::set_difference(su.begin(), su.end(), sv.begin(), sv.end(),
                        std::back_inserter(only_u));
    std::set_difference(sv.begin(), sv.end(), su.begin(), su.end(),
                        std::back_inserter(only_v));
    bool from_u;
    std::uint64_t entry;
    if (only_u.empty() && only_v.empty())
      throw InternalError("distinguishing signatures coincide");
    if (only_v.empty() ||
        (!only_u.empty() && only_u.front() <= only_v.front())) {
      from_u = true;
      entry = only_u.front();
    } else {
      from_u = false;
      entry = only_v.front();
    }
    std::uint32_t lab = static_cast<std::uint32_t>(entry >> 32);
    std::uint32_t target_block = static_cast<std::uint32_t>(entry);
    verdict.trace.push_back(label_from_id(g, lab));

    StateId proponent = from_u ? u : v;
    StateId opponent = from_u ? v : u;

    // Concrete successor of the proponent realizing the entry. For
    // Branching, search the inert tau closure of the proponent.
    auto find_move = [&](StateId from) -> StateId {
      std::vector<StateId> todo{from};
      std::set<StateId> seen{from};
      StateId best = kDropped;
      for (std::size_t i = 0; i < todo.size(); ++i) {
        StateId s = todo[i];
        for (std::uint32_t e = g.out_begin[s]; e < g.out_begin[s + 1]; ++e) {
          bool tau = g.label_is_tau[g.label[e]];
          bool counts = rel == Relation::Strong || !tau ||
                        prev[g.dst[e]] != prev[s];
          if (g.label[e] == lab && prev[g.dst[e]] == target_block && counts)
            best = std::min(best, g.dst[e]);
          if (rel == Relation::Branching && tau &&
              prev[g.dst[e]] == prev[s] && seen.insert(g.dst[e]).second)
            todo.push_back(g.dst[e]);
        }
      }
      return best;
    };
    StateId next_u = find_move(proponent);
    if (next_u == kDropped)
      throw InternalError("signature entry without a concrete move");

    // All answers the opponent could give to the same label.
    std::vector<StateId> answers;
    {
      std::vector<StateId> todo{opponent};
      std::set<StateId> seen{opponent};
      for (std::size_t i = 0; i < todo.size(); ++i) {
        StateId s = todo[i];
        for (std::uint32_t e = g.out_begin[s]; e < g.out_begin[s + 1]; ++e) {
          bool tau = g.label_is_tau[g.label[e]];
          bool counts = rel == Relation::Strong || !tau ||
                        prev[g.dst[e]] != prev[s];
          if (g.label[e] == lab && counts) answers.push_back(g.dst[e]);
          if (rel == Relation::Branching && tau &&
              prev[g.dst[e]] == prev[s] && seen.insert(g.dst[e]).second)
            todo.push_back(g.dst[e]);
        }
      }
      std::sort(answers.begin(), answers.end());
      answers.erase(std::unique(answers.begin(), answers.end()),
                    answers.end());
    }
    if (answers.empty()) {
      verdict.detail = std::string(from_u ? "left" : "right") +
                       " side performs " +
                       format_label(verdict.trace.back()) +
                       " after the trace; the other side has no such move";
      return;
    }
    std::uint32_t best_r = r;
    StateId best_v = answers.front();
    for (StateId cand : answers) {
      std::uint32_t dr = diff_round(next_u, cand);
      if (dr != 0 && dr < best_r) {
        best_r = dr;
        best_v = cand;
      }
    }
    u = next_u;
    v = best_v;
    r = diff_round(u, v);
  }
  verdict.detail = "sides disagree on the class reached by " +
                   format_label(verdict.trace.back()) + " after the trace";
}

inline Lts disjoint_union(const Lts& a, const Lts& b, StateId& shift) {
  shift = a.state_count();
  std::vector<Transition> ts = a.transitions();
  for (const Transition& t : b.transitions())
    ts.push_back(Transition{t.src + shift, t.label, t.dst + shift});
  return Lts(a.state_count() + b.state_count(), a.initial(), std::move(ts));
}

}  // namespace detail

/// Refines the disjoint union of both inputs; equal iff the two initial
/// states land in one block. On distinct, the verdict carries the number of
/// refinement rounds and a distinguishing trace (see EquivalenceVerdict).
inline EquivalenceVerdict equivalent(const Lts& a, const Lts& b,
                                     Relation rel) {
  StateId shift = 0;
  Lts u = detail::disjoint_union(a, b, shift);
  IndexedLts ix(u);
  std::vector<StateId> node_of;
  detail::RGraph g;
  if (rel == Relation::Branching) {
    g = detail::condense_tau(ix, node_of);
  } else {
    g = detail::rgraph_from(ix);
    node_of.resize(ix.state_count);
    std::iota(node_of.begin(), node_of.end(), 0);
  }
  detail::RefineResult ref = detail::refine(g, rel, false);
  StateId left = node_of[a.initial()];
  StateId right = node_of[shift + b.initial()];
  EquivalenceVerdict verdict;
  verdict.rounds = ref.rounds;
  verdict.equal = ref.block[left] == ref.block[right];
  if (verdict.equal) return verdict;
  // Re-run with history only now that a diagnostic is needed.
  detail::RefineResult traced = detail::refine(g, rel, true);
  detail::build_witness(g, rel, traced, left, right, verdict);
  return verdict;
}

/// Greatest-fixpoint oracle by naive iteration over the full relation
/// lattice; limited to 64 combined states. Produces no diagnostics.
inline EquivalenceVerdict brute_force_equivalent(const Lts& a, const Lts& b,
                                                 Relation rel) {
  StateId shift = 0;
  Lts u = detail::disjoint_union(a, b, shift);
  StateId n = u.state_count();
  if (n > 64)
    throw Error("brute-force equivalence is limited to 64 combined states, "
                "got " +
                std::to_string(n));
  IndexedLts ix(u);

  // Reflexive-transitive tau closure, one bitset row per state.
  std::vector<std::uint64_t> closure(n, 0);
  for (StateId s = 0; s < n; ++s) closure[s] = std::uint64_t{1} << s;
  bool grew = true;
  while (grew) {
    grew = false;
    for (StateId s = 0; s < n; ++s)
      for (std::uint32_t e = ix.out_begin[s]; e < ix.out_begin[s + 1]; ++e) {
        if (!ix.label_is_tau[ix.label[e]]) continue;
        std::uint64_t merged = closure[s] | closure[ix.dst[e]];
        if (merged != closure[s]) {
          closure[s] = merged;
          grew = true;
        }
      }
  }

  std::vector<std::uint64_t> rel_bits(n, (n == 64) ? ~std::uint64_t{0}
                                                   : (std::uint64_t{1} << n) -
                                                         1);
  auto related = [&](StateId x, StateId y) {
    return (rel_bits[x] >> y & 1) != 0;
  };
  // One-directional transfer check: every move of x is answered by y.
  auto simulated = [&](StateId x, StateId y) {
    for (std::uint32_t e = ix.out_begin[x]; e < ix.out_begin[x + 1]; ++e) {
      std::uint32_t lab = ix.label[e];
      StateId xd = ix.dst[e];
      bool ok = false;
      if (rel == Relation::Strong) {
        for (std::uint32_t f = ix.out_begin[y]; f < ix.out_begin[y + 1]; ++f)
          if (ix.label[f] == lab && related(xd, ix.dst[f])) {
            ok = true;
            break;
          }
      } else {
        if (ix.label_is_tau[lab] && related(xd, y)) ok = true;
        for (StateId mid = 0; mid < n && !ok; ++mid) {
          if (!(closure[y] >> mid & 1) || !related(x, mid)) continue;
          for (std::uint32_t f = ix.out_begin[mid];
               f < ix.out_begin[mid + 1]; ++f)
            if (ix.label[f] == lab && related(xd, ix.dst[f])) {
              ok = true;
              break;
            }
        }
      }
      if (!ok) return false;
    }
    return true;
  };

  EquivalenceVerdict verdict;
  bool changed = true;
  while (changed) {
    changed = false;
    ++verdict.rounds;
    for (StateId x = 0; x < n; ++x) {
      for (StateId y = 0; y < n; ++y) {
        if (!related(x, y)) continue;
        if (!simulated(x, y) || !simulated(y, x)) {
          rel_bits[x] &= ~(std::uint64_t{1} << y);
          changed = true;
        }
      }
    }
  }
  verdict.equal = related(u.initial(), shift + b.initial());
  return verdict;
}

}  // namespace bba
