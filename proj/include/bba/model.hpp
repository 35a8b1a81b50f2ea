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

#include <json.hpp>

#include "bba/errors.hpp"
#include "bba/labels.hpp"
#include "bba/network.hpp"
#include "bba/process.hpp"
#include "bba/values.hpp"

namespace bba {

enum class Style { Recursive, Loop };

inline const char* style_name(Style s) {
  return s == Style::Recursive ? "rec" : "loop";
}

/// Model parameters. `c` (committee size) is documentation only: committee
/// membership is drawn per node per step with probability `pv`, so `c`
/// never constrains the generated behavior.
struct Config {
  int n = 4;
  int h = 4;
  int t = 3;
  int c = 3;
  ProbTicks pv = 7500;
  ProbTicks ph = 7424;
  Style style = Style::Recursive;
};

inline void validate_config(const Config& cfg) {
  if (cfg.n < 1) throw ConfigError("n must be at least 1");
  if (cfg.h < 0 || cfg.h > cfg.n)
    throw ConfigError("h must lie in 0..n, got " + std::to_string(cfg.h));
  if (cfg.t < 1 || cfg.t > cfg.n)
    throw ConfigError("t must lie in 1..n, got " + std::to_string(cfg.t));
  if (cfg.c < 0) throw ConfigError("c must be nonnegative");
  if (cfg.pv <= 0 || cfg.pv >= kProbOne)
    throw ConfigError("pv must lie strictly between 0 and 1");
  if (cfg.ph <= 0 || cfg.ph >= kProbOne)
    throw ConfigError("ph must lie strictly between 0 and 1");
}

/// Reads a JSON object with the Config field names in lower case;
/// probabilities are decimal strings ("0.75") to keep ingestion exact.
/// Fields not present keep the values already in `base`.
inline Config config_from_json(const std::string& text, Config base = {}) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "n")
        base.n = value.get<int>();
      else if (key == "h")
        base.h = value.get<int>();
      else if (key == "t")
        base.t = value.get<int>();
      else if (key == "c")
        base.c = value.get<int>();
      else if (key == "pv")
        base.pv = parse_prob(value.get<std::string>());
      else if (key == "ph")
        base.ph = parse_prob(value.get<std::string>());
      else if (key == "style") {
        std::string s = value.get<std::string>();
        if (s == "rec")
          base.style = Style::Recursive;
        else if (s == "loop")
          base.style = Style::Loop;
        else
          throw ConfigError("style must be \"rec\" or \"loop\", got \"" + s +
                            "\"");
      } else {
        throw ConfigError("unknown config field \"" + key + "\"");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config field \"" + key + "\": " + e.what());
    }
  }
  validate_config(base);
  return base;
}

// ---------------------------------------------------------------------------
// Morality and the step decision table.
// ---------------------------------------------------------------------------

enum class Morality { Honest, Malicious, Disguised };

/// Nodes with the lowest ids are honest. The rest attack exactly in rounds
/// whose proposed block carries bit one and stay neutral otherwise.
inline Morality morality(int id, int blk, const Config& cfg) {
  if (id <= cfg.h) return Morality::Honest;
  return blk == 1 ? Morality::Malicious : Morality::Disguised;
}

struct Decision {
  enum class Kind { CommitProposed, CommitEmpty, Continue, Flip };
  Kind kind;
  int bit = 0;
  int next_step = 0;
};

namespace detail {

// Row tests are evaluated top to bottom within a step; the committing
// threshold is tested first at steps 0 and 1, and k0 before k1 at step 2.
struct DecisionRow {
  int step;
  int test;  // 0: k0 >= t, 1: k1 >= t, 2: otherwise
  Decision::Kind kind;
  int bit;
  int next_step;
};

inline const std::vector<DecisionRow>& decision_table() {
  static const std::vector<DecisionRow> rows = {
      {0, 0, Decision::Kind::CommitProposed, 0, 0},
      {0, 1, Decision::Kind::Continue, 1, 1},
      {0, 2, Decision::Kind::Continue, 0, 1},
      {1, 1, Decision::Kind::CommitEmpty, 0, 0},
      {1, 0, Decision::Kind::Continue, 0, 2},
      {1, 2, Decision::Kind::Continue, 1, 2},
      {2, 0, Decision::Kind::Continue, 0, 0},
      {2, 1, Decision::Kind::Continue, 1, 0},
      {2, 2, Decision::Kind::Flip, 0, 0},
  };
  return rows;
}

}  // namespace detail

/// Vote outcome for one node at step `s` given the tallies. Total on
/// s ∈ {0,1,2}; commitment is only possible at the step privileging the
/// matching bit.
inline Decision decide(int s, int k0, int k1, int t) {
  for (const detail::DecisionRow& row : detail::decision_table()) {
    if (row.step != s) continue;
    bool hit = row.test == 0 ? k0 >= t : row.test == 1 ? k1 >= t : true;
    if (hit) return Decision{row.kind, row.bit, row.next_step};
  }
  throw InternalError("decide: step out of range: " + std::to_string(s));
}

inline ProbTicks one_minus(ProbTicks p) { return kProbOne - p; }

// ---------------------------------------------------------------------------
// Process terms.
// ---------------------------------------------------------------------------

/// Per-node vote counter: accepts the owner's vote (SELF_PROPAGATE), other
/// nodes' broadcast votes (PROPAGATE), and hands out both tallies on TALLY,
/// resetting them. Increments refuse once the sum reaches n, which keeps
/// the counter finite in isolation.
inline TermPtr counter_term(int id, const Config& cfg) {
  std::vector<Value> bits{Value::bit(0), Value::bit(1)};
  std::vector<Value> other_pids;
  for (int j = 1; j <= cfg.n; ++j)
    if (j != id) other_pids.push_back(Value::pid(j));

  auto room = only_if(lt(add(var("K0"), var("K1")), cst(Value::count(cfg.n))));
  auto bump = if_case(var("B"), {arm(Value::bit(0),
                                     assign("K0", add(var("K0"),
                                                      cst(Value::count(1))))),
                                 arm_default(assign(
                                     "K1", add(var("K1"),
                                               cst(Value::count(1)))))});

  std::vector<TermPtr> branches;
  branches.push_back(seq({room, emit(kGateSelfPropagate,
                                     {send(Value::pid(id)),
                                      bind("B", bits)}),
                          bump}));
  if (!other_pids.empty())
    branches.push_back(seq({room, emit(kGatePropagate,
                                       {bind("J", other_pids),
                                        bind("B", bits)}),
                            bump}));
  branches.push_back(seq({emit(kGateTally, {send(Value::pid(id)),
                                            send(var("K0")),
                                            send(var("K1"))}),
                          assign("K0", Value::count(0)),
                          assign("K1", Value::count(0))}));
  return loop("serve", alt(std::move(branches)));
}

namespace detail {

inline TermPtr set_bit_emit(int id, ExprPtr step_expr, ExprPtr bit_expr) {
  return emit(kGateSetBit, {send(Value::pid(id)), send(std::move(step_expr)),
                            send(std::move(bit_expr))});
}

/// B := 1 when attacking, the given bit otherwise.
inline TermPtr assign_bit_or_attack(const std::string& target,
                                    ExprPtr honest_value) {
  return if_case(var("ATT"),
                 {arm(Value::bit(1), assign(target, Value::bit(1))),
                  arm_default(assign(target, std::move(honest_value)))});
}

/// Committee phase: either selected (P_IN) — cast the vote to the own
/// counter and broadcast it — or passed over (P_OUT).
inline TermPtr committee_alt(int id, const Config& cfg) {
  TermPtr selected =
      seq({emit(kGatePIn, {send(Value::pid(id)),
                           send(Value::prob(cfg.pv))}),
           assign_bit_or_attack("VOTE", var("B")),
           emit(kGateSelfPropagate,
                {send(Value::pid(id)), send(var("VOTE"))}),
           emit(kGatePropagate, {send(Value::pid(id)), send(var("VOTE"))})});
  TermPtr passed = emit(kGatePOut, {send(Value::pid(id)),
                                    send(Value::prob(one_minus(cfg.pv)))});
  return alt({std::move(selected), std::move(passed)});
}

/// The probabilistic coin: attackers force bit one silently; honest nodes
/// observably draw zero with probability `p`.
inline TermPtr coin_body(int id, ExprPtr p_expr, ExprPtr one_minus_p_expr) {
  return if_case(
      var("ATT"),
      {arm(Value::bit(1), assign("B", Value::bit(1))),
       arm_default(alt(
           {seq({emit(kGatePZero,
                      {send(Value::pid(id)), send(std::move(p_expr))}),
                 assign("B", Value::bit(0))}),
            seq({emit(kGatePOne, {send(Value::pid(id)),
                                  send(std::move(one_minus_p_expr))}),
                 assign("B", Value::bit(1))})}))});
}

inline TermPtr attack_flag_assign(int id, const Config& cfg) {
  // Static per node: honest ids never attack; the rest attack exactly when
  // the received block carries bit one.
  if (id <= cfg.h) return assign("ATT", Value::bit(0));
  return assign("ATT", var("BLK"));
}

inline const std::vector<Value>& bit_domain() {
  static const std::vector<Value> bits{Value::bit(0), Value::bit(1)};
  return bits;
}

inline std::vector<Value> count_domain(int n) {
  std::vector<Value> counts;
  for (int k = 0; k <= n; ++k) counts.push_back(Value::count(k));
  return counts;
}

/// Shared per-step dispatch: one arm per decision-table row, guarded by the
/// row's threshold test; `body(row)` supplies the style-specific outcome.
template <typename RowBody>
inline TermPtr decision_dispatch(const Config& cfg, ExprPtr step_expr,
                                 RowBody body) {
  std::vector<IfArm> arms;
  for (const DecisionRow& row : decision_table()) {
    Value pattern = Value::step(row.step);
    if (row.test == 2) {
      arms.push_back(arm(pattern, body(row)));
    } else {
      Cond guard = ge(var(row.test == 0 ? "K0" : "K1"),
                      cst(Value::count(cfg.t)));
      arms.push_back(arm(pattern, guard, body(row)));
    }
  }
  return if_case(std::move(step_expr), std::move(arms));
}

inline Program node_program_loop(int id, const Config& cfg) {
  auto flip = [&](int step, ProbTicks p) {
    return seq({assign("S", Value::step(step)),
                coin_body(id, cst(Value::prob(p)),
                          cst(Value::prob(one_minus(p)))),
                set_bit_emit(id, var("S"), var("B"))});
  };
  auto fix = [&](int bit, int step) {
    return seq({assign_bit_or_attack("B", cst(Value::bit(bit))),
                assign("S", Value::step(step)),
                set_bit_emit(id, var("S"), var("B"))});
  };
  TermPtr dispatch = decision_dispatch(
      cfg, var("S"), [&](const DecisionRow& row) -> TermPtr {
        switch (row.kind) {
          case Decision::Kind::CommitProposed:
            return seq({emit(kGateCommitProposed), brk("vote")});
          case Decision::Kind::CommitEmpty:
            return seq({emit(kGateCommitEmpty), brk("vote")});
          case Decision::Kind::Continue:
            return fix(row.bit, row.next_step);
          case Decision::Kind::Flip:
            return flip(row.next_step, 5000);
        }
        throw InternalError("unreachable decision row");
      });

  TermPtr vote_loop =
      loop("vote", seq({emit(kGateSync, {send(Value::tag_begin())}),
                        committee_alt(id, cfg),
                        emit(kGateSync, {send(Value::tag_end())}),
                        emit(kGateTally, {send(Value::pid(id)),
                                          bind("K0", count_domain(cfg.n)),
                                          bind("K1", count_domain(cfg.n))}),
                        std::move(dispatch)}));

  TermPtr round =
      seq({emit(kGateReceive, {bind("BLK", bit_domain())}),
           attack_flag_assign(id, cfg), flip(0, cfg.ph),
           std::move(vote_loop)});
  ProcessDef main{"MAIN", {}, loop("round", std::move(round))};
  return Program{{std::move(main)}};
}

inline Program node_program_rec(int id, const Config& cfg) {
  // Tail-call unfolding of the loop style. Values cross process borders
  // only through parameters.
  ProcessDef entry{
      "N",
      {},
      seq({emit(kGateReceive, {bind("BLK", bit_domain())}),
           attack_flag_assign(id, cfg),
           call("NP", {var("ATT"), cst(Value::step(0)),
                       cst(Value::prob(cfg.ph))})})};

  ProcessDef flip{
      "NP",
      {"ATT", "S", "P"},
      seq({coin_body(id, var("P"), one_minus_expr(var("P"))),
           set_bit_emit(id, var("S"), var("B")),
           call("NV", {var("ATT"), var("S"), var("B")})})};

  ProcessDef votephase{
      "NV",
      {"ATT", "S", "B"},
      seq({emit(kGateSync, {send(Value::tag_begin())}),
           committee_alt(id, cfg),
           emit(kGateSync, {send(Value::tag_end())}),
           call("NT", {var("ATT"), var("S")})})};

  TermPtr dispatch = decision_dispatch(
      cfg, var("S"), [&](const DecisionRow& row) -> TermPtr {
        switch (row.kind) {
          case Decision::Kind::CommitProposed:
            return seq({emit(kGateCommitProposed), call("N")});
          case Decision::Kind::CommitEmpty:
            return seq({emit(kGateCommitEmpty), call("N")});
          case Decision::Kind::Continue:
            return call("NF", {var("ATT"), cst(Value::bit(row.bit)),
                               cst(Value::step(row.next_step))});
          case Decision::Kind::Flip:
            return call("NP", {var("ATT"), cst(Value::step(row.next_step)),
                               cst(Value::prob(5000))});
        }
        throw InternalError("unreachable decision row");
      });
  ProcessDef tally{
      "NT",
      {"ATT", "S"},
      seq({emit(kGateTally, {send(Value::pid(id)),
                             bind("K0", count_domain(cfg.n)),
                             bind("K1", count_domain(cfg.n))}),
           std::move(dispatch)})};

  ProcessDef fix{
      "NF",
      {"ATT", "FB", "S"},
      seq({assign_bit_or_attack("B", var("FB")),
           set_bit_emit(id, var("S"), var("B")),
           call("NV", {var("ATT"), var("S"), var("B")})})};

  return Program{{std::move(entry), std::move(flip), std::move(votephase),
                  std::move(tally), std::move(fix)}};
}

}  // namespace detail

/// One node's behavior in the chosen style. Both styles expose identical
/// visible behavior; only their control encoding differs.
inline Program node_program(int id, const Config& cfg) {
  return cfg.style == Style::Loop ? detail::node_program_loop(id, cfg)
                                  : detail::node_program_rec(id, cfg);
}

/// The full network: n node instances, n counter instances, and the
/// synchronization discipline. Barriers and commits involve every node;
/// casting and tallying pair a node with its own counter; a broadcast
/// synchronizes the voter with all other counters; coin, committee, and
/// bit events are local to one node.
inline ProcessNetwork build_network(const Config& cfg) {
  validate_config(cfg);
  ProcessNetwork net;
  for (int id = 1; id <= cfg.n; ++id) {
    Instance inst;
    inst.name = "NODE" + std::to_string(id);
    inst.program = node_program(id, cfg);
    net.instances.push_back(std::move(inst));
  }
  for (int id = 1; id <= cfg.n; ++id) {
    Instance inst;
    inst.name = "CNT" + std::to_string(id);
    inst.program = Program{{ProcessDef{"COUNTER", {}, counter_term(id, cfg)}}};
    inst.initial.emplace("K0", Value::count(0));
    inst.initial.emplace("K1", Value::count(0));
    net.instances.push_back(std::move(inst));
  }

  std::vector<std::uint32_t> all_nodes;
  for (int id = 1; id <= cfg.n; ++id)
    all_nodes.push_back(static_cast<std::uint32_t>(id - 1));
  auto node_index = [&](int id) { return static_cast<std::uint32_t>(id - 1); };
  auto counter_index = [&](int id) {
    return static_cast<std::uint32_t>(cfg.n + id - 1);
  };

  for (const char* gate : {kGateSync, kGateReceive, kGateCommitProposed,
                           kGateCommitEmpty})
    net.sync_table.emplace(gate, GateRule::fixed(all_nodes));

  std::map<Value, std::vector<std::uint32_t>> pair_rule, broadcast_rule,
      local_rule;
  for (int id = 1; id <= cfg.n; ++id) {
    pair_rule[Value::pid(id)] = {node_index(id), counter_index(id)};
    std::vector<std::uint32_t> others{node_index(id)};
    for (int j = 1; j <= cfg.n; ++j)
      if (j != id) others.push_back(counter_index(j));
    broadcast_rule[Value::pid(id)] = std::move(others);
    local_rule[Value::pid(id)] = {node_index(id)};
  }
  for (const char* gate : {kGateSelfPropagate, kGateTally})
    net.sync_table.emplace(gate, GateRule::by_first_offer(pair_rule));
  net.sync_table.emplace(kGatePropagate,
                         GateRule::by_first_offer(broadcast_rule));
  for (const char* gate : {kGateSetBit, kGatePIn, kGatePOut, kGatePZero,
                           kGatePOne})
    net.sync_table.emplace(gate, GateRule::by_first_offer(local_rule));
  return net;
}

}  // namespace bba
