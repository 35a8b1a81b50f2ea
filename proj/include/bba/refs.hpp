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

#include "bba/errors.hpp"
#include "bba/explore.hpp"
#include "bba/labels.hpp"
#include "bba/lts.hpp"
#include "bba/network.hpp"
#include "bba/process.hpp"
#include "bba/slicing.hpp"
#include "bba/values.hpp"

namespace bba {

/// Strict alternation of the two barrier phases.
inline Lts ref_sync() {
  std::vector<Transition> ts = {
      {0, Label(kGateSync, {Value::tag_begin()}), 1},
      {1, Label(kGateSync, {Value::tag_end()}), 0},
  };
  return normalize(Lts(2, 0, std::move(ts)));
}

/// Cyclic n-dimensional hypercube of tallying: each of the n nodes queries
/// its counter exactly once per step, in any interleaving; once all have,
/// the next step begins. States are the proper subsets of {1..n} (the full
/// set folds back to the empty one), encoded as bitmasks.
inline Lts ref_hypercube(int n) {
  if (n < 1) throw Error("ref_hypercube requires n >= 1");
  if (n > 20) throw Error("ref_hypercube: n too large");
  std::uint32_t full = (std::uint32_t{1} << n) - 1;
  std::vector<Transition> ts;
  for (std::uint32_t set = 0; set < full; ++set) {
    for (int i = 1; i <= n; ++i) {
      std::uint32_t bit = std::uint32_t{1} << (i - 1);
      if (set & bit) continue;
      std::uint32_t next = set | bit;
      if (next == full) next = 0;
      ts.push_back({set,
                    Label(kGateTally, {Value::pid(i), Value::abstract("X"),
                                       Value::abstract("X")}),
                    next});
    }
  }
  return normalize(Lts(full, 0, std::move(ts)));
}

/// Interleaved per-step voting pattern: every node takes a hidden setup
/// step, then either stays silent or casts (one more hidden step followed
/// by the visible cast), and the round restarts once all are done. The
/// hidden steps are real gates during construction and hidden afterwards,
/// so the result genuinely contains tau transitions.
inline Lts ref_selfprop(int n) {
  if (n < 1) throw Error("ref_selfprop requires n >= 1");
  ProcessNetwork net;
  std::vector<std::uint32_t> everyone;
  for (int i = 1; i <= n; ++i) {
    std::string stage = "STAGE" + std::to_string(i);
    std::string idle = "IDLE" + std::to_string(i);
    std::string pick = "PICK" + std::to_string(i);
    TermPtr body = seq(
        {emit(stage),
         alt({emit(idle),
              seq({emit(pick),
                   emit(kGateSelfPropagate,
                        {send(Value::pid(i)), send(Value::abstract("X"))})})}),
         emit("ROUND_END")});
    Instance inst;
    inst.name = "P" + std::to_string(i);
    inst.program =
        Program{{ProcessDef{"VOTER", {}, loop("rounds", std::move(body))}}};
    net.instances.push_back(std::move(inst));

    std::uint32_t self = static_cast<std::uint32_t>(i - 1);
    net.sync_table.emplace(stage, GateRule::fixed({self}));
    net.sync_table.emplace(idle, GateRule::fixed({self}));
    net.sync_table.emplace(pick, GateRule::fixed({self}));
    everyone.push_back(self);
  }
  net.sync_table.emplace("ROUND_END", GateRule::fixed(everyone));
  std::map<Value, std::vector<std::uint32_t>> local;
  for (int i = 1; i <= n; ++i)
    local[Value::pid(i)] = {static_cast<std::uint32_t>(i - 1)};
  net.sync_table.emplace(kGateSelfPropagate, GateRule::by_first_offer(local));

  Lts full = generate(net);
  return normalize(keep(full, {"SELF_PROPAGATE !.*"}));
}

/// Upper-level consensus interface: a received block is either accepted
/// (proposed commit) or rejected (empty commit); under corruption, blocks
/// carrying bit one are only ever rejected.
inline Lts ref_interface(bool corrupted) {
  Label r0(kGateReceive, {Value::bit(0)});
  Label r1(kGateReceive, {Value::bit(1)});
  Label accept(kGateCommitProposed, {});
  Label reject(kGateCommitEmpty, {});
  std::vector<Transition> ts = {
      {0, r0, 1}, {0, r1, 2}, {1, accept, 0}, {1, reject, 0}, {2, reject, 0},
  };
  if (!corrupted) ts.push_back({2, accept, 0});
  return normalize(Lts(3, 0, std::move(ts)));
}

}  // namespace bba
