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
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bba/process.hpp"

namespace bba {

/// One sequential process definition. Parameters are ordinary variables that
/// a Call (or the instance's initial valuation, for the entry process)
/// assigns before the body runs.
struct ProcessDef {
  std::string name;
  std::vector<std::string> params;
  TermPtr body;
};

/// The code of one instance: a list of process definitions, entered at the
/// first one. Calls may only target processes of the same program.
struct Program {
  std::vector<ProcessDef> processes;
};

/// A named instance of a Program plus initial values for entry-process
/// variables.
struct Instance {
  std::string name;
  Program program;
  std::map<std::string, Value> initial;
};

/// Which instances take part in a synchronization on a gate. Either a fixed
/// set, or a set selected by the agreed value of the gate's first offer
/// (how the model expresses ownership by node identity).
struct GateRule {
  static GateRule fixed(std::vector<std::uint32_t> participants) {
    GateRule r;
    r.keyed_by_first_offer = false;
    r.participants = std::move(participants);
    return r;
  }
  static GateRule by_first_offer(
      std::map<Value, std::vector<std::uint32_t>> table) {
    GateRule r;
    r.keyed_by_first_offer = true;
    r.by_value = std::move(table);
    return r;
  }

  bool keyed_by_first_offer = false;
  std::vector<std::uint32_t> participants;          // when not keyed
  std::map<Value, std::vector<std::uint32_t>> by_value;  // when keyed
};

/// A closed network: an ordered list of instances plus one participation
/// rule per gate. Every gate any instance emits must have exactly one entry.
struct ProcessNetwork {
  std::vector<Instance> instances;
  std::map<std::string, GateRule> sync_table;
};

}  // namespace bba
