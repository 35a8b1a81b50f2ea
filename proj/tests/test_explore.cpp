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

#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "bba/aut_io.hpp"
#include "bba/bisim.hpp"
#include "bba/explore.hpp"
#include "bba/model.hpp"

using namespace bba;

namespace {

Lts from_edges(StateId n, StateId init,
               std::vector<std::tuple<StateId, std::string, StateId>> edges) {
  std::vector<Transition> ts;
  for (auto& [s, l, d] : edges) {
    Label label = l == "i" ? Label::tau() : parse_label(l);
    ts.push_back(Transition{s, label, d});
  }
  return Lts(n, init, std::move(ts));
}

Instance inst(std::string name, TermPtr body) {
  Program p;
  p.processes.push_back(ProcessDef{"MAIN", {}, std::move(body)});
  return Instance{std::move(name), std::move(p), {}};
}

Config solo() {
  Config cfg;
  cfg.n = 1;
  cfg.h = 1;
  cfg.t = 1;
  return cfg;
}

}  // namespace

TEST_CASE("generation output is normalized and worker-count independent",
          "[explore]") {
  ProcessNetwork net = build_network(solo());
  Lts one = generate(net, {}, 1);
  Lts four = generate(net, {}, 4);
  CHECK(write_aut(one) == write_aut(four));
  CHECK(write_aut(one) == write_aut(normalize(one)));
}

TEST_CASE("mismatched barrier offers stall the whole network", "[explore]") {
  ProcessNetwork net;
  net.instances.push_back(inst("A", emit("G")));
  net.instances.push_back(inst("B", emit("H")));
  net.sync_table["G"] = GateRule::fixed({0, 1});
  net.sync_table["H"] = GateRule::fixed({0, 1});
  Lts l = generate(net);
  CHECK(l.state_count() == 1);
  CHECK(l.transitions().empty());
  std::vector<DeadlockReport> dead = deadlocks(l);
  REQUIRE(dead.size() == 1);
  CHECK(dead[0].state == 0);
  CHECK(dead[0].trace.empty());
}

TEST_CASE("the state limit interrupts with progress numbers", "[explore]") {
  ProcessNetwork net = build_network(solo());
  try {
    generate(net, Limits{3, 600.0});
    FAIL("expected LimitError");
  } catch (const LimitError& e) {
    CHECK(e.states_seen() > 3);
    CHECK(e.seconds() >= 0.0);
    CHECK(std::string(e.what()).find("state limit") != std::string::npos);
  }
}

TEST_CASE("the time limit interrupts exploration", "[explore]") {
  ProcessNetwork net = build_network(solo());
  CHECK_THROWS_AS(generate(net, Limits{1000000, 0.0}), LimitError);
}

TEST_CASE("product interleaves independent actions", "[explore]") {
  Lts a = from_edges(2, 0, {{0, "A", 1}});
  Lts b = from_edges(2, 0, {{0, "B", 1}});
  Lts p = product(a, b, {});
  CHECK(p.state_count() == 4);
  CHECK(p.transitions().size() == 4);
  std::set<std::string> texts;
  for (const Transition& t : p.transitions())
    texts.insert(format_label(t.label));
  CHECK(texts == std::set<std::string>{"A", "B"});
}

TEST_CASE("product synchronizes on listed gates by full label", "[explore]") {
  Lts a = from_edges(2, 0, {{0, "G !1", 1}});
  Lts b = from_edges(2, 0, {{0, "G !1", 1}, {0, "G !2", 1}});
  Lts p = product(a, b, {"G"});
  CHECK(p.state_count() == 2);
  REQUIRE(p.transitions().size() == 1);
  CHECK(format_label(p.transitions()[0].label) == "G !1");

  // A synced gate with no partner transition blocks entirely.
  Lts mute = from_edges(1, 0, {});
  Lts blocked = product(a, mute, {"G"});
  CHECK(blocked.state_count() == 1);
  CHECK(blocked.transitions().empty());
}

TEST_CASE("product never synchronizes internal steps", "[explore]") {
  Lts a = from_edges(2, 0, {{0, "i", 1}});
  Lts b = from_edges(2, 0, {{0, "i", 1}});
  Lts p = product(a, b, {});
  CHECK(p.state_count() == 4);
  CHECK(p.transitions().size() == 4);
  CHECK(stats(p).tau_transitions == 4);
}

TEST_CASE("a node joined with its counter is the monolithic network",
          "[explore]") {
  ProcessNetwork full = build_network(solo());
  REQUIRE(full.instances.size() == 2);

  ProcessNetwork node_only;
  node_only.instances.push_back(full.instances[0]);
  for (const auto& [gate, rule] : full.sync_table)
    node_only.sync_table[gate] = GateRule::fixed({0});

  ProcessNetwork counter_only;
  counter_only.instances.push_back(full.instances[1]);
  counter_only.sync_table["SELF_PROPAGATE"] = GateRule::fixed({0});
  counter_only.sync_table["TALLY"] = GateRule::fixed({0});

  Lts joint = product(generate(node_only), generate(counter_only),
                      {"SELF_PROPAGATE", "TALLY"});
  Lts monolithic = generate(full);
  EquivalenceVerdict v = equivalent(joint, monolithic, Relation::Strong);
  INFO(v.detail);
  CHECK(v.equal);
}
