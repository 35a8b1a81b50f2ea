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

#include <map>
#include <set>
#include <string>
#include <vector>

#include "bba/aut_io.hpp"
#include "bba/explore.hpp"
#include "bba/network.hpp"
#include "bba/process.hpp"
#include "bba/semantics.hpp"

using namespace bba;

namespace {

Instance inst(std::string name, TermPtr body,
              std::map<std::string, Value> init = {}) {
  Program p;
  p.processes.push_back(ProcessDef{"MAIN", {}, std::move(body)});
  return Instance{std::move(name), std::move(p), std::move(init)};
}

std::set<std::string> label_texts(const Lts& l) {
  std::set<std::string> out;
  for (const Transition& t : l.transitions())
    out.insert(format_label(t.label));
  return out;
}

const std::vector<Value>& bits() {
  static const std::vector<Value> b{Value::bit(0), Value::bit(1)};
  return b;
}

}  // namespace

TEST_CASE("a single emit runs into a halt", "[kernel]") {
  ProcessNetwork net;
  net.instances.push_back(inst("A", emit("G")));
  net.sync_table["G"] = GateRule::fixed({0});
  Lts l = generate(net);
  CHECK(l.state_count() == 2);
  REQUIRE(l.transitions().size() == 1);
  CHECK(format_label(l.transitions()[0].label) == "G");
  CHECK(stats(l).deadlock_states == 1);
}

TEST_CASE("looping control converges onto one state", "[kernel]") {
  ProcessNetwork net;
  net.instances.push_back(inst("A", loop("l", emit("G"))));
  net.sync_table["G"] = GateRule::fixed({0});
  Lts l = generate(net);
  CHECK(l.state_count() == 1);
  CHECK(l.transitions().size() == 1);
  CHECK(l.transitions()[0].src == l.transitions()[0].dst);
}

TEST_CASE("assignments are absorbed between emissions", "[kernel]") {
  ProcessNetwork net;
  net.instances.push_back(
      inst("A", seq({assign("X", Value::bit(0)), assign("X", Value::bit(1)),
                     emit("G", {send(var("X"))})})));
  net.sync_table["G"] = GateRule::fixed({0});
  Lts l = generate(net);
  CHECK(l.state_count() == 2);
  CHECK(stats(l).tau_transitions == 0);
  CHECK(label_texts(l) == std::set<std::string>{"G !1"});
}

TEST_CASE("alternatives branch at the same control point", "[kernel]") {
  ProcessNetwork net;
  net.instances.push_back(inst("A", alt({emit("G"), emit("H")})));
  net.sync_table["G"] = GateRule::fixed({0});
  net.sync_table["H"] = GateRule::fixed({0});
  Lts l = generate(net);
  CHECK(label_texts(l) == std::set<std::string>{"G", "H"});
  CHECK(l.transitions().size() == 2);
}

TEST_CASE("synchronization requires agreeing offers", "[kernel]") {
  ProcessNetwork net;
  net.instances.push_back(inst("A", emit("G", {send(Value::count(1))})));
  net.instances.push_back(inst("B", emit("G", {send(Value::count(1))})));
  net.sync_table["G"] = GateRule::fixed({0, 1});
  Lts agree = generate(net);
  CHECK(agree.transitions().size() == 1);
  CHECK(label_texts(agree) == std::set<std::string>{"G !1"});

  ProcessNetwork clash;
  clash.instances.push_back(inst("A", emit("G", {send(Value::count(1))})));
  clash.instances.push_back(inst("B", emit("G", {send(Value::count(2))})));
  clash.sync_table["G"] = GateRule::fixed({0, 1});
  Lts stuck = generate(clash);
  CHECK(stuck.state_count() == 1);
  CHECK(stuck.transitions().empty());
}

TEST_CASE("a bound offer takes the sender's value", "[kernel]") {
  ProcessNetwork net;
  net.instances.push_back(inst("A", emit("G", {send(Value::bit(1))})));
  net.instances.push_back(
      inst("B", seq({emit("G", {bind("X", bits())}),
                     emit("H", {send(var("X"))})})));
  net.sync_table["G"] = GateRule::fixed({0, 1});
  net.sync_table["H"] = GateRule::fixed({1});
  Lts l = generate(net);
  CHECK(l.state_count() == 3);
  CHECK(label_texts(l) == std::set<std::string>{"G !1", "H !1"});
}

TEST_CASE("two bound offers intersect their domains", "[kernel]") {
  ProcessNetwork net;
  net.instances.push_back(inst("A", emit("G", {bind("X", bits())})));
  net.instances.push_back(
      inst("B", emit("G", {bind("Y", {Value::bit(1)})})));
  net.sync_table["G"] = GateRule::fixed({0, 1});
  Lts l = generate(net);
  CHECK(label_texts(l) == std::set<std::string>{"G !1"});
}

TEST_CASE("offer positions agree independently", "[kernel]") {
  ProcessNetwork net;
  net.instances.push_back(
      inst("A", emit("G", {send(Value::count(1)), bind("Y", bits())})));
  net.instances.push_back(
      inst("B", emit("G", {bind("X", {Value::count(1), Value::count(2)}),
                           send(Value::bit(0))})));
  net.sync_table["G"] = GateRule::fixed({0, 1});
  Lts l = generate(net);
  CHECK(label_texts(l) == std::set<std::string>{"G !1 !0"});
}

TEST_CASE("first-offer keyed gates pick their participant set", "[kernel]") {
  ProcessNetwork net;
  net.instances.push_back(
      inst("A", seq({emit("G", {send(Value::pid(1))}),
                     emit("G", {send(Value::pid(2))})})));
  net.instances.push_back(inst("B", emit("G", {send(Value::pid(2))})));
  net.sync_table["G"] = GateRule::by_first_offer(
      {{Value::pid(1), {0}}, {Value::pid(2), {0, 1}}});
  Lts l = generate(net);
  // G !1 is A alone; G !2 then needs both, so the order is forced.
  Lts n = normalize(l);
  CHECK(write_aut(n) ==
        "des (0, 2, 3)\n"
        "(0, \"G !1\", 1)\n"
        "(1, \"G !2\", 2)\n");
}

TEST_CASE("guards prune alternatives by the current valuation", "[kernel]") {
  ProcessNetwork net;
  net.instances.push_back(inst(
      "A",
      alt({seq({only_if(eq(var("S"), cst(Value::bit(0)))), emit("G")}),
           seq({only_if(eq(var("S"), cst(Value::bit(1)))), emit("H")})}),
      {{"S", Value::bit(0)}}));
  net.sync_table["G"] = GateRule::fixed({0});
  net.sync_table["H"] = GateRule::fixed({0});
  Lts l = generate(net);
  CHECK(label_texts(l) == std::set<std::string>{"G"});
}

TEST_CASE("case dispatch follows patterns and guards", "[kernel]") {
  ProcessNetwork net;
  net.instances.push_back(inst(
      "A",
      if_case(var("K"),
              {arm(Value::count(0), emit("Z")),
               arm_default(emit("N"))}),
      {{"K", Value::count(3)}}));
  net.sync_table["Z"] = GateRule::fixed({0});
  net.sync_table["N"] = GateRule::fixed({0});
  Lts l = generate(net);
  CHECK(label_texts(l) == std::set<std::string>{"N"});
}

TEST_CASE("an unmatched case is an internal defect at run time", "[kernel]") {
  ProcessNetwork net;
  net.instances.push_back(inst(
      "A", if_case(var("S"), {arm(Value::bit(1), emit("G"))}),
      {{"S", Value::bit(0)}}));
  net.sync_table["G"] = GateRule::fixed({0});
  CHECK_THROWS_AS(generate(net), InternalError);
}

TEST_CASE("dead bindings do not split states", "[kernel]") {
  ProcessNetwork net;
  net.instances.push_back(inst(
      "A", loop("l", seq({emit("G", {bind("X", bits())}), emit("H")}))));
  net.sync_table["G"] = GateRule::fixed({0});
  net.sync_table["H"] = GateRule::fixed({0});
  Lts l = generate(net);
  // X is never read, so both G-variants land in the same state.
  CHECK(l.state_count() == 2);
  CHECK(l.transitions().size() == 3);
}

TEST_CASE("tail calls pass parameters and close cycles", "[kernel]") {
  Program p;
  p.processes.push_back(ProcessDef{
      "MAIN", {}, seq({emit("A"), call("P", {cst(Value::bit(1))})})});
  p.processes.push_back(ProcessDef{
      "P", {"V"}, seq({emit("G", {send(var("V"))}), call("MAIN")})});
  ProcessNetwork net;
  net.instances.push_back(Instance{"A", std::move(p), {}});
  net.sync_table["A"] = GateRule::fixed({0});
  net.sync_table["G"] = GateRule::fixed({0});
  Lts l = generate(net);
  CHECK(l.state_count() == 2);
  CHECK(label_texts(l) == std::set<std::string>{"A", "G !1"});
}

TEST_CASE("break leaves the named loop", "[kernel]") {
  ProcessNetwork net;
  net.instances.push_back(inst(
      "A", seq({loop("l", alt({emit("G"), seq({emit("S"), brk("l")})})),
                emit("D")})));
  net.sync_table["G"] = GateRule::fixed({0});
  net.sync_table["S"] = GateRule::fixed({0});
  net.sync_table["D"] = GateRule::fixed({0});
  Lts l = generate(net);
  // G loops back; S falls out to D, which then halts.
  CHECK(label_texts(l) == std::set<std::string>{"G", "S", "D"});
  Lts n = normalize(l);
  CHECK(write_aut(n) ==
        "des (0, 3, 3)\n"
        "(0, \"G\", 0)\n"
        "(0, \"S\", 1)\n"
        "(1, \"D\", 2)\n");
}

TEST_CASE("static checks reject broken programs", "[kernel]") {
  auto compile_single = [](TermPtr body,
                           std::map<std::string, Value> init = {}) {
    ProcessNetwork net;
    net.instances.push_back(inst("A", std::move(body), std::move(init)));
    net.sync_table["G"] = GateRule::fixed({0});
    return compile(net);
  };

  // Reading a variable that was never assigned.
  CHECK_THROWS_AS(compile_single(emit("G", {send(var("X"))})), NetworkError);
  // The same read is fine once the instance valuation covers it.
  CHECK_NOTHROW(compile_single(emit("G", {send(var("X"))}),
                               {{"X", Value::bit(0)}}));

  // Emitting a gate the synchronization table does not know.
  CHECK_THROWS_AS(compile_single(emit("NOPE")), NetworkError);

  // A break with no enclosing loop of that name.
  CHECK_THROWS_AS(compile_single(brk("l")), NetworkError);
  CHECK_THROWS_AS(compile_single(loop("a", brk("b"))), NetworkError);

  // Calls must be tail position, hit a real process, and match its arity.
  {
    Program p;
    p.processes.push_back(
        ProcessDef{"MAIN", {}, seq({call("MAIN"), emit("G")})});
    ProcessNetwork net;
    net.instances.push_back(Instance{"A", std::move(p), {}});
    net.sync_table["G"] = GateRule::fixed({0});
    CHECK_THROWS_AS(compile(net), NetworkError);
  }
  CHECK_THROWS_AS(compile_single(call("NOWHERE")), NetworkError);
  {
    Program p;
    p.processes.push_back(ProcessDef{"MAIN", {}, call("P")});
    p.processes.push_back(ProcessDef{"P", {"V"}, emit("G", {send(var("V"))})});
    ProcessNetwork net;
    net.instances.push_back(Instance{"A", std::move(p), {}});
    net.sync_table["G"] = GateRule::fixed({0});
    CHECK_THROWS_AS(compile(net), NetworkError);
  }

  // A participant index beyond the instance list.
  {
    ProcessNetwork net;
    net.instances.push_back(inst("A", emit("G")));
    net.sync_table["G"] = GateRule::fixed({0, 5});
    CHECK_THROWS_AS(compile(net), NetworkError);
  }

  // More variables than the register file holds.
  {
    std::vector<TermPtr> body;
    for (int i = 0; i < 70; ++i)
      body.push_back(assign("V" + std::to_string(i), Value::bit(0)));
    body.push_back(emit("G"));
    CHECK_THROWS_AS(compile_single(seq(std::move(body))), NetworkError);
  }
}

TEST_CASE("a loop with no reachable emission cannot run forever", "[kernel]") {
  ProcessNetwork net;
  net.instances.push_back(
      inst("A", loop("l", assign("X", Value::bit(0)))));
  net.sync_table["G"] = GateRule::fixed({0});
  CHECK_THROWS_AS(generate(net), Error);
}
