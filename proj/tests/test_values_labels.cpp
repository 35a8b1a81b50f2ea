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

#include "bba/labels.hpp"
#include "bba/values.hpp"

using namespace bba;

TEST_CASE("probability rendering", "[values-labels]") {
  CHECK(format_prob(0) == "0.0");
  CHECK(format_prob(1) == "0.0001");
  CHECK(format_prob(100) == "0.01");
  CHECK(format_prob(5000) == "0.5");
  CHECK(format_prob(7424) == "0.7424");
  CHECK(format_prob(7500) == "0.75");
  CHECK(format_prob(9999) == "0.9999");
  CHECK(format_prob(10000) == "1.0");

  CHECK_THROWS_AS(format_prob(-1), InternalError);
  CHECK_THROWS_AS(format_prob(10001), InternalError);
}

TEST_CASE("probability parsing inverts rendering over the full range",
          "[values-labels]") {
  for (ProbTicks t = 0; t <= kProbOne; ++t) {
    CHECK(parse_prob(format_prob(t)) == t);
  }
}

TEST_CASE("probability parsing accepts padded forms", "[values-labels]") {
  CHECK(parse_prob("0.75") == 7500);
  CHECK(parse_prob("0.7500") == 7500);
  CHECK(parse_prob("0.5") == 5000);
  CHECK(parse_prob("1.0") == 10000);
  CHECK(parse_prob("1.0000") == 10000);
  CHECK(parse_prob("0.0001") == 1);
}

TEST_CASE("probability parsing rejects malformed text", "[values-labels]") {
  CHECK_THROWS_AS(parse_prob("5"), ParseError);      // no dot
  CHECK_THROWS_AS(parse_prob(".5"), ParseError);     // nothing before the dot
  CHECK_THROWS_AS(parse_prob("1."), ParseError);     // nothing after the dot
  CHECK_THROWS_AS(parse_prob("0.75001"), ParseError);  // five digits
  CHECK_THROWS_AS(parse_prob("2.0"), ParseError);
  CHECK_THROWS_AS(parse_prob("1.5"), ParseError);
  CHECK_THROWS_AS(parse_prob("10.0"), ParseError);

  try {
    parse_prob("0.x5");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 2);
  }
  try {
    parse_prob("x.5");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 0);
  }
}

TEST_CASE("value factories range-check their arguments", "[values-labels]") {
  CHECK_THROWS_AS(Value::bit(2), InternalError);
  CHECK_THROWS_AS(Value::bit(-1), InternalError);
  CHECK_THROWS_AS(Value::pid(0), InternalError);
  CHECK_THROWS_AS(Value::step(3), InternalError);
  CHECK_THROWS_AS(Value::step(-1), InternalError);
  CHECK_THROWS_AS(Value::count(-1), InternalError);
  CHECK_THROWS_AS(Value::prob(-1), InternalError);
  CHECK_THROWS_AS(Value::prob(10001), InternalError);
  CHECK_THROWS_AS(Value::abstract(""), InternalError);
}

TEST_CASE("value text forms", "[values-labels]") {
  CHECK(Value::bit(1).text() == "1");
  CHECK(Value::pid(3).text() == "3");
  CHECK(Value::step(2).text() == "2");
  CHECK(Value::tag_begin().text() == "BEGIN");
  CHECK(Value::tag_end().text() == "END");
  CHECK(Value::count(0).text() == "0");
  CHECK(Value::prob(7500).text() == "0.75");
  CHECK(Value::abstract("X").text() == "X");
}

TEST_CASE("value equality distinguishes kinds with equal payloads",
          "[values-labels]") {
  CHECK(Value::bit(1) == Value::bit(1));
  CHECK(Value::bit(1) != Value::pid(1));
  CHECK(Value::count(1) != Value::pid(1));
  CHECK(Value::tag_begin() != Value::tag_end());
  CHECK(Value::abstract("X") == Value::abstract("X"));
  CHECK(Value::abstract("X") != Value::abstract("Y"));

  // The ordering is total; exercise both directions once.
  CHECK((Value::bit(0) < Value::bit(1)));
  CHECK(!(Value::bit(1) < Value::bit(0)));
}

TEST_CASE("label construction and canonical text", "[values-labels]") {
  Label tau = Label::tau();
  CHECK(tau.is_tau());
  CHECK(format_label(tau) == "i");

  Label tally("TALLY", {Value::pid(2), Value::count(0), Value::count(3)});
  CHECK_FALSE(tally.is_tau());
  CHECK(tally.gate() == "TALLY");
  CHECK(tally.offers().size() == 3);
  CHECK(format_label(tally) == "TALLY !2 !0 !3");

  Label sync("SYNC", {Value::tag_begin()});
  CHECK(format_label(sync) == "SYNC !BEGIN");

  Label commit("COMMIT_PROPOSED_BLOCK", {});
  CHECK(format_label(commit) == "COMMIT_PROPOSED_BLOCK");

  CHECK_THROWS_AS(Label("", {}), InternalError);
  CHECK_THROWS_AS(Label("i", {}), InternalError);
  CHECK_THROWS_AS(Label("A B", {}), InternalError);
  CHECK_THROWS_AS(Label("A!B", {}), InternalError);
  CHECK_THROWS_AS(Label("A\"B", {}), InternalError);
}

TEST_CASE("parsing inverts rendering on the protocol alphabet",
          "[values-labels]") {
  std::vector<Label> labels = {
      Label("SYNC", {Value::tag_begin()}),
      Label("SYNC", {Value::tag_end()}),
      Label("RECEIVE_BLOCK_PROPOSAL", {Value::bit(0)}),
      Label("RECEIVE_BLOCK_PROPOSAL", {Value::bit(1)}),
      Label("COMMIT_PROPOSED_BLOCK", {}),
      Label("COMMIT_EMPTY_BLOCK", {}),
      Label("SET_BIT", {Value::pid(1), Value::step(0), Value::bit(1)}),
      Label("SET_BIT", {Value::pid(4), Value::step(2), Value::bit(0)}),
      Label("P_ZERO", {Value::pid(2), Value::prob(7500)}),
      Label("P_ONE", {Value::pid(1), Value::prob(2500)}),
      Label("P_IN", {Value::pid(4), Value::prob(7424)}),
      Label("P_OUT", {Value::pid(3), Value::prob(2576)}),
      Label("SELF_PROPAGATE", {Value::pid(1), Value::bit(0)}),
      Label("PROPAGATE", {Value::pid(2), Value::bit(1)}),
      Label("TALLY", {Value::pid(4), Value::count(2), Value::count(2)}),
      Label("SELF_PROPAGATE", {Value::pid(2), Value::abstract("X")}),
      Label("TALLY", {Value::pid(1), Value::abstract("X"),
                      Value::abstract("X")}),
  };
  for (const Label& l : labels) {
    Label back = parse_label(format_label(l));
    CHECK(back == l);
    CHECK(format_label(back) == format_label(l));
  }
  CHECK(parse_label("i") == Label::tau());
}

TEST_CASE("parsing types offers through the gate schemas", "[values-labels]") {
  Label set_bit = parse_label("SET_BIT !1 !0 !1");
  REQUIRE(set_bit.offers().size() == 3);
  CHECK(set_bit.offers()[0].kind() == ValueKind::Pid);
  CHECK(set_bit.offers()[1].kind() == ValueKind::Step);
  CHECK(set_bit.offers()[2].kind() == ValueKind::Bit);

  Label tally = parse_label("TALLY !2 !0 !3");
  REQUIRE(tally.offers().size() == 3);
  CHECK(tally.offers()[0].kind() == ValueKind::Pid);
  CHECK(tally.offers()[1].kind() == ValueKind::Count);
  CHECK(tally.offers()[2].kind() == ValueKind::Count);

  Label p_in = parse_label("P_IN !1 !0.75");
  REQUIRE(p_in.offers().size() == 2);
  CHECK(p_in.offers()[1].kind() == ValueKind::Prob);
  CHECK(p_in.offers()[1].num() == 7500);

  Label sync = parse_label("SYNC !BEGIN");
  REQUIRE(sync.offers().size() == 1);
  CHECK(sync.offers()[0] == Value::tag_begin());
}

TEST_CASE("parsing falls back to shape typing off the schemas",
          "[values-labels]") {
  // Unknown gate: integers read as counts, fractions as probabilities,
  // names (BEGIN included) as abstract symbols.
  Label l = parse_label("STAGE3");
  CHECK(l.gate() == "STAGE3");
  CHECK(l.offers().empty());

  Label mixed = parse_label("FOO !5 !0.5 !X !BEGIN");
  REQUIRE(mixed.offers().size() == 4);
  CHECK(mixed.offers()[0] == Value::count(5));
  CHECK(mixed.offers()[1] == Value::prob(5000));
  CHECK(mixed.offers()[2] == Value::abstract("X"));
  CHECK(mixed.offers()[3] == Value::abstract("BEGIN"));

  // A schema position that rejects the token falls back the same way: a
  // pid slot cannot hold zero, so the offer reads as a count.
  Label odd = parse_label("SET_BIT !0 !0 !1");
  CHECK(odd.offers()[0] == Value::count(0));

  // Out-of-range bit in a schema slot reads as a count, and then differs
  // from every well-formed SET_BIT label.
  Label wide = parse_label("SET_BIT !1 !0 !7");
  CHECK(wide.offers()[2] == Value::count(7));
}

TEST_CASE("parsing reports byte offsets on malformed labels",
          "[values-labels]") {
  try {
    parse_label("");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 0);
  }
  try {
    parse_label(" X");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 0);  // empty gate name
  }
  try {
    parse_label("TALLY ?3");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 6);  // offers must start with '!'
  }
  try {
    parse_label("TALLY !");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 7);  // empty offer token
  }
  try {
    parse_label("A\"B !1");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 1);  // bad character inside the gate name
  }
  CHECK_THROWS_AS(parse_label("TALLY !1 !9999999999 !0"), ParseError);
  CHECK_THROWS_AS(parse_label("FOO !1x"), ParseError);
}
