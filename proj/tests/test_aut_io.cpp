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

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "bba/aut_io.hpp"
#include "bba/lts.hpp"

using namespace bba;

namespace {

Lts tiny() {
  // Deliberately scrambled transition order; the writer must sort.
  std::vector<Transition> ts = {
      {2, Label("SYNC", {Value::tag_end()}), 0},
      {0, Label("SYNC", {Value::tag_begin()}), 1},
      {1, Label::tau(), 2},
  };
  return Lts(3, 0, std::move(ts));
}

bool same_lts(const Lts& a, const Lts& b) {
  return write_aut(normalize(a)) == write_aut(normalize(b));
}

Lts random_lts(std::mt19937& rng) {
  std::uniform_int_distribution<int> nd(1, 10);
  StateId n = static_cast<StateId>(nd(rng));
  std::vector<Label> pool = {
      Label::tau(),
      Label("A", {}),
      Label("B", {Value::count(1)}),
      Label("TALLY", {Value::pid(1), Value::count(0), Value::count(2)}),
      Label("SYNC", {Value::tag_begin()}),
      Label("P_IN", {Value::pid(2), Value::prob(7500)}),
  };
  std::uniform_int_distribution<int> td(0, 3 * static_cast<int>(n));
  std::uniform_int_distribution<int> sd(0, static_cast<int>(n) - 1);
  std::uniform_int_distribution<std::size_t> ld(0, pool.size() - 1);
  int m = td(rng);
  std::vector<Transition> ts;
  ts.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i)
    ts.push_back(Transition{static_cast<StateId>(sd(rng)), pool[ld(rng)],
                            static_cast<StateId>(sd(rng))});
  return Lts(n, static_cast<StateId>(sd(rng)), std::move(ts));
}

}  // namespace

TEST_CASE("writer emits the exact sorted byte form", "[aut-io]") {
  CHECK(write_aut(tiny()) ==
        "des (0, 3, 3)\n"
        "(0, \"SYNC !BEGIN\", 1)\n"
        "(1, \"i\", 2)\n"
        "(2, \"SYNC !END\", 0)\n");
}

TEST_CASE("writer sorts by source, label text, then target", "[aut-io]") {
  std::vector<Transition> ts = {
      {0, Label("B", {}), 1},
      {0, Label("A", {}), 2},
      {0, Label("A", {}), 1},
      {1, Label("A", {}), 0},
  };
  Lts l(3, 0, std::move(ts));
  CHECK(write_aut(l) ==
        "des (0, 4, 3)\n"
        "(0, \"A\", 1)\n"
        "(0, \"A\", 2)\n"
        "(0, \"B\", 1)\n"
        "(1, \"A\", 0)\n");
}

TEST_CASE("reader inverts the writer", "[aut-io]") {
  std::mt19937 rng(20260821);
  for (int i = 0; i < 200; ++i) {
    Lts l = random_lts(rng);
    Lts back = read_aut(write_aut(l));
    CHECK(back.state_count() == l.state_count());
    CHECK(back.initial() == l.initial());
    CHECK(back.transitions().size() == l.transitions().size());
    CHECK(write_aut(back) == write_aut(l));
  }
}

TEST_CASE("reader tolerates whitespace, blank lines, and bare labels",
          "[aut-io]") {
  Lts a = read_aut(
      "des ( 0 , 3 , 3 )\n"
      "\n"
      "( 0 , \"SYNC !BEGIN\" , 1 )\n"
      "(1, i, 2)\n"
      "\n"
      "(2, SYNC !END , 0)");
  CHECK(write_aut(a) == write_aut(tiny()));

  // Quoted "i" is tau too.
  Lts b = read_aut("des (0, 1, 2)\n(0, \"i\", 1)\n");
  REQUIRE(b.transitions().size() == 1);
  CHECK(b.transitions()[0].label.is_tau());

  // Bare labels keep their internal spaces up to the final comma.
  Lts c = read_aut("des (0, 1, 2)\n(0, TALLY !1 !0 !2, 1)\n");
  CHECK(format_label(c.transitions()[0].label) == "TALLY !1 !0 !2");

  // Missing trailing newline on the last line is fine.
  Lts d = read_aut("des (0, 1, 2)\n(0, \"A\", 1)");
  CHECK(d.transitions().size() == 1);
}

TEST_CASE("reader validates the header", "[aut-io]") {
  CHECK_THROWS_AS(read_aut(""), ParseError);
  CHECK_THROWS_AS(read_aut("res (0, 0, 1)\n"), ParseError);
  CHECK_THROWS_AS(read_aut("des (0, 0, 0)\n"), ParseError);   // no states
  CHECK_THROWS_AS(read_aut("des (2, 0, 2)\n"), ParseError);   // initial range
  CHECK_THROWS_AS(read_aut("des (0, 0, 1) x\n"), ParseError);  // junk
  CHECK_THROWS_AS(read_aut("des (0, x, 1)\n"), ParseError);
  CHECK_THROWS_AS(read_aut("des (0, 0, 99999999999)\n"), ParseError);
}

TEST_CASE("reader checks transition lines against the header", "[aut-io]") {
  // Count mismatch in both directions.
  try {
    read_aut("des (0, 2, 2)\n(0, \"A\", 1)\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("announces") != std::string::npos);
  }
  CHECK_THROWS_AS(read_aut("des (0, 0, 2)\n(0, \"A\", 1)\n"), ParseError);

  // Out-of-range endpoints blame the offending line.
  std::string text = "des (0, 1, 2)\n(0, \"A\", 5)\n";
  try {
    read_aut(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == text.find("(0, \"A\", 5)"));
  }
  CHECK_THROWS_AS(read_aut("des (0, 1, 2)\n(7, \"A\", 0)\n"), ParseError);

  // Structural damage inside a line.
  CHECK_THROWS_AS(read_aut("des (0, 1, 2)\n(0, \"A, 1)\n"), ParseError);
  CHECK_THROWS_AS(read_aut("des (0, 1, 2)\n(0, \"A\", 1) x\n"), ParseError);
  CHECK_THROWS_AS(read_aut("des (0, 1, 2)\n(0, , 1)\n"), ParseError);

  // A label that does not parse names the line, not just the token.
  std::string bad = "des (0, 1, 2)\n(0, \"TALLY !\", 1)\n";
  try {
    read_aut(bad);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("bad label") != std::string::npos);
    CHECK(e.offset() == bad.find("(0,"));
  }
}

TEST_CASE("file round trip and IO failures", "[aut-io]") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "bba_aut_io_test";
  fs::create_directories(dir);
  fs::path path = dir / "tiny.aut";

  Lts l = tiny();
  write_aut_file(l, path.string());
  Lts back = read_aut_file(path.string());
  CHECK(same_lts(l, back));

  CHECK_THROWS_AS(read_aut_file((dir / "absent.aut").string()), IoError);
  CHECK_THROWS_AS(write_aut_file(l, (dir / "no_dir" / "x.aut").string()),
                  IoError);

  fs::remove_all(dir);
}
