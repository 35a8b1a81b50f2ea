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

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bba/aut_io.hpp"
#include "bba/bisim.hpp"
#include "bba/explore.hpp"
#include "bba/inevitable.hpp"
#include "bba/labels.hpp"
#include "bba/lts.hpp"
#include "bba/model.hpp"
#include "bba/refs.hpp"
#include "bba/slicing.hpp"

namespace bba {

struct PropertyResult {
  std::string id;
  std::string description;
  std::string verdict;  // "pass" | "fail" | "skipped"
  std::string diagnostic;
  std::string artifact;  // path of a baseline file, when one is involved
  double seconds = 0.0;
};

struct PropertyReport {
  Config config;
  std::vector<PropertyResult> results;
  bool aborted = false;
  std::string abort_reason;

  bool all_passed() const {
    if (aborted || results.empty()) return false;
    for (const PropertyResult& r : results)
      if (r.verdict == "fail") return false;
    return true;
  }

  std::string to_json() const {
    nlohmann::json doc;
    doc["config"] = {{"n", config.n},       {"h", config.h},
                     {"t", config.t},       {"c", config.c},
                     {"pv", format_prob(config.pv)},
                     {"ph", format_prob(config.ph)},
                     {"style", style_name(config.style)}};
    doc["results"] = nlohmann::json::array();
    for (const PropertyResult& r : results) {
      nlohmann::json row = {{"id", r.id},
                            {"description", r.description},
                            {"verdict", r.verdict},
                            {"seconds", r.seconds}};
      if (!r.diagnostic.empty()) row["diagnostic"] = r.diagnostic;
      if (!r.artifact.empty()) row["artifact"] = r.artifact;
      doc["results"].push_back(std::move(row));
    }
    doc["aborted"] = aborted;
    if (aborted) doc["abort_reason"] = abort_reason;
    doc["all_passed"] = all_passed();
    return doc.dump(2);
  }

  void print_table(std::ostream& os) const {
    os << "property suite for n=" << config.n << " h=" << config.h
       << " t=" << config.t << " style=" << style_name(config.style) << "\n";
    for (const PropertyResult& r : results) {
      std::ostringstream line;
      line << "  " << std::left << std::setw(18) << r.id << std::setw(8)
           << r.verdict << std::right << std::setw(8) << std::fixed
           << std::setprecision(2) << r.seconds << "s  " << r.description;
      os << line.str() << "\n";
      if (!r.diagnostic.empty()) os << "      " << r.diagnostic << "\n";
    }
    if (aborted) os << "  suite aborted: " << abort_reason << "\n";
    os << (all_passed() ? "  all properties passed" : "  FAILURES present")
       << "\n";
  }
};

struct SuiteOptions {
  std::string baseline_dir = "baselines";
  int jobs = 1;
  Limits limits;
};

inline std::string trace_text(const std::vector<Label>& trace) {
  std::string out;
  for (const Label& l : trace) {
    if (!out.empty()) out += "; ";
    out += format_label(l);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Slice pipelines. Each keeps one event family visible, optionally folds
// data values to the abstract constant X, and minimizes.
// ---------------------------------------------------------------------------

inline Lts sync_slice(const Lts& l) {
  return minimize(keep(l, {"SYNC !.*"}), Relation::Branching).lts;
}

inline Lts tally_slice(const Lts& l) {
  Lts sliced = keep(l, {"TALLY !.*"});
  sliced = rename(sliced, {{"TALLY !([0-9]+) !.+", "TALLY !$1 !X !X"}});
  return minimize(sliced, Relation::Branching).lts;
}

inline Lts selfprop_slice(const Lts& l) {
  Lts sliced = keep(l, {"SELF_PROPAGATE !.*"});
  sliced = rename(sliced,
                  {{"SELF_PROPAGATE !([0-9]+) !.+", "SELF_PROPAGATE !$1 !X"}});
  return minimize(sliced, Relation::Branching).lts;
}

inline Lts interface_slice(const Lts& l) {
  return minimize(keep(l, {"RECEIVE_BLOCK_PROPOSAL !.*",
                           "COMMIT_PROPOSED_BLOCK", "COMMIT_EMPTY_BLOCK"}),
                  Relation::Branching)
      .lts;
}

inline Lts propagate_slice(const Lts& l) {
  return minimize(keep(l, {"PROPAGATE !.*"}), Relation::Branching).lts;
}

inline Lts committee_slice(const Lts& l) {
  return minimize(keep(l, {"P_IN !.*", "P_OUT !.*"}), Relation::Branching).lts;
}

inline Lts coin_slice(const Lts& l) {
  return minimize(keep(l, {"P_ZERO !.*", "P_ONE !.*"}), Relation::Branching)
      .lts;
}

/// Pattern sets for the per-node bit-progress obligation: after a bit
/// assignment at step s < 2, the node's next bit event must be the step
/// s+1 assignment, unless a new round starts first.
struct InevitabilityPatterns {
  std::vector<std::string> x, y, z;
};

inline InevitabilityPatterns bit_progress_patterns(int id, int step) {
  std::string node = std::to_string(id);
  InevitabilityPatterns p;
  p.x = {"SET_BIT !" + node + " !" + std::to_string(step) + " !.*"};
  p.y = {"RECEIVE_BLOCK_PROPOSAL !.*", "SET_BIT !" + node + " !.* !.*"};
  p.z = {"RECEIVE_BLOCK_PROPOSAL !.*",
         "SET_BIT !" + node + " !" + std::to_string(step + 1) + " !.*"};
  return p;
}

namespace detail {

class SuiteRunner {
 public:
  SuiteRunner(const Config& cfg, const SuiteOptions& opt)
      : cfg_(cfg), opt_(opt) {
    report_.config = cfg;
  }

  PropertyReport run() {
    validate_config(cfg_);
    try {
      lts_ = generate(build_network(cfg_), opt_.limits, opt_.jobs);
    } catch (const LimitError& e) {
      report_.aborted = true;
      report_.abort_reason = e.what();
      return std::move(report_);
    }

    property("P1", "no reachable deadlock state", [&] {
      auto dead = deadlocks(lts_);
      if (dead.empty()) return ok();
      return fail(std::to_string(dead.size()) +
                  " deadlock state(s); shortest trace: " +
                  trace_text(dead.front().trace));
    });

    property("P2", "barrier slice alternates BEGIN and END", [&] {
      return expect_equivalent(sync_slice(lts_), ref_sync());
    });

    property("P3", "tally slice is the cyclic hypercube of dimension n", [&] {
      return expect_equivalent(tally_slice(lts_), ref_hypercube(cfg_.n));
    });

    baseline_property("P4", "broadcast slice matches the frozen baseline",
                      "p4", [&] { return propagate_slice(lts_); });

    property("P5", "vote-cast slice is the interleaved per-step pattern",
             [&] {
               return expect_equivalent(selfprop_slice(lts_),
                                        ref_selfprop(cfg_.n));
             });

    baseline_property("P6",
                      "committee-selection slice matches the frozen baseline",
                      "p6", [&] { return committee_slice(lts_); });

    baseline_property("P7", "coin-outcome slice matches the frozen baseline",
                      "p7", [&] { return coin_slice(lts_); });

    bool corrupted = cfg_.h < cfg_.t;
    property("P8",
             corrupted ? "interface slice: blocks with bit one are rejected"
                       : "interface slice: blocks are accepted or rejected",
             [&] {
               return expect_equivalent(interface_slice(lts_),
                                        ref_interface(corrupted));
             });

    for (int id = 1; id <= cfg_.n; ++id) {
      for (int step = 0; step < 2; ++step) {
        std::string pid = "P9[id=" + std::to_string(id) +
                          ",step=" + std::to_string(step) + "]";
        property(pid, "bit progress: step " + std::to_string(step) +
                          " leads to step " + std::to_string(step + 1) +
                          " or a new round",
                 [&] {
                   InevitabilityPatterns p = bit_progress_patterns(id, step);
                   InevitabilityVerdict v =
                       inevitable(lts_, LabelPatternSet(p.x),
                                  LabelPatternSet(p.y), LabelPatternSet(p.z));
                   if (v.holds) return ok();
                   const InevitabilityWitness& w = *v.witness;
                   return fail("escape (" + w.reason + ") after " +
                               format_label(w.trigger.label) + ": " +
                               trace_text(w.escape));
                 });
      }
    }

    property("STYLE-EQ",
             "recursive and loop encodings are strongly bisimilar", [&] {
               Config other = cfg_;
               other.style = cfg_.style == Style::Recursive ? Style::Loop
                                                            : Style::Recursive;
               try {
                 Lts o = generate(build_network(other), opt_.limits, opt_.jobs);
                 EquivalenceVerdict v = equivalent(lts_, o, Relation::Strong);
                 if (v.equal) return ok();
                 return fail("distinguished by: " + trace_text(v.trace) +
                             (v.detail.empty() ? "" : " (" + v.detail + ")"));
               } catch (const LimitError& e) {
                 return skipped(std::string("generation limit: ") + e.what());
               }
             });

    return std::move(report_);
  }

  const Lts& generated() const { return lts_; }

 private:
  struct Outcome {
    std::string verdict;
    std::string diagnostic;
  };

  static Outcome ok() { return {"pass", ""}; }
  static Outcome fail(std::string why) { return {"fail", std::move(why)}; }
  static Outcome skipped(std::string why) {
    return {"skipped", std::move(why)};
  }

  Outcome expect_equivalent(const Lts& got, const Lts& want) {
    EquivalenceVerdict v = equivalent(got, want, Relation::Branching);
    if (v.equal) return ok();
    Stats g = got.stats(), w = want.stats();
    return fail("slice has " + std::to_string(g.states) + " states / " +
                std::to_string(g.transitions) + " transitions, reference " +
                std::to_string(w.states) + " / " +
                std::to_string(w.transitions) +
                "; distinguished by: " + trace_text(v.trace) +
                (v.detail.empty() ? "" : " (" + v.detail + ")"));
  }

  template <typename Body>
  void property(const std::string& id, const std::string& description,
                Body body) {
    PropertyResult r;
    r.id = id;
    r.description = description;
    auto start = std::chrono::steady_clock::now();
    try {
      Outcome o = body();
      r.verdict = o.verdict;
      r.diagnostic = o.diagnostic;
    } catch (const std::exception& e) {
      r.verdict = "fail";
      r.diagnostic = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              start)
                    .count();
    report_.results.push_back(std::move(r));
  }

  /// Regression against a frozen quotient: the first run writes the file
  /// and passes; later runs must stay branching-equivalent to it.
  template <typename SliceFn>
  void baseline_property(const std::string& id, const std::string& description,
                         const std::string& stem, SliceFn slice_fn) {
    std::filesystem::path path =
        std::filesystem::path(opt_.baseline_dir) /
        (stem + "_n" + std::to_string(cfg_.n) + "_h" + std::to_string(cfg_.h) +
         "_t" + std::to_string(cfg_.t) + ".aut");
    property(id, description, [&]() -> Outcome {
      Lts slice = slice_fn();
      if (!std::filesystem::exists(path)) {
        std::filesystem::create_directories(path.parent_path());
        write_aut_file(slice, path.string());
        return {"pass", "baseline frozen (first run)"};
      }
      Lts frozen = read_aut_file(path.string());
      EquivalenceVerdict v = equivalent(slice, frozen, Relation::Branching);
      if (v.equal) return ok();
      return fail("slice drifted from baseline; distinguished by: " +
                  trace_text(v.trace) +
                  (v.detail.empty() ? "" : " (" + v.detail + ")"));
    });
    report_.results.back().artifact = path.string();
  }

  Config cfg_;
  SuiteOptions opt_;
  PropertyReport report_;
  Lts lts_;
};

}  // namespace detail

/// Runs the full property suite for one configuration. Property failures are
/// recorded, not thrown; only an exploration limit aborts the suite.
inline PropertyReport run_suite(const Config& cfg,
                                const SuiteOptions& opt = {}) {
  return detail::SuiteRunner(cfg, opt).run();
}

}  // namespace bba
