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

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bba/aut_io.hpp"
#include "bba/bisim.hpp"
#include "bba/dot.hpp"
#include "bba/errors.hpp"
#include "bba/explore.hpp"
#include "bba/lts.hpp"
#include "bba/model.hpp"
#include "bba/slicing.hpp"
#include "bba/suite.hpp"

namespace {

struct ModelFlags {
  bba::Config base;
  std::string config_file;
  int nodes = 0, honest = -1, threshold = 0;
  std::string style;
  CLI::Option *nodes_opt = nullptr, *honest_opt = nullptr,
              *threshold_opt = nullptr, *style_opt = nullptr;

  void add_to(CLI::App* cmd) {
    nodes_opt = cmd->add_option("--nodes", nodes, "number of nodes");
    honest_opt = cmd->add_option("--honest", honest, "number of honest nodes");
    threshold_opt =
        cmd->add_option("--threshold", threshold, "vote threshold");
    style_opt = cmd->add_option("--style", style,
                                "process encoding: loop or rec (default rec)")
                    ->check(CLI::IsMember({"loop", "rec"}));
    cmd->add_option("--config", config_file,
                    "JSON file with model parameters; explicit flags win");
  }

  bba::Config resolve() const {
    bba::Config cfg = base;
    if (!config_file.empty()) {
      std::ifstream in(config_file, std::ios::binary);
      if (!in)
        throw bba::IoError("cannot open config file '" + config_file + "'");
      std::ostringstream text;
      text << in.rdbuf();
      cfg = bba::config_from_json(text.str(), cfg);
    }
    if (nodes_opt->count() > 0) cfg.n = nodes;
    if (honest_opt->count() > 0) cfg.h = honest;
    if (threshold_opt->count() > 0) cfg.t = threshold;
    if (style_opt->count() > 0)
      cfg.style = style == "loop" ? bba::Style::Loop : bba::Style::Recursive;
    bba::validate_config(cfg);
    return cfg;
  }
};

bba::Relation parse_relation(const std::string& name) {
  return name == "strong" ? bba::Relation::Strong : bba::Relation::Branching;
}

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

void print_stats(const bba::Lts& l) {
  bba::Stats s = l.stats();
  std::cout << "states:                  " << s.states << "\n"
            << "initial state:           " << l.initial() << "\n"
            << "transitions:             " << s.transitions << "\n"
            << "distinct visible labels: " << s.distinct_visible_labels
            << "\n"
            << "tau transitions:         " << s.tau_transitions << "\n"
            << "deadlock states:         " << s.deadlock_states << "\n";
}

int run(int argc, char** argv) {
  CLI::App app{
      "Finite-state model of a committee-vote consensus protocol with an "
      "LTS verification toolkit"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand(
      "generate", "generate the protocol state space as an .aut file");
  ModelFlags gen_flags;
  gen_flags.add_to(gen);
  std::string gen_out;
  int gen_jobs = 1;
  gen->add_option("-o,--output", gen_out, "output .aut path")->required();
  gen->add_option("--jobs", gen_jobs, "worker threads for exploration")
      ->check(CLI::PositiveNumber);

  // stats
  auto* stats_cmd =
      app.add_subcommand("stats", "print size statistics of an .aut file");
  std::string stats_in;
  stats_cmd->add_option("input", stats_in, "input .aut file")->required();

  // deadlocks
  auto* dead = app.add_subcommand(
      "deadlocks", "list deadlock states with shortest traces");
  std::string dead_in;
  dead->add_option("input", dead_in, "input .aut file")->required();

  // hide
  auto* hide_cmd = app.add_subcommand(
      "hide", "replace matching (or all but kept) labels with tau");
  std::vector<std::string> hide_patterns, hide_keep;
  std::string hide_in, hide_out;
  hide_cmd->add_option("--pattern", hide_patterns,
                       "full-match regex of labels to hide (repeatable)");
  hide_cmd->add_option("--keep", hide_keep,
                       "gate to keep visible, hiding the rest (repeatable)");
  hide_cmd->add_option("input", hide_in, "input .aut file")->required();
  hide_cmd->add_option("-o,--output", hide_out, "output .aut path")
      ->required();

  // rename
  auto* ren = app.add_subcommand("rename", "rewrite labels by regex rules");
  std::vector<std::string> ren_rules;
  std::string ren_in, ren_out;
  ren->add_option("--rule", ren_rules,
                  "rewrite rule REGEX=>TEMPLATE (repeatable; $1 refers to "
                  "the first capture)")
      ->required();
  ren->add_option("input", ren_in, "input .aut file")->required();
  ren->add_option("-o,--output", ren_out, "output .aut path")->required();

  // minimize
  auto* min_cmd = app.add_subcommand(
      "minimize", "minimize modulo strong or branching bisimulation");
  std::string min_relation, min_in, min_out;
  min_cmd
      ->add_option("--relation", min_relation, "strong or branching")
      ->required()
      ->check(CLI::IsMember({"strong", "branching"}));
  min_cmd->add_option("input", min_in, "input .aut file")->required();
  min_cmd->add_option("-o,--output", min_out, "output .aut path")->required();

  // compare
  auto* cmp = app.add_subcommand(
      "compare", "decide bisimilarity of two .aut files (exit 1 if distinct)");
  std::string cmp_relation, cmp_a, cmp_b;
  cmp->add_option("--relation", cmp_relation, "strong or branching")
      ->required()
      ->check(CLI::IsMember({"strong", "branching"}));
  cmp->add_option("a", cmp_a, "first .aut file")->required();
  cmp->add_option("b", cmp_b, "second .aut file")->required();

  // product
  auto* prod = app.add_subcommand(
      "product", "parallel composition of two LTSs with gate synchronization");
  std::string prod_sync, prod_a, prod_b, prod_out;
  prod->add_option("--sync", prod_sync,
                   "comma-separated gates that must synchronize");
  prod->add_option("a", prod_a, "first .aut file")->required();
  prod->add_option("b", prod_b, "second .aut file")->required();
  prod->add_option("-o,--output", prod_out, "output .aut path")->required();

  // check
  auto* check_cmd = app.add_subcommand(
      "check", "run the property suite for one configuration");
  ModelFlags check_flags;
  check_flags.add_to(check_cmd);
  std::string check_json, check_baselines = "baselines";
  int check_jobs = 1;
  check_cmd->add_option("--json", check_json, "also write the report as JSON");
  check_cmd->add_option("--baseline-dir", check_baselines,
                        "directory for frozen regression baselines");
  check_cmd->add_option("--jobs", check_jobs, "worker threads")
      ->check(CLI::PositiveNumber);

  // export-dot
  auto* dot_cmd =
      app.add_subcommand("export-dot", "write a Graphviz view of an LTS");
  bool dot_red = false;
  std::string dot_in, dot_out;
  dot_cmd->add_flag("--deadlocks-red", dot_red,
                    "color deadlock states red");
  dot_cmd->add_option("input", dot_in, "input .aut file")->required();
  dot_cmd->add_option("-o,--output", dot_out, "output .dot path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (app.got_subcommand(gen)) {
    bba::Config cfg = gen_flags.resolve();
    bba::Lts l = bba::generate(bba::build_network(cfg), bba::Limits{},
                               gen_jobs);
    bba::write_aut_file(l, gen_out);
    bba::Stats s = l.stats();
    std::cout << "wrote " << gen_out << ": " << s.states << " states, "
              << s.transitions << " transitions\n";
    return 0;
  }
  if (app.got_subcommand(stats_cmd)) {
    print_stats(bba::read_aut_file(stats_in));
    return 0;
  }
  if (app.got_subcommand(dead)) {
    bba::Lts l = bba::read_aut_file(dead_in);
    auto reports = bba::deadlocks(l);
    if (reports.empty()) {
      std::cout << "no deadlocks\n";
      return 0;
    }
    for (const bba::DeadlockReport& r : reports)
      std::cout << "deadlock state " << r.state << ": "
                << bba::trace_text(r.trace) << "\n";
    return 1;
  }
  if (app.got_subcommand(hide_cmd)) {
    if (hide_patterns.empty() == hide_keep.empty()) {
      std::cerr << "hide: give either --pattern or --keep (not both)\n";
      return 2;
    }
    bba::Lts l = bba::read_aut_file(hide_in);
    if (!hide_patterns.empty()) {
      l = bba::hide(l, hide_patterns);
    } else {
      std::vector<std::string> pats;
      for (const std::string& gate : hide_keep)
        pats.push_back(gate + "( !.*)?");
      l = bba::keep(l, pats);
    }
    bba::write_aut_file(l, hide_out);
    return 0;
  }
  if (app.got_subcommand(ren)) {
    std::vector<bba::RenameRule> rules;
    for (const std::string& raw : ren_rules) {
      std::size_t sep = raw.find("=>");
      if (sep == std::string::npos) {
        std::cerr << "rename: rule '" << raw << "' lacks '=>'\n";
        return 2;
      }
      rules.push_back({raw.substr(0, sep), raw.substr(sep + 2)});
    }
    bba::write_aut_file(bba::rename(bba::read_aut_file(ren_in), rules),
                        ren_out);
    return 0;
  }
  if (app.got_subcommand(min_cmd)) {
    bba::Lts l = bba::read_aut_file(min_in);
    bba::write_aut_file(bba::minimize(l, parse_relation(min_relation)).lts,
                        min_out);
    return 0;
  }
  if (app.got_subcommand(cmp)) {
    bba::Lts a = bba::read_aut_file(cmp_a);
    bba::Lts b = bba::read_aut_file(cmp_b);
    bba::Relation rel = parse_relation(cmp_relation);
    bba::EquivalenceVerdict v = bba::equivalent(a, b, rel);
    nlohmann::json doc = {{"relation", cmp_relation},
                          {"equal", v.equal},
                          {"states_a", a.state_count()},
                          {"states_b", b.state_count()},
                          {"diagnostic_trace", nlohmann::json::array()}};
    for (const bba::Label& lab : v.trace)
      doc["diagnostic_trace"].push_back(bba::format_label(lab));
    if (!v.detail.empty()) doc["detail"] = v.detail;
    std::cout << doc.dump(2) << "\n";
    return v.equal ? 0 : 1;
  }
  if (app.got_subcommand(prod)) {
    std::set<std::string> gates;
    for (const std::string& g : split_list(prod_sync, ',')) gates.insert(g);
    bba::Lts a = bba::read_aut_file(prod_a);
    bba::Lts b = bba::read_aut_file(prod_b);
    bba::write_aut_file(bba::product(a, b, gates), prod_out);
    return 0;
  }
  if (app.got_subcommand(check_cmd)) {
    bba::Config cfg = check_flags.resolve();
    bba::SuiteOptions opt;
    opt.baseline_dir = check_baselines;
    opt.jobs = check_jobs;
    bba::PropertyReport report = bba::run_suite(cfg, opt);
    report.print_table(std::cout);
    if (!check_json.empty()) {
      std::ofstream out(check_json, std::ios::binary);
      if (!out)
        throw bba::IoError("cannot write report to '" + check_json + "'");
      out << report.to_json() << "\n";
    }
    return report.all_passed() ? 0 : 1;
  }
  if (app.got_subcommand(dot_cmd)) {
    bba::Lts l = bba::read_aut_file(dot_in);
    std::ofstream out(dot_out, std::ios::binary);
    if (!out) throw bba::IoError("cannot write '" + dot_out + "'");
    out << bba::write_dot(l, dot_red);
    return 0;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const bba::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
