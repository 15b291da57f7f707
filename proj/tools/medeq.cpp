// Copyright 2026 The medeq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// medeq command-line driver.
//
//   medeq solve     GAME|--gen NAME ARGS --notion N [--objective O] [--pay L U] [--costs F] [--out F]
//   medeq frontier  GAME|--gen ... --notion N [--k 64] [--out PREFIX]
//   medeq export    GAME|--gen ... --notion N [--enumerated] [--out F]
//   medeq verify    GAME|--gen ... --notion N --policy F
//   medeq generate  --gen NAME ARGS [--out F]
//   medeq check     GAME|--gen ... [--notion N]

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "medeq/medeq.hpp"

namespace {

using medeq::Error;

constexpr int kExitFailed = 1;
constexpr int kExitBadInput = 2;

struct GameOptions {
  std::string path;
  std::vector<std::string> gen;
};

struct NotionOptions {
  std::string notion = "comm";
  std::string objective = "welfare";
  std::vector<double> pay;
  std::string costs;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v == 0 ? 0.0 : v);
  return buf;
}

int parse_int_arg(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (...) {
  }
  throw Error("invalid " + what + " '" + s + "'");
}

double parse_double_arg(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (...) {
  }
  throw Error("invalid " + what + " '" + s + "'");
}

// kuhn | persuasion_gap | random SEED [key=value ...] | negotiation P1 P2 ROUNDS
medeq::GameTree generate(const std::vector<std::string>& gen) {
  if (gen.empty()) throw Error("--gen needs a generator name");
  const std::string& name = gen[0];
  auto want = [&](std::size_t lo, std::size_t hi) {
    if (gen.size() - 1 < lo || gen.size() - 1 > hi)
      throw Error("generator '" + name + "' takes " + std::to_string(lo) +
                  (lo == hi ? "" : ".." + std::to_string(hi)) + " arguments");
  };
  if (name == "kuhn") {
    want(0, 0);
    return medeq::gen_kuhn();
  }
  if (name == "persuasion_gap") {
    want(0, 0);
    return medeq::gen_persuasion_gap();
  }
  if (name == "negotiation") {
    want(3, 3);
    return medeq::gen_negotiation(parse_int_arg(gen[1], "power"), parse_int_arg(gen[2], "power"),
                                  parse_int_arg(gen[3], "rounds"));
  }
  if (name == "random") {
    want(1, 9);
    medeq::RandomGameParams p;
    std::uint64_t seed = static_cast<std::uint64_t>(parse_int_arg(gen[1], "seed"));
    for (std::size_t i = 2; i < gen.size(); ++i) {
      auto eq = gen[i].find('=');
      if (eq == std::string::npos) throw Error("random generator options are key=value, got '" + gen[i] + "'");
      std::string key = gen[i].substr(0, eq), val = gen[i].substr(eq + 1);
      if (key == "depth") p.depth = parse_int_arg(val, key);
      else if (key == "branching") p.branching = parse_int_arg(val, key);
      else if (key == "players") p.players = parse_int_arg(val, key);
      else if (key == "chance") p.chance_freq = parse_double_arg(val, key);
      else if (key == "merge") p.infoset_merge_prob = parse_double_arg(val, key);
      else if (key == "terminal") p.terminal_prob = parse_double_arg(val, key);
      else if (key == "zero_sum") p.zero_sum = parse_int_arg(val, key) != 0;
      else throw Error("unknown random generator option '" + key + "'");
    }
    return medeq::gen_random(seed, p);
  }
  throw Error("unknown generator '" + name + "' (kuhn, persuasion_gap, random, negotiation)");
}

medeq::GameTree load_game(const GameOptions& g) {
  if (!g.gen.empty() && !g.path.empty()) throw Error("give either a game file or --gen, not both");
  if (!g.gen.empty()) return generate(g.gen);
  if (g.path.empty()) throw Error("no game given (file path or --gen)");
  return medeq::parse_game(read_text(g.path));
}

medeq::NotionConfig load_notion(const NotionOptions& o) {
  medeq::NotionConfig c;
  const auto& names = medeq::notion_names();
  if (std::find(names.begin(), names.end(), o.notion) != names.end()) c = medeq::named_notion(o.notion);
  else if (std::filesystem::exists(o.notion)) c = medeq::parse_notion_json(read_text(o.notion));
  else throw Error("--notion must be a notion name or a JSON file, got '" + o.notion + "'");
  if (!o.pay.empty()) c.payments = std::make_pair(o.pay[0], o.pay[1]);
  if (!o.costs.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_text(o.costs));
    } catch (const nlohmann::json::exception& e) {
      throw Error(std::string("invalid costs JSON: ") + e.what());
    }
    medeq::parse_costs(j, c);
  }
  c.check();
  return c;
}

void add_game_options(CLI::App* cmd, GameOptions& g) {
  cmd->add_option("game", g.path, "Game file (EFG-S)");
  cmd->add_option("--gen", g.gen, "Built-in generator: kuhn | persuasion_gap | random SEED [k=v..] | negotiation P1 P2 R")
      ->expected(1, 10);
}

void add_notion_options(CLI::App* cmd, NotionOptions& o, bool objective) {
  cmd->add_option("--notion", o.notion, "Notion name or JSON config file")->capture_default_str();
  if (objective)
    cmd->add_option("--objective", o.objective, "welfare | player:i | w1,w2,..")->capture_default_str();
  cmd->add_option("--pay", o.pay, "Payment range L U")->expected(2);
  cmd->add_option("--costs", o.costs, "Message costs JSON {infoset: {message: cost}}");
}

void print_nrc_caveat(const medeq::AugmentedGame& aug) {
  medeq::NrcResult nrc = medeq::check_nrc(aug.family);
  if (nrc.holds) return;
  std::cout << "caveat: nested range condition fails (" << medeq::message_name(aug.base, nrc.I_prime)
            << " can report " << medeq::message_name(aug.base, nrc.I) << " but not "
            << medeq::message_name(aug.base, nrc.s) << "); the value is optimal among direct mediators only\n";
}

void print_report(const medeq::VerificationReport& r, double tol) {
  std::cout << "verification: " << (r.passed ? "passed" : "FAILED") << " (max gain " << fmt(r.max_gain)
            << ", tol " << fmt(tol) << ")\n";
  for (std::size_t i = 0; i < r.players.size(); ++i)
    std::cout << "  player " << i + 1 << ": direct " << fmt(r.players[i].direct) << ", best response "
              << fmt(r.players[i].best_response) << ", gain " << fmt(r.players[i].gain) << "\n";
}

nlohmann::ordered_json stats_json(const medeq::AugmentedGame& aug) {
  const medeq::AugStats& s = aug.stats;
  return {{"base_nodes", s.base_nodes},   {"base_sequences", s.base_sequences}, {"branching", s.branching},
          {"depth", s.depth},             {"nodes", s.nodes},                   {"c_comm", s.c_comm},
          {"c_fullcert", s.c_fullcert}};
}

int cmd_solve(const GameOptions& go, const NotionOptions& no, const std::string& out, double tol) {
  medeq::GameTree game = load_game(go);
  medeq::NotionConfig config = load_notion(no);
  medeq::Objective obj = medeq::Objective::parse(no.objective, game.num_players());
  medeq::AugmentedGame aug = medeq::build_augmented(game, config, obj);
  medeq::LinearProgram lp = medeq::build_program(aug);
  medeq::LpSolution sol = medeq::solve(lp.model, {});

  std::cout << "game: " << game.num_nodes() << " nodes, " << game.num_players() << " players\n";
  std::cout << "notion: " << medeq::notion_label(aug.config);
  if (aug.config.payments)
    std::cout << ", payments [" << fmt(aug.config.payments->first) << ", " << fmt(aug.config.payments->second) << "]";
  if (!aug.config.costs.empty()) std::cout << ", " << aug.config.costs.size() << " message costs";
  std::cout << "\n";
  std::cout << "augmented: " << aug.tree.num_nodes() << " nodes, C_comm " << fmt(aug.stats.c_comm)
            << ", C_fullcert " << fmt(aug.stats.c_fullcert) << "\n";
  std::cout << "lp: " << lp.model.num_rows() << " rows, " << lp.model.num_cols() << " columns, "
            << sol.iterations << " iterations\n";
  std::cout << "status: " << medeq::to_string(sol.status) << "\n";
  print_nrc_caveat(aug);

  nlohmann::ordered_json j;
  j["status"] = medeq::to_string(sol.status);
  int code = kExitFailed;
  if (sol.status == medeq::LpStatus::kOptimal) {
    medeq::MediatorPolicy pol = medeq::extract_policy(aug, lp, sol);
    medeq::VerificationReport rep = medeq::verify_equilibrium(aug, pol, tol);
    int med = 0, unreachable = 0, pure = 0;
    nlohmann::ordered_json unreached = nlohmann::ordered_json::array();
    for (int I = 0; I < aug.tree.num_infosets(); ++I) {
      if (pol.probs[I].empty()) continue;
      ++med;
      if (pol.unreachable[I]) {
        ++unreachable;
        unreached.push_back(aug.tree.infoset(I).name);
      }
      bool det = std::any_of(pol.probs[I].begin(), pol.probs[I].end(), [](double p) { return p > 1 - 1e-9; });
      pure += det;
    }
    std::cout << "value: " << fmt(sol.objective) << "\n";
    std::cout << "policy: " << med << " mediator infosets, " << pure << " deterministic, " << unreachable
              << " unreachable (uniform)\n";
    print_report(rep, tol);
    j["objective"] = sol.objective;
    j["notion"] = medeq::notion_label(aug.config);
    j["weights"] = obj.weights;
    j["stats"] = stats_json(aug);
    j["verification"] = medeq::report_to_json(rep);
    j["unreachable"] = std::move(unreached);
    j["policy"] = medeq::policy_to_json(aug, pol);
    code = rep.passed ? 0 : kExitFailed;
  }
  if (!out.empty()) write_text(out, j.dump(2) + "\n");
  return code;
}

int cmd_frontier(const GameOptions& go, const NotionOptions& no, int k, const std::string& out) {
  medeq::GameTree game = load_game(go);
  medeq::NotionConfig config = load_notion(no);
  std::vector<medeq::FrontierPoint> pts = medeq::payoff_frontier(game, config, k);
  std::string csv = medeq::frontier_csv(pts);
  nlohmann::ordered_json j = medeq::frontier_json(pts);
  int failed = 0, unverified = 0;
  for (const auto& p : pts) {
    failed += !p.ok();
    unverified += p.ok() && p.max_gain > 1e-6;
  }
  if (out.empty()) {
    std::cout << csv;
  } else {
    write_text(out + ".csv", csv);
    write_text(out + ".json", j.dump(2) + "\n");
    std::cout << "wrote " << out << ".csv and " << out << ".json (" << pts.size() - failed << " points, "
              << j["hull"].size() << " hull vertices)\n";
  }
  if (failed) std::cerr << "warning: " << failed << " directions did not solve to optimality\n";
  if (unverified) std::cerr << "warning: " << unverified << " directions failed verification\n";
  return failed || unverified ? kExitFailed : 0;
}

int cmd_export(const GameOptions& go, const NotionOptions& no, bool enumerated, const std::string& out) {
  medeq::GameTree game = load_game(go);
  medeq::AugmentedGame aug =
      medeq::build_augmented(game, load_notion(no), medeq::Objective::parse(no.objective, game.num_players()));
  std::string text = enumerated ? medeq::export_lp(medeq::enumerate_deviation_lp(aug).model)
                                : medeq::export_lp(medeq::build_program(aug));
  if (out.empty()) std::cout << text;
  else write_text(out, text);
  return 0;
}

int cmd_verify(const GameOptions& go, const NotionOptions& no, const std::string& policy, double tol,
               const std::string& out) {
  medeq::GameTree game = load_game(go);
  medeq::AugmentedGame aug =
      medeq::build_augmented(game, load_notion(no), medeq::Objective::parse(no.objective, game.num_players()));
  nlohmann::json pj;
  try {
    pj = nlohmann::json::parse(read_text(policy));
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("invalid policy JSON: ") + e.what());
  }
  medeq::MediatorPolicy pol = medeq::policy_from_json(aug, pj);
  medeq::VerificationReport rep = medeq::verify_equilibrium(aug, pol, tol);
  std::cout << "value: " << fmt(rep.mediator_value) << "\n";
  print_report(rep, tol);
  if (!out.empty()) write_text(out, medeq::report_to_json(rep).dump(2) + "\n");
  return rep.passed ? 0 : kExitFailed;
}

int cmd_generate(const GameOptions& go, const std::string& out) {
  if (go.gen.empty()) throw Error("generate needs --gen");
  std::string text = medeq::serialize_game(generate(go.gen));
  if (out.empty()) std::cout << text;
  else write_text(out, text);
  return 0;
}

int cmd_check(const GameOptions& go, const NotionOptions& no) {
  medeq::GameTree game = load_game(go);
  medeq::ValidationReport rep = medeq::validate(game);
  std::cout << "nodes: " << game.num_nodes() << ", players: " << game.num_players()
            << ", infosets: " << game.num_infosets() << "\n";
  std::cout << "perfect recall and structure: " << (rep.ok() ? "ok" : "violated") << "\n";
  for (const auto& v : rep.violations) std::cout << "  " << v.message << "\n";
  std::cout << "timeable: " << (rep.timeable ? "yes" : "no") << "\n";
  std::cout << "fixed turn order: " << (rep.fixed_turn_order ? "yes" : "no (normalized before solving)") << "\n";
  if (!rep.ok()) return kExitFailed;
  medeq::GameTree norm = medeq::normalize_turn_order(game);
  medeq::NotionConfig config = load_notion(no);
  medeq::MessageFamily family = medeq::make_family(norm, config);
  medeq::NrcResult nrc = medeq::check_nrc(family);
  std::cout << "nested range condition (" << medeq::notion_label(config) << "): ";
  if (nrc.holds) {
    std::cout << "holds\n";
  } else {
    std::cout << "fails: " << medeq::message_name(norm, nrc.I_prime) << " can report "
              << medeq::message_name(norm, nrc.I) << " but not " << medeq::message_name(norm, nrc.s) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal mediated equilibria in extensive-form games"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  GameOptions go;
  NotionOptions no;
  std::string out, policy;
  double tol = 1e-6;
  int k = 64;
  bool enumerated = false;

  CLI::App* solve = app.add_subcommand("solve", "Solve for an optimal equilibrium and verify it");
  add_game_options(solve, go);
  add_notion_options(solve, no, true);
  solve->add_option("--out", out, "Write the solution JSON here");
  solve->add_option("--tol", tol, "Verification tolerance")->capture_default_str();

  CLI::App* frontier = app.add_subcommand("frontier", "Trace the two-player payoff set");
  add_game_options(frontier, go);
  add_notion_options(frontier, no, false);
  frontier->add_option("--k", k, "Number of directions")->capture_default_str();
  frontier->add_option("--out", out, "Write PREFIX.csv and PREFIX.json");

  CLI::App* exp = app.add_subcommand("export", "Write the mediator LP in CPLEX LP format");
  add_game_options(exp, go);
  add_notion_options(exp, no, true);
  exp->add_flag("--enumerated", enumerated, "Export the enumerated-deviation LP instead");
  exp->add_option("--out", out, "Output file (default stdout)");

  CLI::App* verify = app.add_subcommand("verify", "Check a mediator policy for profitable deviations");
  add_game_options(verify, go);
  add_notion_options(verify, no, true);
  verify->add_option("--policy", policy, "Policy JSON")->required();
  verify->add_option("--tol", tol, "Verification tolerance")->capture_default_str();
  verify->add_option("--out", out, "Write the report JSON here");

  CLI::App* gen = app.add_subcommand("generate", "Write a generated game in EFG-S format");
  gen->add_option("--gen", go.gen, "kuhn | persuasion_gap | random SEED [k=v..] | negotiation P1 P2 R")
      ->expected(1, 10)
      ->required();
  gen->add_option("--out", out, "Output file (default stdout)");

  CLI::App* check = app.add_subcommand("check", "Validate a game and test the nested range condition");
  add_game_options(check, go);
  check->add_option("--notion", no.notion, "Notion whose message family is checked")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitBadInput;
  }
  try {
    if (*solve) return cmd_solve(go, no, out, tol);
    if (*frontier) return cmd_frontier(go, no, k, out);
    if (*exp) return cmd_export(go, no, enumerated, out);
    if (*verify) return cmd_verify(go, no, policy, tol, out);
    if (*gen) return cmd_generate(go, out);
    if (*check) return cmd_check(go, no);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitBadInput;
}
