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

// Solve helpers and game lists shared by the property and acceptance suites.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "medeq/medeq.hpp"
#include "test_util.hpp"

namespace medeq::testing {

struct Solved {
  AugmentedGame aug;
  LinearProgram lp;
  LpSolution sol;
  MediatorPolicy policy;
  VerificationReport report;

  double value() const { return sol.objective; }
  bool ok() const { return sol.status == LpStatus::kOptimal; }
};

inline Solved solve_notion(const GameTree& g, const NotionConfig& config, const Objective& objective) {
  Solved s;
  s.aug = build_augmented(g, config, objective);
  s.lp = build_program(s.aug);
  s.sol = solve(s.lp.model, {});
  if (s.ok()) {
    s.policy = extract_policy(s.aug, s.lp, s.sol);
    s.report = verify_equilibrium(s.aug, s.policy);
  }
  return s;
}

inline Solved solve_notion(const GameTree& g, const std::string& notion) {
  return solve_notion(g, named_notion(notion), Objective::welfare(g.num_players()));
}

inline NotionConfig with_payments(NotionConfig c, double lo, double hi) {
  c.payments = std::make_pair(lo, hi);
  return c;
}

struct NamedGame {
  std::string name;
  GameTree game;
};

inline RandomGameParams suite_params(int index) {
  RandomGameParams p;
  p.players = 2 + index % 2;
  p.depth = 3 + (index / 2) % 2;
  p.branching = 2;
  return p;
}

// Random games indexed 0, 1, ...: seed 101 + index, alternating 2 and 3
// players and depth 3 and 4.
inline NamedGame suite_random_game(int index) {
  RandomGameParams p = suite_params(index);
  std::uint64_t seed = 101 + index;
  return {"random" + std::to_string(seed) + "_p" + std::to_string(p.players) + "_d" + std::to_string(p.depth),
          gen_random(seed, p)};
}

inline NamedGame zero_sum_game(std::uint64_t seed) {
  RandomGameParams p = small_params(2, true);
  p.depth = 4;
  return {"zerosum" + std::to_string(seed), gen_random(seed, p)};
}

// Fixed games plus the first `random_count` suite random games.
inline std::vector<NamedGame> test_games(int random_count) {
  std::vector<NamedGame> games{{"persuasion_gap", gen_persuasion_gap()}, {"kuhn", gen_kuhn()}};
  for (int i = 0; i < random_count; ++i) games.push_back(suite_random_game(i));
  return games;
}

}  // namespace medeq::testing
