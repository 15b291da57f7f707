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

#include <gtest/gtest.h>

#include <random>

#include "medeq/augment.hpp"
#include "medeq/generators.hpp"
#include "medeq/oracle.hpp"
#include "medeq/program.hpp"
#include "test_util.hpp"

namespace medeq {
namespace {

AugmentedGame build(const GameTree& g, const std::string& notion, const std::string& objective = "welfare") {
  return build_augmented(g, named_notion(notion), Objective::parse(objective, g.num_players()));
}

MediatorPolicy random_policy(const AugmentedGame& aug, std::mt19937_64& rng) {
  MediatorPolicy pol = uniform_policy(aug);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& p : pol.probs) {
    double s = 0;
    for (double& v : p) s += (v = u(rng));
    for (double& v : p) v /= s;
  }
  return pol;
}

TEST(BestResponse, NoDeviationGameEqualsDirectValue) {
  AugmentedGame aug = build(testing::chance_only_game(), "comm");
  MediatorPolicy pol = uniform_policy(aug);
  EXPECT_DOUBLE_EQ(best_response_value(aug, pol, 0), 0.5);
  EXPECT_DOUBLE_EQ(best_response_value(aug, pol, 1), 0.75);
  EXPECT_DOUBLE_EQ(direct_value(aug, pol, 0), 0.5);
}

TEST(BestResponse, IndifferentGameUnderUniformPolicy) {
  AugmentedGame aug = build(testing::indifferent_game(), "comm");
  EXPECT_DOUBLE_EQ(best_response_value(aug, uniform_policy(aug), 0), 1.0);
}

TEST(BestResponse, NeverBelowDirectValue) {
  std::mt19937_64 rng(5);
  for (const GameTree& g : {gen_kuhn(), gen_persuasion_gap(), gen_random(8, testing::small_params(3))}) {
    for (const std::string& notion : {"comm", "coarse-comm", "nf-coarse-full-cert", "persuasion"}) {
      AugmentedGame aug = build(g, notion);
      for (int trial = 0; trial < 3; ++trial) {
        MediatorPolicy pol = random_policy(aug, rng);
        for (int j = 0; j < aug.num_players(); ++j) EXPECT_GE(best_response_value(aug, pol, j), direct_value(aug, pol, j));
      }
    }
  }
}

TEST(Verify, DominatedRecommendationFails) {
  AugmentedGame aug = build(testing::aligned_game(), "comm");
  MediatorPolicy pol = uniform_policy(aug);
  for (int I = 0; I < aug.tree.num_infosets(); ++I)
    if (!pol.probs[I].empty()) pol.probs[I] = {0.0, 1.0};  // always recommend b
  VerificationReport r = verify_equilibrium(aug, pol, 1e-6);
  EXPECT_FALSE(r.passed);
  EXPECT_DOUBLE_EQ(r.max_gain, 1.0);
  EXPECT_DOUBLE_EQ(r.players[0].direct, 0.0);
  EXPECT_DOUBLE_EQ(r.players[0].best_response, 1.0);
  nlohmann::ordered_json j = report_to_json(r);
  EXPECT_EQ(j["passed"], false);
  EXPECT_EQ(j["players"][0]["player"], 1);
}

TEST(Verify, SingleTerminalPassesTrivially) {
  AugmentedGame aug = build(testing::single_terminal_game(3), "comm");
  VerificationReport r = verify_equilibrium(aug, uniform_policy(aug), 0.0);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.players.size(), 3u);
  EXPECT_DOUBLE_EQ(r.mediator_value, 1.5);
}

TEST(Verify, SolverPoliciesPassAndSandwichDuals) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    GameTree g = gen_random(seed, testing::small_params(2 + seed % 2));
    for (const std::string& notion : {"comm", "full-cert", "coarse-full-cert", "nf-coarse-full-cert"}) {
      AugmentedGame aug = build(g, notion);
      LinearProgram lp = build_program(aug);
      LpSolution sol = solve(lp.model);
      ASSERT_EQ(sol.status, LpStatus::kOptimal);
      MediatorPolicy pol = extract_policy(aug, lp, sol);
      VerificationReport r = verify_equilibrium(aug, pol, 1e-6);
      EXPECT_TRUE(r.passed) << "seed " << seed << " " << notion << " gain " << r.max_gain;
      EXPECT_NEAR(r.mediator_value, sol.objective, 1e-9);
      for (int j = 0; j < aug.num_players(); ++j) {
        double bound = sol.x[lp.v_offset[j]];
        EXPECT_LE(r.players[j].gain, bound + 1e-9);
        EXPECT_LE(bound, 1e-9);
      }
    }
  }
}

TEST(EnumerateDeviations, OneConstraintPerAction) {
  for (int k : {2, 3, 5}) {
    GameBuilder b(1);
    std::vector<std::string> acts;
    for (int a = 0; a < k; ++a) acts.push_back("a" + std::to_string(a));
    int r = b.decision(-1, "", 0, "I", acts);
    for (int a = 0; a < k; ++a) b.terminal(r, acts[a], {static_cast<double>(a)});
    AugmentedGame aug = build(std::move(b).build(), "nf-coarse-comm");
    EnumeratedProgram ep = enumerate_deviation_lp(aug);
    EXPECT_EQ(ep.pure_strategies[0], k + 1);
    EXPECT_EQ(ep.constraints[0], k);
  }
}

TEST(EnumerateDeviations, MatchesDualizedOptimum) {
  std::vector<GameTree> games{gen_persuasion_gap(), testing::aligned_game(), testing::indifferent_game()};
  for (std::uint64_t seed = 11; seed <= 16; ++seed) games.push_back(gen_random(seed, testing::small_params(2 + seed % 2)));
  for (const GameTree& g : games) {
    for (const std::string& notion : {"comm", "full-cert", "coarse-full-cert", "nf-coarse-full-cert", "persuasion"}) {
      AugmentedGame aug = build(g, notion, g.num_players() == 2 ? "1,2" : "welfare");
      LpSolution dual = solve(build_program(aug).model);
      EnumeratedProgram ep = enumerate_deviation_lp(aug);
      LpSolution en = solve(ep.model);
      ASSERT_EQ(dual.status, LpStatus::kOptimal);
      ASSERT_EQ(en.status, LpStatus::kOptimal);
      EXPECT_NEAR(dual.objective, en.objective, 1e-6) << notion;
    }
  }
}

TEST(EnumerateDeviations, RedundantConstraintKeepsOptimum) {
  AugmentedGame aug = build(gen_random(12, testing::small_params(2)), "comm");
  EnumeratedProgram ep = enumerate_deviation_lp(aug);
  double before = solve(ep.model).objective;
  int r = ep.model.num_rows() - 1;
  ASSERT_EQ(ep.model.sense[r], RowSense::kLe);
  // A weaker copy of an existing incentive constraint: half its gain minus slack.
  std::vector<std::pair<int, double>> weaker = ep.model.rows[r];
  for (auto& [j, v] : weaker) v *= 0.5;
  weaker.emplace_back(0, -1.0);
  std::sort(weaker.begin(), weaker.end());
  ep.model.add_row("dominated", weaker, RowSense::kLe, 0.0);
  EXPECT_NEAR(solve(ep.model).objective, before, 1e-9);
}

TEST(EnumerateDeviations, BudgetGuard) {
  AugmentedGame aug = build(gen_kuhn(), "comm");
  EXPECT_THROW(enumerate_deviation_lp(aug, 50), Error);
}

TEST(Payments, HalfMixGivesMidpointTransfer) {
  AugmentedGame aug = apply_payments(build(testing::single_terminal_game(), "comm"), -1, 3);
  MediatorPolicy pol = uniform_policy(aug);
  EXPECT_NEAR(direct_value(aug, pol, 0), 0.5 + (-1 + 3) / 2.0, 1e-12);
  EXPECT_NEAR(direct_value(aug, pol, 1), 0.5 + (-1 + 3) / 2.0, 1e-12);
  EXPECT_NEAR(direct_path_value(aug, pol, 2), 1.0 - 2 * (-1 + 3) / 2.0, 1e-12);
}

TEST(Payments, LargeRangeEnforcesAnyPlan) {
  // Welfare-best plan ignoring incentives, then paid U when honest.
  for (const std::string& notion : {"full-cert", "comm"}) {
    GameTree g = gen_persuasion_gap();
    AugmentedGame plain = build(g, notion);
    LinearProgram lp = build_program(plain);
    LpModel relaxed;
    for (int k = 0; k < lp.num_mediator_columns(); ++k)
      relaxed.add_col(lp.model.col_names[k], 0, kInf, lp.model.obj[k]);
    for (int r = 0; r < lp.mediator.num_rows(); ++r)
      relaxed.add_row(lp.model.row_names[r], lp.model.rows[r], RowSense::kEq, lp.model.rhs[r]);
    LpSolution best = solve(relaxed);
    ASSERT_EQ(best.status, LpStatus::kOptimal);
    LpSolution padded = best;
    padded.x.resize(lp.model.num_cols(), 0.0);
    MediatorPolicy plan = extract_policy(plain, lp, padded);

    const double U = 2.0;  // reward range of the game
    AugmentedGame paid = apply_payments(plain, 0.0, U);
    MediatorPolicy pol = uniform_policy(paid);
    for (int I = 0; I < plain.tree.num_infosets(); ++I)
      if (!plan.probs[I].empty()) pol.probs[I] = plan.probs[I];
    for (int id = 0; id < paid.tree.num_nodes(); ++id) {
      if (paid.info[id].stage != Stage::kPayment) continue;
      bool honest = paid.info[id].deviator != paid.info[id].payee;
      pol.probs[paid.tree.node(id).infoset] = honest ? std::vector<double>{0, 1} : std::vector<double>{1, 0};
    }
    VerificationReport r = verify_equilibrium(paid, pol, 1e-9);
    EXPECT_TRUE(r.passed) << notion << " gain " << r.max_gain;
    EXPECT_NEAR(r.mediator_value, best.objective - 2 * U, 1e-9);
    NotionConfig c = named_notion(notion);
    c.payments = std::make_pair(0.0, U);
    LpSolution opt = solve(build_program(build_augmented(g, c, Objective::welfare(2))).model);
    ASSERT_EQ(opt.status, LpStatus::kOptimal);
    EXPECT_GE(opt.objective, r.mediator_value - 1e-9);
  }
}

}  // namespace
}  // namespace medeq
