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

#include <cstdlib>
#include <fstream>

#include "medeq/augment.hpp"
#include "medeq/generators.hpp"
#include "medeq/oracle.hpp"
#include "medeq/program.hpp"
#include "test_util.hpp"

namespace medeq {
namespace {

struct Solved {
  AugmentedGame aug;
  LinearProgram lp;
  LpSolution sol;
};

Solved run(const GameTree& g, const NotionConfig& c, const Objective& o) {
  Solved s{build_augmented(g, c, o), {}, {}};
  s.lp = build_program(s.aug);
  s.sol = solve(s.lp.model);
  return s;
}

Solved run(const GameTree& g, const std::string& notion, const std::string& objective = "welfare") {
  return run(g, named_notion(notion), Objective::parse(objective, g.num_players()));
}

TEST(BuildProgram, AlignedGameRecommendsTheGoodAction) {
  Solved s = run(testing::aligned_game(), "comm");
  ASSERT_EQ(s.sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(s.sol.objective, 1.0, 1e-9);
  MediatorPolicy pol = extract_policy(s.aug, s.lp, s.sol);
  std::vector<double> out = outcome_distribution(s.aug, pol);
  EXPECT_NEAR(out[testing::node_by_label(s.aug.base, "za")], 1.0, 1e-9);
}

TEST(BuildProgram, IndifferentPlayerTiesBreakTowardMediator) {
  Solved s = run(testing::indifferent_game(), "comm", "player:2");
  ASSERT_EQ(s.sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(s.sol.objective, 1.0, 1e-9);
}

TEST(BuildProgram, NoDeviationGameIsMediatorPolytopeOnly) {
  Solved s = run(testing::chance_only_game(), "comm");
  ASSERT_EQ(s.sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(s.sol.objective, 1.25, 1e-12);
  for (int r = 0; r < s.lp.model.num_rows(); ++r)
    for (auto [j, v] : s.lp.model.rows[r])
      if (s.lp.model.row_names[r].rfind("dual", 0) == 0) EXPECT_GE(j, s.lp.num_mediator_columns());
}

TEST(BuildProgram, LayoutAndSize) {
  for (const std::string& notion : notion_names()) {
    Solved s = run(gen_kuhn(), notion);
    const LpModel& m = s.lp.model;
    int expected_cols = s.lp.mediator.num_columns;
    int expected_rows = s.lp.mediator.num_rows();
    for (const SequenceFormSystem& p : s.lp.players) {
      expected_cols += p.num_rows();
      expected_rows += p.num_columns + 1;
    }
    EXPECT_EQ(m.num_cols(), expected_cols);
    EXPECT_EQ(m.num_rows(), expected_rows);
    EXPECT_LE(m.num_rows() + m.num_cols(), 2 * s.aug.num_agents() * s.aug.tree.num_nodes());
    EXPECT_EQ(m.col_names.front(), "xM_0");
    EXPECT_EQ(m.col_names[s.lp.v_offset[1]], "v2_0");
    EXPECT_EQ(m.row_names.back(), "gain2");
  }
}

TEST(Solve, PersuasionGapPersuasionRevealsTheCoin) {
  Solved s = run(gen_persuasion_gap(), "persuasion");
  ASSERT_EQ(s.sol.status, LpStatus::kOptimal);
  EXPECT_GE(s.sol.objective, 1.5 - 1e-6);
  MediatorPolicy pol = extract_policy(s.aug, s.lp, s.sol);
  std::vector<double> out = outcome_distribution(s.aug, pol);
  const GameTree& g = s.aug.base;
  EXPECT_NEAR(out[testing::node_by_label(g, "coinH.H")], 0.25, 1e-9);
  EXPECT_NEAR(out[testing::node_by_label(g, "coinT.T")], 0.25, 1e-9);
  EXPECT_NEAR(out[testing::node_by_label(g, "coinH.T")], 0.0, 1e-9);
  EXPECT_NEAR(out[testing::node_by_label(g, "coinT.H")], 0.0, 1e-9);
  EXPECT_TRUE(verify_equilibrium(s.aug, pol, 1e-6).passed);
}

TEST(ExtractPolicy, ProbabilitiesFormDistributions) {
  for (const std::string& notion : {"comm", "full-cert", "nf-coarse-full-cert", "persuasion"}) {
    Solved s = run(gen_persuasion_gap(), notion);
    MediatorPolicy pol = extract_policy(s.aug, s.lp, s.sol);
    for (int I = 0; I < s.aug.tree.num_infosets(); ++I) {
      bool med = s.aug.tree.infoset(I).player == s.aug.mediator();
      ASSERT_EQ(pol.probs[I].empty(), !med);
      if (!med) continue;
      double sum = 0;
      for (double p : pol.probs[I]) {
        EXPECT_GE(p, 0.0);
        sum += p;
      }
      EXPECT_NEAR(sum, 1.0, 1e-9);
    }
  }
}

TEST(ExtractPolicy, DeterministicVertex) {
  Solved s = run(testing::chance_only_game(), "comm");
  Solved a = run(testing::aligned_game(), "full-cert");
  for (const Solved* x : {&s, &a}) {
    MediatorPolicy pol = extract_policy(x->aug, x->lp, x->sol);
    for (const auto& p : pol.probs)
      for (double v : p) EXPECT_TRUE(std::abs(v) < 1e-9 || std::abs(v - 1) < 1e-9);
  }
}

TEST(ExtractPolicy, UnreachableInfosetsAreUniformAndFlagged) {
  Solved s = run(gen_persuasion_gap(), "persuasion");
  MediatorPolicy pol = extract_policy(s.aug, s.lp, s.sol);
  int flagged = 0;
  for (int I = 0; I < s.aug.tree.num_infosets(); ++I) {
    if (!pol.unreachable[I]) continue;
    ++flagged;
    for (double p : pol.probs[I]) EXPECT_DOUBLE_EQ(p, 1.0 / pol.probs[I].size());
  }
  EXPECT_GT(flagged, 0);
  LpSolution bad;
  bad.status = LpStatus::kInfeasible;
  EXPECT_THROW(extract_policy(s.aug, s.lp, bad), Error);
}

TEST(PolicyJson, RoundTripAndErrors) {
  Solved s = run(gen_persuasion_gap(), "full-cert");
  MediatorPolicy pol = extract_policy(s.aug, s.lp, s.sol);
  nlohmann::ordered_json j = policy_to_json(s.aug, pol);
  MediatorPolicy back = policy_from_json(s.aug, nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.probs, pol.probs);
  MediatorPolicy wrapped = policy_from_json(s.aug, nlohmann::json{{"policy", nlohmann::json::parse(j.dump())}});
  EXPECT_EQ(wrapped.probs, pol.probs);
  EXPECT_THROW(policy_from_json(s.aug, nlohmann::json{{"M.999", {{"x", 1}}}}), Error);
  EXPECT_THROW(policy_from_json(s.aug, nlohmann::json::array()), Error);
  std::string first = j.begin().key();
  std::string act = j.begin().value().begin().key();
  EXPECT_THROW(policy_from_json(s.aug, nlohmann::json{{first, {{act, 0.5}}}}), Error);
  EXPECT_THROW(policy_from_json(s.aug, nlohmann::json{{first, {{"nope", 1.0}}}}), Error);
}

TEST(Payments, ZeroRangeKeepsTheValue) {
  for (const GameTree& g : {gen_persuasion_gap(), gen_kuhn(), gen_random(5, testing::small_params(2))}) {
    for (const std::string& notion : {"comm", "full-cert"}) {
      double plain = run(g, notion).sol.objective;
      NotionConfig c = named_notion(notion);
      c.payments = std::make_pair(0.0, 0.0);
      Solved paid = run(g, c, Objective::welfare(g.num_players()));
      ASSERT_EQ(paid.sol.status, LpStatus::kOptimal);
      EXPECT_NEAR(paid.sol.objective, plain, 1e-9);
    }
  }
}

std::string golden_path(const std::string& name) { return std::string(MEDEQ_TEST_DIR) + "/golden/" + name; }

void expect_golden(const std::string& name, const std::string& text) {
  if (std::getenv("MEDEQ_UPDATE_GOLDEN")) {
    std::ofstream(golden_path(name), std::ios::binary) << text;
    return;
  }
  EXPECT_EQ(testing::read_file(golden_path(name)), text) << name;
}

TEST(ExportLp, GoldenFiles) {
  expect_golden("aligned.lp", export_lp(build_program(
                                  build_augmented(testing::aligned_game(), named_notion("comm"), Objective::welfare(1)))));
  expect_golden("indifferent.lp",
                export_lp(build_program(build_augmented(testing::indifferent_game(), named_notion("comm"),
                                                        Objective::player(2, 1)))));
  expect_golden("persuasion_gap.lp",
                export_lp(build_program(
                    build_augmented(gen_persuasion_gap(), named_notion("persuasion"), Objective::welfare(2)))));
}

TEST(ExportLp, Sections) {
  std::string text = export_lp(
      build_program(build_augmented(testing::aligned_game(), named_notion("comm"), Objective::welfare(1))));
  for (const char* section : {"Maximize\n", "Subject To\n", "Bounds\n", " v1_0 free\n", "End\n"})
    EXPECT_NE(text.find(section), std::string::npos) << section;
  LpModel m;
  m.add_col("a", -1, 2, 0);
  m.add_col("b", -kInf, 4, -1.5);
  m.add_row("r", {{0, 1}, {1, -1}}, RowSense::kEq, 0.25);
  EXPECT_EQ(export_lp(m),
            "\\ medeq mediator program\nMaximize\n obj: - 1.5 b\nSubject To\n r: a - b = 0.25\n"
            "Bounds\n -1 <= a <= 2\n -inf <= b <= 4\nEnd\n");
}

}  // namespace
}  // namespace medeq
