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

#include <cmath>
#include <cstdlib>

#include "medeq/frontier.hpp"
#include "medeq/generators.hpp"
#include "test_util.hpp"

namespace medeq {
namespace {

TEST(Hull, CollinearPointsGiveSegment) {
  std::vector<Point2> h = hull({{0, 0}, {1, 1}, {2, 2}});
  EXPECT_EQ(h, (std::vector<Point2>{{0, 0}, {2, 2}}));
}

TEST(Hull, UnitSquareCounterclockwise) {
  std::vector<Point2> h = hull({{1, 1}, {0, 1}, {0.5, 0.5}, {1, 0}, {0, 0}});
  EXPECT_EQ(h, (std::vector<Point2>{{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
}

TEST(Hull, MergesNearDuplicatesAndDegenerateInput) {
  EXPECT_EQ(hull({}).size(), 0u);
  EXPECT_EQ(hull({{1, 2}, {1 + 1e-9, 2 - 1e-9}}).size(), 1u);
  std::vector<Point2> h = hull({{0, 0}, {1, 0}, {1, 1e-9}, {0, 1}, {1e-8, 1}});
  EXPECT_EQ(h.size(), 3u);
}

TEST(Support, MaxOverVertices) {
  std::vector<Point2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  EXPECT_DOUBLE_EQ(support(sq, 1, 1), 2);
  EXPECT_DOUBLE_EQ(support(sq, -1, 0), 0);
}

TEST(PayoffFrontier, ZeroSumPointsOnAntiDiagonal) {
  std::vector<FrontierPoint> pts = payoff_frontier(gen_kuhn(), named_notion("comm"), 8);
  ASSERT_EQ(pts.size(), 8u);
  for (const FrontierPoint& p : pts) {
    ASSERT_TRUE(p.ok());
    EXPECT_NEAR(p.u.x + p.u.y, 0.0, 1e-9);
  }
  EXPECT_LE(frontier_hull(pts).size(), 2u);
}

TEST(PayoffFrontier, SingleTerminalRepeatsOnePoint) {
  std::vector<FrontierPoint> pts = payoff_frontier(testing::single_terminal_game(), named_notion("full-cert"), 6);
  for (const FrontierPoint& p : pts) EXPECT_EQ(p.u, (Point2{0.5, 0.5}));
  EXPECT_EQ(frontier_hull(pts).size(), 1u);
}

TEST(PayoffFrontier, PersuasionGapPersuasionDiagonal) {
  std::vector<FrontierPoint> pts = payoff_frontier(gen_persuasion_gap(), named_notion("persuasion"), 8);
  const FrontierPoint& diag = pts[1];
  EXPECT_DOUBLE_EQ(diag.theta, std::numbers::pi / 4);
  EXPECT_GE(diag.u.x + diag.u.y, 1.5 - 1e-6);
}

TEST(PayoffFrontier, ValueIsTheScalarizedPoint) {
  for (const FrontierPoint& p : payoff_frontier(gen_random(3, testing::small_params(2)), named_notion("comm"), 12))
    EXPECT_NEAR(p.value, std::cos(p.theta) * p.u.x + std::sin(p.theta) * p.u.y, 1e-9);
}

TEST(PayoffFrontier, FullCertificationContainsCommunication) {
  for (const GameTree& g : {gen_persuasion_gap(), gen_random(2, testing::small_params(2))}) {
    auto comm = payoff_frontier(g, named_notion("comm"), 16);
    auto cert = payoff_frontier(g, named_notion("full-cert"), 16);
    std::vector<Point2> hc = frontier_hull(comm), hf = frontier_hull(cert);
    for (std::size_t k = 0; k < comm.size(); ++k) {
      EXPECT_GE(cert[k].value, comm[k].value - 1e-6);
      double dx = std::cos(comm[k].theta), dy = std::sin(comm[k].theta);
      EXPECT_GE(support(hf, dx, dy), support(hc, dx, dy) - 1e-6);
    }
  }
}

TEST(PayoffFrontier, ThreadCountDoesNotChangeOutput) {
  GameTree g = gen_persuasion_gap();
  auto one = payoff_frontier(g, named_notion("full-cert"), 12, 1);
  auto four = payoff_frontier(g, named_notion("full-cert"), 12, 4);
  EXPECT_EQ(frontier_csv(one), frontier_csv(four));
  EXPECT_EQ(frontier_json(one).dump(), frontier_json(four).dump());
}

TEST(PayoffFrontier, OutputFormats) {
  auto pts = payoff_frontier(testing::single_terminal_game(), named_notion("comm"), 4);
  EXPECT_EQ(frontier_csv(pts),
            "theta,u1,u2\n0,0.5,0.5\n1.5707963267948966,0.5,0.5\n3.141592653589793,0.5,0.5\n"
            "4.71238898038469,0.5,0.5\n");
  nlohmann::ordered_json j = frontier_json(pts);
  EXPECT_EQ(j["points"].size(), 4u);
  EXPECT_EQ(j["points"][0]["status"], "optimal");
  EXPECT_EQ(j["hull"].dump(), "[[0.5,0.5]]");
  pts[2].status = LpStatus::kNumericalFailure;
  EXPECT_EQ(frontier_csv(pts).find("3.14"), std::string::npos);
  EXPECT_EQ(frontier_json(pts)["points"][2].dump(), R"({"theta":3.141592653589793,"status":"numerical-failure"})");
}

TEST(PayoffFrontier, RejectsBadInput) {
  EXPECT_THROW(payoff_frontier(testing::single_terminal_game(3), named_notion("comm"), 8), Error);
  EXPECT_THROW(payoff_frontier(gen_kuhn(), named_notion("comm"), 3), Error);
}

TEST(WorkerCount, HonoursEnvironment) {
  setenv("MEDEQ_THREADS", "3", 1);
  EXPECT_EQ(worker_count(), 3);
  setenv("MEDEQ_THREADS", "zero", 1);
  EXPECT_GE(worker_count(), 1);
  unsetenv("MEDEQ_THREADS");
}

}  // namespace
}  // namespace medeq
