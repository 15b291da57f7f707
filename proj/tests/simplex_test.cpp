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

#include <Eigen/Dense>
#include <random>

#include "medeq/simplex.hpp"

namespace medeq {
namespace {

TEST(Solve, SmallMaximization) {
  LpModel m;
  int x = m.add_col("x", 0, kInf, 3);
  int y = m.add_col("y", 0, kInf, 2);
  m.add_row("a", {{x, 1}, {y, 1}}, RowSense::kLe, 4);
  m.add_row("b", {{x, 1}, {y, 3}}, RowSense::kLe, 6);
  m.add_row("c", {{x, 1}}, RowSense::kLe, 3);
  LpSolution s = solve(m);
  ASSERT_EQ(s.status, LpStatus::kOptimal);
  EXPECT_NEAR(s.objective, 11, 1e-9);
  EXPECT_NEAR(s.x[x], 3, 1e-9);
  EXPECT_NEAR(s.x[y], 1, 1e-9);
  EXPECT_LE(s.primal_residual, 1e-8);
  EXPECT_LE(s.dual_residual, 1e-8);
}

TEST(Solve, EqualitiesAndFreeColumns) {
  // max -x - y, x + y = 1 with y free above -2 and x <= 3: x=3, y=-2.
  LpModel m;
  int x = m.add_col("x", -kInf, 3, -1);
  int y = m.add_col("y", -kInf, kInf, -2);
  m.add_row("e", {{x, 1}, {y, 1}}, RowSense::kEq, 1);
  m.add_row("g", {{y, 1}}, RowSense::kGe, -2);
  LpSolution s = solve(m);
  ASSERT_EQ(s.status, LpStatus::kOptimal);
  EXPECT_NEAR(s.x[x], 3, 1e-9);
  EXPECT_NEAR(s.x[y], -2, 1e-9);
  EXPECT_NEAR(s.objective, 1, 1e-9);
}

TEST(Solve, DetectsInfeasibleAndUnbounded) {
  LpModel inf;
  int x = inf.add_col("x", 0, kInf, 1);
  inf.add_row("a", {{x, 1}}, RowSense::kLe, -1);
  EXPECT_EQ(solve(inf).status, LpStatus::kInfeasible);

  LpModel unb;
  int u = unb.add_col("u", 0, kInf, 1);
  int v = unb.add_col("v", 0, kInf, 0);
  unb.add_row("a", {{u, 1}, {v, -1}}, RowSense::kLe, 1);
  EXPECT_EQ(solve(unb).status, LpStatus::kUnbounded);
}

TEST(Solve, BealeCyclingExample) {
  // Cycles under textbook Dantzig pricing without anti-cycling.
  LpModel m;
  int x4 = m.add_col("x4", 0, kInf, 0.75);
  int x5 = m.add_col("x5", 0, kInf, -20);
  int x6 = m.add_col("x6", 0, kInf, 0.5);
  int x7 = m.add_col("x7", 0, kInf, -6);
  m.add_row("r1", {{x4, 0.25}, {x5, -8}, {x6, -1}, {x7, 9}}, RowSense::kLe, 0);
  m.add_row("r2", {{x4, 0.5}, {x5, -12}, {x6, -0.5}, {x7, 3}}, RowSense::kLe, 0);
  m.add_row("r3", {{x6, 1}}, RowSense::kLe, 1);
  LpSolution s = solve(m);
  ASSERT_EQ(s.status, LpStatus::kOptimal);
  EXPECT_NEAR(s.objective, 1.25, 1e-9);
}

TEST(Solve, EmptyModels) {
  LpModel none;
  LpSolution s = solve(none);
  EXPECT_EQ(s.status, LpStatus::kOptimal);
  EXPECT_EQ(s.objective, 0);
  LpModel cols;
  cols.add_col("x", 0, 2, 1);
  LpSolution c = solve(cols);
  ASSERT_EQ(c.status, LpStatus::kOptimal);
  EXPECT_NEAR(c.objective, 2, 1e-12);
}

TEST(Solve, IterationCapIsReportedNotSilent) {
  LpModel m;
  std::vector<int> xs;
  for (int j = 0; j < 6; ++j) xs.push_back(m.add_col("x" + std::to_string(j), 0, kInf, 1 + j));
  for (int r = 0; r < 6; ++r) {
    std::vector<std::pair<int, double>> row;
    for (int j = 0; j < 6; ++j) row.emplace_back(xs[j], 1 + (r * 7 + j * 3) % 5);
    m.add_row("r" + std::to_string(r), row, RowSense::kLe, 10 + r);
  }
  LpOptions o;
  o.max_iterations = 1;
  EXPECT_EQ(solve(m, o).status, LpStatus::kNumericalFailure);
  EXPECT_EQ(solve(m).status, LpStatus::kOptimal);
}

// Best vertex of {A x <= b, 0 <= x <= ub} by enumerating active sets.
double brute_force(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c, double ub,
                   bool& feasible) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(A.rows());
  Eigen::MatrixXd G(m + 2 * n, n);
  Eigen::VectorXd h(m + 2 * n);
  G.topRows(m) = A;
  h.head(m) = b;
  G.middleRows(m, n) = -Eigen::MatrixXd::Identity(n, n);
  h.segment(m, n).setZero();
  G.bottomRows(n) = Eigen::MatrixXd::Identity(n, n);
  h.tail(n).setConstant(ub);
  const int rows = m + 2 * n;
  double best = -kInf;
  feasible = false;
  std::vector<int> pick(n);
  auto rec = [&](auto&& self, int start, int depth) -> void {
    if (depth == n) {
      Eigen::MatrixXd S(n, n);
      Eigen::VectorXd t(n);
      for (int k = 0; k < n; ++k) {
        S.row(k) = G.row(pick[k]);
        t(k) = h(pick[k]);
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
      if (lu.rank() < n) return;
      Eigen::VectorXd x = lu.solve(t);
      if (((G * x - h).array() > 1e-9).any()) return;
      feasible = true;
      best = std::max(best, c.dot(x));
      return;
    }
    for (int r = start; r < rows; ++r) {
      pick[depth] = r;
      self(self, r + 1, depth + 1);
    }
  };
  rec(rec, 0, 0);
  return best;
}

TEST(Solve, MatchesVertexEnumerationOnRandomLps) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> coef(-4, 6);
  int optimal = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3, m = 4;
    Eigen::MatrixXd A(m, n);
    Eigen::VectorXd b(m), c(n);
    LpModel lp;
    for (int j = 0; j < n; ++j) lp.add_col("x" + std::to_string(j), 0, 5, c(j) = coef(rng));
    for (int r = 0; r < m; ++r) {
      std::vector<std::pair<int, double>> row;
      for (int j = 0; j < n; ++j) row.emplace_back(j, A(r, j) = coef(rng));
      b(r) = coef(rng) + 1;
      lp.add_row("r" + std::to_string(r), row, RowSense::kLe, b(r));
    }
    bool feasible = false;
    double expect = brute_force(A, b, c, 5, feasible);
    LpSolution s = solve(lp);
    if (!feasible) {
      EXPECT_EQ(s.status, LpStatus::kInfeasible) << "trial " << trial;
      continue;
    }
    ++optimal;
    ASSERT_EQ(s.status, LpStatus::kOptimal) << "trial " << trial;
    EXPECT_NEAR(s.objective, expect, 1e-8) << "trial " << trial;
    EXPECT_LE(s.primal_residual, 1e-8);
    EXPECT_LE(s.dual_residual, 1e-8);
  }
  EXPECT_GT(optimal, 50);
}

TEST(Solve, WeakDualityOnRandomInequalityLps) {
  // max c x, A x <= b, x >= 0: any y >= 0 with A^T y >= c bounds the optimum.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pos(0.1, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 8, m = 6;
    LpModel lp;
    std::vector<std::vector<double>> A(m, std::vector<double>(n));
    std::vector<double> b(m), c(n);
    for (int j = 0; j < n; ++j) lp.add_col("x" + std::to_string(j), 0, kInf, c[j] = pos(rng));
    for (int r = 0; r < m; ++r) {
      std::vector<std::pair<int, double>> row;
      for (int j = 0; j < n; ++j) row.emplace_back(j, A[r][j] = pos(rng));
      lp.add_row("r" + std::to_string(r), row, RowSense::kLe, b[r] = pos(rng) * 5);
    }
    LpSolution s = solve(lp);
    ASSERT_EQ(s.status, LpStatus::kOptimal);
    // Scaled all-ones dual: y = t 1 with t = max_j c_j / sum_r A_rj.
    double t = 0;
    for (int j = 0; j < n; ++j) {
      double col = 0;
      for (int r = 0; r < m; ++r) col += A[r][j];
      t = std::max(t, c[j] / col);
    }
    double bound = 0;
    for (double v : b) bound += t * v;
    EXPECT_LE(s.objective, bound + 1e-9);
    // The solver's own multipliers close the gap.
    double dual_obj = 0;
    for (int r = 0; r < m; ++r) dual_obj += std::abs(s.duals[r]) * b[r];
    EXPECT_NEAR(dual_obj, s.objective, 1e-7);
  }
}

TEST(Solve, DeterministicAcrossRuns) {
  LpModel m;
  for (int j = 0; j < 5; ++j) m.add_col("x" + std::to_string(j), 0, 1, 1);
  m.add_row("sum", {{0, 1}, {1, 1}, {2, 1}, {3, 1}, {4, 1}}, RowSense::kLe, 2);
  LpSolution a = solve(m), b = solve(m);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.iterations, b.iterations);
}

}  // namespace
}  // namespace medeq
