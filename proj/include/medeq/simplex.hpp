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

// Bounded primal revised simplex.
//
// Each row r gets a logical variable s_r with a_r x - s_r = 0 and bounds taken
// from the row sense. Phase 1 starts from the all-logical basis and adds an
// artificial only for rows whose logical is out of bounds. Pricing is
// Dantzig's rule with a fallback to Bland's rule after a run of degenerate
// pivots; the ratio test is Harris' two-pass test with bound flipping. The
// basis is factorized with a sparse LU and updated in product form between
// refactorizations.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "medeq/game.hpp"

namespace medeq {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { kLe, kGe, kEq };
enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kNumericalFailure };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kNumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

// max obj^T x subject to row constraints and column bounds.
struct LpModel {
  std::vector<std::string> col_names;
  std::vector<double> lb, ub, obj;
  std::vector<std::string> row_names;
  std::vector<RowSense> sense;
  std::vector<double> rhs;
  std::vector<std::vector<std::pair<int, double>>> rows;

  int num_cols() const { return static_cast<int>(obj.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  int add_col(std::string name, double lower, double upper, double cost) {
    col_names.push_back(std::move(name));
    lb.push_back(lower);
    ub.push_back(upper);
    obj.push_back(cost);
    return num_cols() - 1;
  }

  int add_row(std::string name, std::vector<std::pair<int, double>> coeffs, RowSense s, double b) {
    row_names.push_back(std::move(name));
    rows.push_back(std::move(coeffs));
    sense.push_back(s);
    rhs.push_back(b);
    return num_rows() - 1;
  }
};

struct LpOptions {
  long max_iterations = 1000000;
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-9;
  int refactor_interval = 100;
  double certify_tol = 1e-8;  // optimal answers must meet this on both residuals
};

struct LpSolution {
  LpStatus status = LpStatus::kNumericalFailure;
  double objective = 0;
  std::vector<double> x;      // structural values
  std::vector<double> duals;  // row multipliers
  long iterations = 0;
  double primal_residual = 0;  // max row or bound violation
  double dual_residual = 0;    // max wrong-signed reduced cost
};

namespace detail {

class Simplex {
 public:
  Simplex(const LpModel& lp, const LpOptions& opt) : lp_(lp), opt_(opt) {
    m_ = lp.num_rows();
    n_ = lp.num_cols();
    // Column-major copy of the structural matrix.
    col_start_.assign(n_ + 1, 0);
    for (const auto& row : lp.rows)
      for (auto [j, v] : row) {
        if (j < 0 || j >= n_) throw Error("LP row references unknown column");
        ++col_start_[j + 1];
      }
    for (int j = 0; j < n_; ++j) col_start_[j + 1] += col_start_[j];
    col_row_.resize(col_start_[n_]);
    col_val_.resize(col_start_[n_]);
    std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
    for (int r = 0; r < m_; ++r)
      for (auto [j, v] : lp.rows[r]) {
        col_row_[fill[j]] = r;
        col_val_[fill[j]++] = v;
      }
  }

  LpSolution run() {
    LpSolution sol;
    setup();
    // Phase 1.
    std::vector<double> cost(total_, 0.0);
    for (int k = 0; k < num_art_; ++k) cost[n_ + m_ + k] = -1.0;
    LpStatus st = optimize(cost);
    sol.iterations = iterations_;
    if (st == LpStatus::kNumericalFailure) {
      sol.status = st;
      return sol;
    }
    double infeas = 0;
    for (int k = 0; k < num_art_; ++k) infeas += x_[n_ + m_ + k];
    if (infeas > 1e-7 * std::max(1.0, rhs_scale_)) {
      sol.status = LpStatus::kInfeasible;
      return sol;
    }
    for (int k = 0; k < num_art_; ++k) {
      int j = n_ + m_ + k;
      hi_[j] = 0.0;
      if (pos_[j] < 0) x_[j] = 0.0;
    }
    // Phase 2.
    std::fill(cost.begin(), cost.end(), 0.0);
    for (int j = 0; j < n_; ++j) cost[j] = lp_.obj[j];
    st = optimize(cost);
    sol.iterations = iterations_;
    sol.status = st;
    if (st != LpStatus::kOptimal) return sol;
    sol.x.assign(x_.begin(), x_.begin() + n_);
    sol.objective = 0;
    for (int j = 0; j < n_; ++j) sol.objective += lp_.obj[j] * sol.x[j];
    sol.duals = y_;
    certify(cost, sol);
    if (sol.primal_residual > opt_.certify_tol || sol.dual_residual > opt_.certify_tol)
      sol.status = LpStatus::kNumericalFailure;
    return sol;
  }

 private:
  enum NonbasicAt : char { kAtLower, kAtUpper, kAtZero };

  void setup() {
    num_art_ = 0;
    total_ = n_ + m_;
    lo_.assign(total_, 0.0);
    hi_.assign(total_, 0.0);
    x_.assign(total_, 0.0);
    at_.assign(total_, kAtLower);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = lp_.lb[j];
      hi_[j] = lp_.ub[j];
      if (std::isfinite(lo_[j])) {
        x_[j] = lo_[j];
        at_[j] = kAtLower;
      } else if (std::isfinite(hi_[j])) {
        x_[j] = hi_[j];
        at_[j] = kAtUpper;
      } else {
        x_[j] = 0.0;
        at_[j] = kAtZero;
      }
    }
    rhs_scale_ = 1.0;
    for (int r = 0; r < m_; ++r) {
      int j = n_ + r;
      double b = lp_.rhs[r];
      rhs_scale_ = std::max(rhs_scale_, std::abs(b));
      lo_[j] = lp_.sense[r] == RowSense::kLe ? -kInf : b;
      hi_[j] = lp_.sense[r] == RowSense::kGe ? kInf : b;
    }
    std::vector<double> activity(m_, 0.0);
    for (int j = 0; j < n_; ++j)
      if (x_[j] != 0)
        for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) activity[col_row_[k]] += col_val_[k] * x_[j];
    head_.assign(m_, -1);
    pos_.assign(total_, -1);
    art_row_.clear();
    art_sign_.clear();
    for (int r = 0; r < m_; ++r) {
      int s = n_ + r;
      double v = activity[r];
      if (v >= lo_[s] - opt_.primal_tol && v <= hi_[s] + opt_.primal_tol) {
        head_[r] = s;
        pos_[s] = r;
        x_[s] = v;
        continue;
      }
      double bound = v < lo_[s] ? lo_[s] : hi_[s];
      x_[s] = bound;
      at_[s] = v < lo_[s] ? kAtLower : kAtUpper;
      // a x - s + sign * art = 0 with art = |bound - v|.
      double sign = bound - v > 0 ? 1.0 : -1.0;
      int a = total_++;
      art_row_.push_back(r);
      art_sign_.push_back(sign);
      lo_.push_back(0.0);
      hi_.push_back(kInf);
      x_.push_back(std::abs(bound - v));
      at_.push_back(kAtLower);
      pos_.push_back(r);
      head_[r] = a;
      ++num_art_;
    }
    refactor();
  }

  // Column j of [A | -I | artificials] as (row, value) pairs.
  template <typename F>
  void for_column(int j, F&& f) const {
    if (j < n_) {
      for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) f(col_row_[k], col_val_[k]);
    } else if (j < n_ + m_) {
      f(j - n_, -1.0);
    } else {
      f(art_row_[j - n_ - m_], art_sign_[j - n_ - m_]);
    }
  }

  void refactor() {
    etas_.clear();
    if (m_ == 0) {
      factor_ok_ = true;
      return;
    }
    std::vector<Eigen::Triplet<double>> trip;
    for (int p = 0; p < m_; ++p) for_column(head_[p], [&](int r, double v) { trip.emplace_back(r, p, v); });
    Eigen::SparseMatrix<double> B(m_, m_);
    B.setFromTriplets(trip.begin(), trip.end());
    B.makeCompressed();
    lu_.analyzePattern(B);
    lu_.factorize(B);
    factor_ok_ = lu_.info() == Eigen::Success;
    // Recompute basic values: B x_B = -sum_nonbasic a_j x_j.
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
    for (int j = 0; j < total_; ++j)
      if (pos_[j] < 0 && x_[j] != 0) for_column(j, [&](int r, double v) { rhs[r] -= v * x_[j]; });
    if (!factor_ok_) return;
    Eigen::VectorXd xb = lu_.solve(rhs);
    for (int p = 0; p < m_; ++p) x_[head_[p]] = xb[p];
  }

  Eigen::VectorXd ftran(int j) const {
    if (m_ == 0) return Eigen::VectorXd();
    Eigen::VectorXd a = Eigen::VectorXd::Zero(m_);
    for_column(j, [&](int r, double v) { a[r] = v; });
    Eigen::VectorXd z = lu_.solve(a);
    for (const Eta& e : etas_) {
      double zp = z[e.p] / e.pivot;
      if (zp != 0)
        for (auto [i, v] : e.col) z[i] -= v * zp;
      z[e.p] = zp;
    }
    return z;
  }

  Eigen::VectorXd btran(const std::vector<double>& cost) const {
    if (m_ == 0) return Eigen::VectorXd();
    Eigen::VectorXd w(m_);
    for (int p = 0; p < m_; ++p) w[p] = cost[head_[p]];
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = w[it->p];
      for (auto [i, v] : it->col) s -= w[i] * v;
      w[it->p] = s / it->pivot;
    }
    return lu_.transpose().solve(w);
  }

  double reduced_cost(int j, const std::vector<double>& cost, const Eigen::VectorXd& y) const {
    double d = cost[j];
    for_column(j, [&](int r, double v) { d -= y[r] * v; });
    return d;
  }

  LpStatus optimize(const std::vector<double>& cost) {
    int degenerate_run = 0;
    bool bland = false;
    int since_refactor = 0;
    int confirmations = 0;
    while (true) {
      if (iterations_ >= opt_.max_iterations) return LpStatus::kNumericalFailure;
      if (since_refactor >= opt_.refactor_interval) {
        refactor();
        since_refactor = 0;
      }
      if (!factor_ok_) return LpStatus::kNumericalFailure;
      Eigen::VectorXd y = btran(cost);
      // Pricing.
      int q = -1;
      double best = 0;
      int dir = 0;
      for (int j = 0; j < total_; ++j) {
        if (pos_[j] >= 0 || lo_[j] == hi_[j]) continue;
        double d = reduced_cost(j, cost, y);
        int want = 0;
        if (d > opt_.dual_tol && (at_[j] == kAtLower || at_[j] == kAtZero)) want = 1;
        else if (d < -opt_.dual_tol && (at_[j] == kAtUpper || at_[j] == kAtZero)) want = -1;
        if (!want) continue;
        if (bland) {
          q = j;
          dir = want;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          q = j;
          dir = want;
        }
      }
      if (q < 0) {
        // Confirm on a fresh factorization before declaring optimality.
        if (since_refactor > 0 && confirmations < 2) {
          refactor();
          since_refactor = 0;
          ++confirmations;
          continue;
        }
        y_.assign(y.data(), y.data() + m_);
        return LpStatus::kOptimal;
      }
      confirmations = 0;
      Eigen::VectorXd alpha = ftran(q);
      // Harris pass 1: relaxed step bound.
      double theta_max = kInf;
      for (int p = 0; p < m_; ++p) {
        double a = dir * alpha[p];
        if (std::abs(a) <= opt_.pivot_tol) continue;
        int b = head_[p];
        if (a > 0 && std::isfinite(lo_[b])) theta_max = std::min(theta_max, (x_[b] - lo_[b] + opt_.primal_tol) / a);
        if (a < 0 && std::isfinite(hi_[b])) theta_max = std::min(theta_max, (hi_[b] - x_[b] + opt_.primal_tol) / -a);
      }
      double flip = hi_[q] - lo_[q];
      // Harris pass 2: largest pivot among rows within the relaxed bound.
      int leave = -1;
      double theta = kInf;
      double pivot_mag = 0;
      for (int p = 0; p < m_; ++p) {
        double a = dir * alpha[p];
        if (std::abs(a) <= opt_.pivot_tol) continue;
        int b = head_[p];
        double ratio;
        if (a > 0 && std::isfinite(lo_[b])) ratio = (x_[b] - lo_[b]) / a;
        else if (a < 0 && std::isfinite(hi_[b])) ratio = (hi_[b] - x_[b]) / -a;
        else continue;
        if (ratio > theta_max) continue;
        bool better = bland ? (leave < 0 || b < head_[leave]) : std::abs(a) > pivot_mag;
        if (better) {
          leave = p;
          pivot_mag = std::abs(a);
          theta = std::max(ratio, 0.0);
        }
      }
      if (std::isfinite(flip) && flip <= theta_max && (leave < 0 || flip <= theta)) {
        // Bound flip of the entering variable; the basis is unchanged.
        double step = dir * flip;
        x_[q] = dir > 0 ? hi_[q] : lo_[q];
        at_[q] = dir > 0 ? kAtUpper : kAtLower;
        for (int p = 0; p < m_; ++p)
          if (alpha[p] != 0) x_[head_[p]] -= step * alpha[p];
        ++iterations_;
        degenerate_run = 0;
        bland = false;
        continue;
      }
      if (leave < 0) return LpStatus::kUnbounded;
      double step = dir * theta;
      x_[q] += step;
      for (int p = 0; p < m_; ++p)
        if (alpha[p] != 0) x_[head_[p]] -= step * alpha[p];
      int out = head_[leave];
      double a = dir * alpha[leave];
      if (a > 0) {
        x_[out] = lo_[out];
        at_[out] = kAtLower;
      } else {
        x_[out] = hi_[out];
        at_[out] = kAtUpper;
      }
      pos_[out] = -1;
      head_[leave] = q;
      pos_[q] = leave;
      Eta e;
      e.p = leave;
      e.pivot = alpha[leave];
      for (int p = 0; p < m_; ++p)
        if (p != leave && alpha[p] != 0) e.col.emplace_back(p, alpha[p]);
      etas_.push_back(std::move(e));
      ++since_refactor;
      ++iterations_;
      if (theta < 1e-12) {
        if (++degenerate_run > 10 * std::max(1, m_)) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
    }
  }

  void certify(const std::vector<double>& cost, LpSolution& sol) const {
    double primal = 0;
    for (int r = 0; r < m_; ++r) {
      double act = 0;
      for (auto [j, v] : lp_.rows[r]) act += v * sol.x[j];
      double b = lp_.rhs[r];
      if (lp_.sense[r] != RowSense::kGe) primal = std::max(primal, act - b);
      if (lp_.sense[r] != RowSense::kLe) primal = std::max(primal, b - act);
    }
    for (int j = 0; j < n_; ++j) {
      primal = std::max(primal, lp_.lb[j] - sol.x[j]);
      primal = std::max(primal, sol.x[j] - lp_.ub[j]);
    }
    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(y_.data(), m_);
    double dual = 0;
    for (int j = 0; j < total_; ++j) {
      if (pos_[j] >= 0 || lo_[j] == hi_[j]) continue;
      double d = reduced_cost(j, cost, y);
      if (at_[j] != kAtUpper) dual = std::max(dual, d);
      if (at_[j] != kAtLower) dual = std::max(dual, -d);
    }
    sol.primal_residual = std::max(primal, 0.0);
    sol.dual_residual = std::max(dual, 0.0);
  }

  struct Eta {
    int p = 0;
    double pivot = 1;
    std::vector<std::pair<int, double>> col;
  };

  const LpModel& lp_;
  LpOptions opt_;
  int m_ = 0, n_ = 0, total_ = 0, num_art_ = 0;
  double rhs_scale_ = 1;
  std::vector<int> col_start_, col_row_;
  std::vector<double> col_val_;
  std::vector<int> art_row_;
  std::vector<double> art_sign_;
  std::vector<double> lo_, hi_, x_;
  std::vector<char> at_;
  std::vector<int> head_, pos_;
  std::vector<double> y_;
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  bool factor_ok_ = false;
  std::vector<Eta> etas_;
  long iterations_ = 0;
};

}  // namespace detail

inline LpSolution solve(const LpModel& lp, const LpOptions& options = {}) {
  return detail::Simplex(lp, options).run();
}

}  // namespace medeq
