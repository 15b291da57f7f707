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

// Mediator LP with dualized best responses:
//
//   max  c^T x_M
//   s.t. F_M x_M = f_M,  x_M >= 0
//        F_j^T v_j >= A'_j^T x_M   for every player j (one row per sequence)
//        v_j[root] <= 0,  v_j free

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "medeq/augment.hpp"
#include "medeq/game_io.hpp"
#include "medeq/sequence_form.hpp"
#include "medeq/simplex.hpp"

namespace medeq {

struct LinearProgram {
  LpModel model;
  SequenceFormSystem mediator;
  std::vector<SequenceFormSystem> players;
  std::vector<int> v_offset;  // first LP column of v_j

  int num_mediator_columns() const { return mediator.num_columns; }
};

inline LinearProgram build_program(const AugmentedGame& aug) {
  const int n = aug.num_players();
  LinearProgram lp;
  lp.mediator = build_sequence_form(aug, aug.mediator());
  for (int j = 0; j < n; ++j) lp.players.push_back(build_sequence_form(aug, j));
  LeafCoefficients coef = leaf_coefficients(aug, lp.mediator, lp.players);

  LpModel& m = lp.model;
  for (int k = 0; k < lp.mediator.num_columns; ++k) m.add_col("xM_" + std::to_string(k), 0.0, kInf, coef.c[k]);
  for (int j = 0; j < n; ++j) {
    lp.v_offset.push_back(m.num_cols());
    for (int r = 0; r < lp.players[j].num_rows(); ++r)
      m.add_col("v" + std::to_string(j + 1) + "_" + std::to_string(r), -kInf, kInf, 0.0);
  }
  // Mediator flow constraints.
  std::vector<std::vector<std::pair<int, double>>> rowsM(lp.mediator.num_rows());
  for (const Triplet& t : lp.mediator.F) rowsM[t.row].emplace_back(t.col, t.value);
  for (int r = 0; r < lp.mediator.num_rows(); ++r)
    m.add_row("flowM_" + std::to_string(r), std::move(rowsM[r]), RowSense::kEq, lp.mediator.f[r]);
  // Dual feasibility per player sequence.
  for (int j = 0; j < n; ++j) {
    const SequenceFormSystem& s = lp.players[j];
    std::vector<std::vector<std::pair<int, double>>> rows(s.num_columns);
    for (const Triplet& t : s.F) rows[t.col].emplace_back(lp.v_offset[j] + t.row, t.value);
    for (const Triplet& t : coef.A[j]) rows[t.col].emplace_back(t.row, -t.value);
    for (int q = 0; q < s.num_columns; ++q) {
      auto& row = rows[q];
      std::sort(row.begin(), row.end());
      m.add_row("dual" + std::to_string(j + 1) + "_" + std::to_string(q), std::move(row), RowSense::kGe, 0.0);
    }
    m.add_row("gain" + std::to_string(j + 1), {{lp.v_offset[j], 1.0}}, RowSense::kLe, 0.0);
  }
  return lp;
}

// CPLEX LP text. Zero coefficients are omitted; free columns are declared in
// the Bounds section; numbers use the shortest round-trip representation.
inline std::string export_lp(const LpModel& m) {
  auto term = [](double v, const std::string& name, bool first) {
    std::string s;
    if (v < 0) s = "- ";
    else if (!first) s = "+ ";
    double a = std::abs(v);
    if (a != 1.0) s += format_number(a) + " ";
    return s + name;
  };
  auto rhs = [](double v) { return format_number(v); };
  std::string out = "\\ medeq mediator program\nMaximize\n obj:";
  bool first = true;
  for (int j = 0; j < m.num_cols(); ++j) {
    if (m.obj[j] == 0) continue;
    out += " " + term(m.obj[j], m.col_names[j], first);
    first = false;
  }
  if (first) out += " 0 " + (m.num_cols() ? m.col_names[0] : std::string("x"));
  out += "\nSubject To\n";
  for (int r = 0; r < m.num_rows(); ++r) {
    out += " " + m.row_names[r] + ":";
    bool f = true;
    for (auto [j, v] : m.rows[r]) {
      if (v == 0) continue;
      out += " " + term(v, m.col_names[j], f);
      f = false;
    }
    if (f) out += " 0 " + m.col_names[0];
    out += m.sense[r] == RowSense::kLe ? " <= " : m.sense[r] == RowSense::kGe ? " >= " : " = ";
    out += rhs(m.rhs[r]) + "\n";
  }
  out += "Bounds\n";
  for (int j = 0; j < m.num_cols(); ++j) {
    const std::string& name = m.col_names[j];
    bool lo_inf = !std::isfinite(m.lb[j]);
    bool hi_inf = !std::isfinite(m.ub[j]);
    if (lo_inf && hi_inf) {
      out += " " + name + " free\n";
    } else if (m.lb[j] == 0 && hi_inf) {
      out += " " + name + " >= 0\n";
    } else {
      out += " " + (lo_inf ? std::string("-inf") : format_number(m.lb[j])) + " <= " + name + " <= " +
             (hi_inf ? std::string("+inf") : format_number(m.ub[j])) + "\n";
    }
  }
  out += "End\n";
  return out;
}

inline std::string export_lp(const LinearProgram& lp) { return export_lp(lp.model); }

// Behavioral mediator strategy indexed by augmented infoset.
struct MediatorPolicy {
  std::vector<std::vector<double>> probs;  // empty for non-mediator infosets
  std::vector<char> unreachable;           // reach below 1e-9 under the plan
};

inline MediatorPolicy extract_policy(const AugmentedGame& aug, const LinearProgram& lp, const LpSolution& sol) {
  if (sol.status != LpStatus::kOptimal) throw Error("cannot extract a policy from a non-optimal solution");
  const SequenceFormSystem& s = lp.mediator;
  MediatorPolicy pol;
  pol.probs.resize(aug.tree.num_infosets());
  pol.unreachable.assign(aug.tree.num_infosets(), 0);
  for (std::size_t k = 0; k < s.infosets.size(); ++k) {
    int I = s.infosets[k];
    int na = static_cast<int>(aug.tree.infoset(I).actions.size());
    double parent = sol.x[s.parent[k]];
    std::vector<double> p(na, 1.0 / na);
    if (parent > 1e-9) {
      double total = 0;
      for (int a = 0; a < na; ++a) total += (p[a] = std::max(0.0, sol.x[s.first_column[I] + a]));
      if (total > 0)
        for (double& v : p) v /= total;
      else
        std::fill(p.begin(), p.end(), 1.0 / na);
    } else {
      pol.unreachable[I] = 1;
    }
    pol.probs[I] = std::move(p);
  }
  return pol;
}

// Uniform recommendation everywhere.
inline MediatorPolicy uniform_policy(const AugmentedGame& aug) {
  MediatorPolicy pol;
  pol.probs.resize(aug.tree.num_infosets());
  pol.unreachable.assign(aug.tree.num_infosets(), 0);
  for (int I = 0; I < aug.tree.num_infosets(); ++I) {
    const Infoset& info = aug.tree.infoset(I);
    if (info.player == aug.mediator())
      pol.probs[I].assign(info.actions.size(), 1.0 / static_cast<double>(info.actions.size()));
  }
  return pol;
}

inline nlohmann::ordered_json policy_to_json(const AugmentedGame& aug, const MediatorPolicy& pol) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (int I = 0; I < aug.tree.num_infosets(); ++I) {
    if (pol.probs[I].empty()) continue;
    const Infoset& info = aug.tree.infoset(I);
    nlohmann::ordered_json a = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < info.actions.size(); ++k) a[info.actions[k]] = pol.probs[I][k];
    j[info.name] = std::move(a);
  }
  return j;
}

inline MediatorPolicy policy_from_json(const AugmentedGame& aug, const nlohmann::json& j) {
  MediatorPolicy pol = uniform_policy(aug);
  const nlohmann::json& body = j.contains("policy") ? j.at("policy") : j;
  if (!body.is_object()) throw Error("policy must be an object {infoset: {action: prob}}");
  std::map<std::string, int> index;
  for (int I = 0; I < aug.tree.num_infosets(); ++I)
    if (aug.tree.infoset(I).player == aug.mediator()) index[aug.tree.infoset(I).name] = I;
  for (const auto& [name, actions] : body.items()) {
    auto it = index.find(name);
    if (it == index.end()) throw Error("policy names unknown mediator infoset '" + name + "'");
    const Infoset& info = aug.tree.infoset(it->second);
    std::vector<double> p(info.actions.size(), 0.0);
    double total = 0;
    for (const auto& [a, v] : actions.items()) {
      auto pos = std::find(info.actions.begin(), info.actions.end(), a);
      if (pos == info.actions.end()) throw Error("policy names unknown action '" + a + "' at '" + name + "'");
      double x = v.get<double>();
      if (!(x >= 0)) throw Error("negative probability at '" + name + "'");
      p[pos - info.actions.begin()] = x;
      total += x;
    }
    if (std::abs(total - 1.0) > 1e-6) throw Error("probabilities at '" + name + "' do not sum to 1");
    pol.probs[it->second] = std::move(p);
  }
  return pol;
}

}  // namespace medeq
