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

// Independent verification. Everything here walks the augmented tree
// directly; only the simplex solver is shared with the main pipeline.

#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "medeq/augment.hpp"
#include "medeq/program.hpp"
#include "medeq/simplex.hpp"

namespace medeq {

namespace detail {

// Player j's view of the augmented tree against fixed opponents: for each
// own sequence (key -1 for the root, else infoset * kStride + action), the
// weighted terminal payoff collected right below it and the own infosets
// that follow it.
struct OwnTree {
  static constexpr long kStride = 1 << 16;
  std::map<long, double> payoff;
  std::map<long, std::vector<int>> children;
  std::map<int, long> parent_of;
};

inline long own_key(int infoset, int action) { return infoset * OwnTree::kStride + action; }

// weight(node, action) multiplies the path weight for non-chance,
// non-player-j edges; returning 0 prunes the edge.
template <typename EdgeWeight>
OwnTree collect_own_tree(const AugmentedGame& aug, int j, EdgeWeight&& weight) {
  const GameTree& t = aug.tree;
  OwnTree out;
  struct Frame {
    int node;
    double w;
    long seq;
  };
  std::vector<Frame> stack{{0, 1.0, -1}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    const Node& nd = t.node(f.node);
    if (nd.is_terminal()) {
      out.payoff[f.seq] += f.w * nd.utilities[j];
      continue;
    }
    if (nd.is_player() && nd.player == j) {
      auto [it, fresh] = out.parent_of.emplace(nd.infoset, f.seq);
      if (fresh) out.children[f.seq].push_back(nd.infoset);
      else if (it->second != f.seq) throw Error("player lacks perfect recall in the augmented game");
      for (std::size_t a = 0; a < nd.children.size(); ++a)
        stack.push_back({nd.children[a], f.w, own_key(nd.infoset, static_cast<int>(a))});
      continue;
    }
    for (std::size_t a = 0; a < nd.children.size(); ++a) {
      double e = nd.is_chance() ? nd.probs[a] : weight(nd, static_cast<int>(a));
      if (e == 0) continue;
      stack.push_back({nd.children[a], f.w * e, f.seq});
    }
  }
  for (auto& [seq, kids] : out.children) std::sort(kids.begin(), kids.end());
  return out;
}

// Edge weight with the mediator playing `policy` and other players direct.
inline auto policy_weight(const AugmentedGame& aug, const MediatorPolicy& policy) {
  return [&aug, &policy](const Node& nd, int a) -> double {
    if (nd.player == aug.mediator()) return policy.probs.at(nd.infoset).at(a);
    return aug.direct_action.at(nd.infoset) == a ? 1.0 : 0.0;
  };
}

}  // namespace detail

struct PlayerVerification {
  double direct = 0;
  double best_response = 0;
  double gain = 0;
};

struct VerificationReport {
  std::vector<PlayerVerification> players;
  double mediator_value = 0;  // expected mediator objective on the direct path
  double max_gain = 0;
  bool passed = false;
};

// Value of player j's best deviation against (policy, direct opponents), by
// backward induction over j's own infosets.
inline double best_response_value(const AugmentedGame& aug, const MediatorPolicy& policy, int j) {
  detail::OwnTree own = detail::collect_own_tree(aug, j, detail::policy_weight(aug, policy));
  std::map<long, double> memo;
  auto value = [&](auto&& self, long seq) -> double {
    auto m = memo.find(seq);
    if (m != memo.end()) return m->second;
    double v = own.payoff.count(seq) ? own.payoff.at(seq) : 0.0;
    if (own.children.count(seq))
      for (int I : own.children.at(seq)) {
        double best = -kInf;
        for (std::size_t a = 0; a < aug.tree.infoset(I).actions.size(); ++a)
          best = std::max(best, self(self, detail::own_key(I, static_cast<int>(a))));
        v += best;
      }
    memo[seq] = v;
    return v;
  };
  return value(value, -1);
}

// Expected utility of player j when everyone, j included, plays direct.
inline double direct_value(const AugmentedGame& aug, const MediatorPolicy& policy, int j) {
  detail::OwnTree own = detail::collect_own_tree(aug, j, detail::policy_weight(aug, policy));
  auto value = [&](auto&& self, long seq) -> double {
    double v = own.payoff.count(seq) ? own.payoff.at(seq) : 0.0;
    if (own.children.count(seq))
      for (int I : own.children.at(seq)) v += self(self, detail::own_key(I, aug.direct_action.at(I)));
    return v;
  };
  return value(value, -1);
}

// Expected value of utility index k (players, then mediator objective) on the
// direct path under `policy`.
inline double direct_path_value(const AugmentedGame& aug, const MediatorPolicy& policy, int k) {
  const GameTree& t = aug.tree;
  double total = 0;
  std::vector<std::pair<int, double>> stack{{0, 1.0}};
  while (!stack.empty()) {
    auto [id, w] = stack.back();
    stack.pop_back();
    const Node& nd = t.node(id);
    if (nd.is_terminal()) {
      total += w * nd.utilities[k];
      continue;
    }
    for (std::size_t a = 0; a < nd.children.size(); ++a) {
      double e;
      if (nd.is_chance()) e = nd.probs[a];
      else if (nd.player == aug.mediator()) e = policy.probs.at(nd.infoset).at(a);
      else e = aug.direct_action.at(nd.infoset) == static_cast<int>(a) ? 1.0 : 0.0;
      if (e != 0) stack.emplace_back(nd.children[a], w * e);
    }
  }
  return total;
}

// Probability of each base-game node being the terminal outcome on the
// direct path under `policy`.
inline std::vector<double> outcome_distribution(const AugmentedGame& aug, const MediatorPolicy& policy) {
  const GameTree& t = aug.tree;
  std::vector<double> out(aug.base.num_nodes(), 0.0);
  std::vector<std::pair<int, double>> stack{{0, 1.0}};
  while (!stack.empty()) {
    auto [id, w] = stack.back();
    stack.pop_back();
    const Node& nd = t.node(id);
    if (nd.is_terminal()) {
      out[aug.info[id].base] += w;
      continue;
    }
    for (std::size_t a = 0; a < nd.children.size(); ++a) {
      double e;
      if (nd.is_chance()) e = nd.probs[a];
      else if (nd.player == aug.mediator()) e = policy.probs.at(nd.infoset).at(a);
      else e = aug.direct_action.at(nd.infoset) == static_cast<int>(a) ? 1.0 : 0.0;
      if (e != 0) stack.emplace_back(nd.children[a], w * e);
    }
  }
  return out;
}

inline VerificationReport verify_equilibrium(const AugmentedGame& aug, const MediatorPolicy& policy,
                                             double tol = 1e-6) {
  VerificationReport r;
  for (int j = 0; j < aug.num_players(); ++j) {
    PlayerVerification p;
    p.direct = direct_value(aug, policy, j);
    p.best_response = best_response_value(aug, policy, j);
    p.gain = p.best_response - p.direct;
    r.max_gain = std::max(r.max_gain, p.gain);
    r.players.push_back(p);
  }
  r.mediator_value = direct_path_value(aug, policy, aug.mediator());
  r.passed = r.max_gain <= tol;
  return r;
}

inline nlohmann::ordered_json report_to_json(const VerificationReport& r) {
  nlohmann::ordered_json j;
  j["passed"] = r.passed;
  j["max_gain"] = r.max_gain;
  j["mediator_value"] = r.mediator_value;
  nlohmann::ordered_json players = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < r.players.size(); ++i)
    players.push_back({{"player", i + 1},
                       {"direct", r.players[i].direct},
                       {"best_response", r.players[i].best_response},
                       {"gain", r.players[i].gain}});
  j["players"] = players;
  return j;
}

// LP over mediator realization plans with one incentive constraint per
// (player, reduced pure deviation) instead of dualized best responses.
struct EnumeratedProgram {
  LpModel model;
  std::vector<long> pure_strategies;  // per player, before deduplication
  std::vector<int> constraints;       // per player, after deduplication
};

namespace detail {

using SparseVec = std::vector<std::pair<int, double>>;

inline SparseVec add_sparse(const SparseVec& a, const SparseVec& b) {
  SparseVec out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, k = 0;
  while (i < a.size() || k < b.size()) {
    if (k == b.size() || (i < a.size() && a[i].first < b[k].first)) out.push_back(a[i++]);
    else if (i == a.size() || b[k].first < a[i].first) out.push_back(b[k++]);
    else {
      out.emplace_back(a[i].first, a[i].second + b[k].second);
      ++i;
      ++k;
    }
  }
  return out;
}

}  // namespace detail

inline EnumeratedProgram enumerate_deviation_lp(const AugmentedGame& aug, long budget = 100000) {
  const GameTree& t = aug.tree;
  const int n = aug.num_players();
  const int M = aug.mediator();
  EnumeratedProgram ep;
  LpModel& lp = ep.model;

  // Mediator sequences in depth-first order of first appearance.
  std::vector<int> first_col(t.num_infosets(), -1);
  std::vector<int> mseq(t.num_nodes(), 0);
  std::vector<std::pair<int, int>> infoset_parent;  // (infoset, parent column)
  int cols = 1;
  {
    std::vector<int> stack{0};
    while (!stack.empty()) {
      int id = stack.back();
      stack.pop_back();
      const Node& nd = t.node(id);
      bool med = nd.is_player() && nd.player == M;
      if (med && first_col[nd.infoset] < 0) {
        first_col[nd.infoset] = cols;
        cols += static_cast<int>(nd.actions.size());
        infoset_parent.emplace_back(nd.infoset, mseq[id]);
      }
      for (int a = static_cast<int>(nd.children.size()) - 1; a >= 0; --a) {
        int c = nd.children[a];
        mseq[c] = med ? first_col[nd.infoset] + a : mseq[id];
        stack.push_back(c);
      }
    }
  }
  std::vector<double> objective(cols, 0.0);
  for (int k = 0; k < cols; ++k) lp.add_col("y" + std::to_string(k), 0.0, kInf, 0.0);
  lp.add_row("root", {{0, 1.0}}, RowSense::kEq, 1.0);
  for (auto [I, parent] : infoset_parent) {
    std::vector<std::pair<int, double>> row{{parent, -1.0}};
    for (std::size_t a = 0; a < t.infoset(I).actions.size(); ++a) row.emplace_back(first_col[I] + a, 1.0);
    std::sort(row.begin(), row.end());
    lp.add_row("flow_" + t.infoset(I).name, std::move(row), RowSense::kEq, 0.0);
  }

  // Objective over the all-direct paths.
  {
    std::vector<std::pair<int, double>> stack{{0, 1.0}};
    while (!stack.empty()) {
      auto [id, w] = stack.back();
      stack.pop_back();
      const Node& nd = t.node(id);
      if (nd.is_terminal()) {
        objective[mseq[id]] += w * nd.utilities[M];
        continue;
      }
      for (std::size_t a = 0; a < nd.children.size(); ++a) {
        double e = 1.0;
        if (nd.is_chance()) e = nd.probs[a];
        else if (nd.player != M && aug.direct_action[nd.infoset] != static_cast<int>(a)) e = 0.0;
        if (e != 0) stack.emplace_back(nd.children[a], w * e);
      }
    }
  }
  for (int k = 0; k < cols; ++k) lp.obj[k] = objective[k];

  ep.pure_strategies.assign(n, 0);
  ep.constraints.assign(n, 0);
  for (int j = 0; j < n; ++j) {
    // Payoff vectors keyed by own sequence; the mediator column of each
    // terminal is kept symbolic by walking with unit mediator weights.
    std::map<long, std::map<int, double>> payoff;
    std::map<long, std::vector<int>> children;
    std::map<int, long> parent_of;
    struct Frame {
      int node;
      double w;
      long seq;
    };
    std::vector<Frame> stack{{0, 1.0, -1}};
    while (!stack.empty()) {
      Frame f = stack.back();
      stack.pop_back();
      const Node& nd = t.node(f.node);
      if (nd.is_terminal()) {
        double v = f.w * nd.utilities[j];
        if (v != 0) payoff[f.seq][mseq[f.node]] += v;
        continue;
      }
      if (nd.is_player() && nd.player == j) {
        auto [it, fresh] = parent_of.emplace(nd.infoset, f.seq);
        if (fresh) children[f.seq].push_back(nd.infoset);
        for (std::size_t a = 0; a < nd.children.size(); ++a)
          stack.push_back({nd.children[a], f.w, detail::own_key(nd.infoset, static_cast<int>(a))});
        continue;
      }
      for (std::size_t a = 0; a < nd.children.size(); ++a) {
        double e = 1.0;
        if (nd.is_chance()) e = nd.probs[a];
        else if (nd.player != M && aug.direct_action[nd.infoset] != static_cast<int>(a)) e = 0.0;
        if (e != 0) stack.push_back({nd.children[a], f.w * e, f.seq});
      }
    }
    for (auto& [s, kids] : children) std::sort(kids.begin(), kids.end());
    auto base_vec = [&](long seq) {
      detail::SparseVec v;
      if (payoff.count(seq))
        for (auto [k, x] : payoff.at(seq)) v.emplace_back(k, x);
      return v;
    };
    // All reduced pure strategies below a sequence, as payoff vectors.
    auto strategies = [&](auto&& self, long seq) -> std::vector<detail::SparseVec> {
      std::vector<detail::SparseVec> acc{base_vec(seq)};
      if (!children.count(seq)) return acc;
      for (int I : children.at(seq)) {
        std::vector<detail::SparseVec> options;
        for (std::size_t a = 0; a < t.infoset(I).actions.size(); ++a) {
          auto sub = self(self, detail::own_key(I, static_cast<int>(a)));
          for (auto& v : sub) options.push_back(std::move(v));
        }
        if (static_cast<double>(acc.size()) * static_cast<double>(options.size()) > static_cast<double>(budget))
          throw Error("pure-strategy budget exceeded for player " + std::to_string(j + 1));
        std::vector<detail::SparseVec> next;
        next.reserve(acc.size() * options.size());
        for (const auto& x : acc)
          for (const auto& y : options) next.push_back(detail::add_sparse(x, y));
        acc = std::move(next);
      }
      return acc;
    };
    auto direct = [&](auto&& self, long seq) -> detail::SparseVec {
      detail::SparseVec v = base_vec(seq);
      if (children.count(seq))
        for (int I : children.at(seq)) v = detail::add_sparse(v, self(self, detail::own_key(I, aug.direct_action[I])));
      return v;
    };
    std::vector<detail::SparseVec> all = strategies(strategies, -1);
    detail::SparseVec d = direct(direct, -1);
    ep.pure_strategies[j] = static_cast<long>(all.size());
    std::vector<detail::SparseVec> rows;
    for (auto& s : all) {
      detail::SparseVec neg = d;
      for (auto& e : neg) e.second = -e.second;
      detail::SparseVec g = detail::add_sparse(s, neg);
      g.erase(std::remove_if(g.begin(), g.end(), [](const auto& e) { return e.second == 0; }), g.end());
      if (!g.empty()) rows.push_back(std::move(g));
    }
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    ep.constraints[j] = static_cast<int>(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k)
      lp.add_row("ic" + std::to_string(j + 1) + "_" + std::to_string(k), std::move(rows[k]), RowSense::kLe, 0.0);
  }
  return ep;
}

}  // namespace medeq
