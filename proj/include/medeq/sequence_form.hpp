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

#pragma once

#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "medeq/augment.hpp"

namespace medeq {

struct Triplet {
  int row;
  int col;
  double value;
};

// Sequence-form polytope {x : F x = f, x >= 0} of one agent of the augmented
// game. Column 0 is the empty sequence; infosets are numbered in breadth-first
// order of first appearance and contribute one column per action.
struct SequenceFormSystem {
  int agent = -1;
  std::vector<int> infosets;      // augmented infoset ids in row order
  std::vector<int> first_column;  // per augmented infoset; -1 for other agents
  std::vector<int> parent;        // per row-ordered infoset: parent column
  int num_columns = 1;
  std::vector<Triplet> F;
  std::vector<double> f;
  std::vector<int> leaf_map;  // per augmented node: last column for terminals, -1 otherwise

  int num_rows() const { return 1 + static_cast<int>(infosets.size()); }
  int column(int infoset, int action) const { return first_column.at(infoset) + action; }
};

inline SequenceFormSystem build_sequence_form(const AugmentedGame& aug, int agent) {
  const GameTree& t = aug.tree;
  SequenceFormSystem s;
  s.agent = agent;
  s.first_column.assign(t.num_infosets(), -1);
  s.leaf_map.assign(t.num_nodes(), -1);
  std::vector<int> seq(t.num_nodes(), 0);
  std::vector<int> row_of(t.num_infosets(), -1);
  for (int id : t.bfs_order()) {
    const Node& nd = t.node(id);
    if (nd.is_terminal()) s.leaf_map[id] = seq[id];
    int I = nd.is_player() && nd.player == agent ? nd.infoset : -1;
    if (I >= 0) {
      if (s.first_column[I] < 0) {
        row_of[I] = static_cast<int>(s.infosets.size());
        s.first_column[I] = s.num_columns;
        s.num_columns += static_cast<int>(nd.actions.size());
        s.infosets.push_back(I);
        s.parent.push_back(seq[id]);
      } else if (s.parent[row_of[I]] != seq[id]) {
        throw Error("augmented game violates perfect recall for agent " + std::to_string(agent));
      }
    }
    for (std::size_t a = 0; a < nd.children.size(); ++a)
      seq[nd.children[a]] = I >= 0 ? s.first_column[I] + static_cast<int>(a) : seq[id];
  }
  s.F.push_back({0, 0, 1.0});
  for (std::size_t k = 0; k < s.infosets.size(); ++k) {
    int row = static_cast<int>(k) + 1;
    int I = s.infosets[k];
    for (std::size_t a = 0; a < t.infoset(I).actions.size(); ++a)
      s.F.push_back({row, s.first_column[I] + static_cast<int>(a), 1.0});
    s.F.push_back({row, s.parent[k], -1.0});
  }
  s.f.assign(s.num_rows(), 0.0);
  s.f[0] = 1.0;
  return s;
}

// Pure realization plan of a player's direct strategy: report truthfully and
// obey every recommendation.
inline std::vector<double> direct_strategy(const AugmentedGame& aug, const SequenceFormSystem& s) {
  std::vector<double> x(s.num_columns, 0.0);
  x[0] = 1.0;
  for (std::size_t k = 0; k < s.infosets.size(); ++k) {
    int I = s.infosets[k];
    int d = aug.direct_action.at(I);
    if (d >= 0) x[s.first_column[I] + d] = x[s.parent[k]];
  }
  return x;
}

inline std::vector<double> direct_strategy(const AugmentedGame& aug, int player) {
  return direct_strategy(aug, build_sequence_form(aug, player));
}

// Chance reach p^(z) and per-player directness of every augmented node.
struct LeafData {
  std::vector<double> chance_reach;           // per node
  std::vector<std::vector<char>> direct;      // [player][node]: all own choices so far direct
};

inline LeafData leaf_data(const AugmentedGame& aug) {
  const GameTree& t = aug.tree;
  const int n = aug.num_players();
  LeafData d;
  d.chance_reach.assign(t.num_nodes(), 1.0);
  d.direct.assign(n, std::vector<char>(t.num_nodes(), 1));
  for (int id : t.bfs_order()) {
    const Node& nd = t.node(id);
    for (std::size_t a = 0; a < nd.children.size(); ++a) {
      int c = nd.children[a];
      d.chance_reach[c] = d.chance_reach[id] * (nd.is_chance() ? nd.probs[a] : 1.0);
      for (int p = 0; p < n; ++p) d.direct[p][c] = d.direct[p][id];
      if (nd.is_player() && nd.player < n && aug.direct_action[nd.infoset] != static_cast<int>(a))
        d.direct[nd.player][c] = 0;
    }
  }
  return d;
}

// Objective vector c over mediator sequences and, per player j, the deviation
// kernel A'_j over (mediator sequence, player-j sequence) with the direct
// payoff folded into the empty-sequence column.
struct LeafCoefficients {
  std::vector<double> c;
  std::vector<std::vector<Triplet>> A;
};

inline LeafCoefficients leaf_coefficients(const AugmentedGame& aug, const SequenceFormSystem& mediator,
                                          const std::vector<SequenceFormSystem>& players) {
  const GameTree& t = aug.tree;
  const int n = aug.num_players();
  LeafData d = leaf_data(aug);
  LeafCoefficients out;
  out.c.assign(mediator.num_columns, 0.0);
  std::vector<std::map<std::pair<int, int>, double>> acc(n);
  for (int z = 0; z < t.num_nodes(); ++z) {
    const Node& nd = t.node(z);
    if (!nd.is_terminal()) continue;
    int m = mediator.leaf_map[z];
    double p = d.chance_reach[z];
    int honest = 0;
    for (int i = 0; i < n; ++i) honest += d.direct[i][z];
    if (honest == n) out.c[m] += nd.utilities[n] * p;
    for (int j = 0; j < n; ++j) {
      if (honest - d.direct[j][z] != n - 1) continue;
      double w = nd.utilities[j] * p;
      if (w == 0) continue;
      acc[j][{m, players[j].leaf_map[z]}] += w;
      if (d.direct[j][z]) acc[j][{m, 0}] -= w;
    }
  }
  out.A.resize(n);
  for (int j = 0; j < n; ++j)
    for (const auto& [key, v] : acc[j])
      if (v != 0) out.A[j].push_back({key.first, key.second, v});
  return out;
}

}  // namespace medeq
