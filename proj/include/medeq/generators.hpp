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

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "medeq/game.hpp"

namespace medeq {

// Three-card Kuhn poker. Chance deals player 1's card, then player 2's card
// (58 nodes, 30 terminals). Utilities are in chips with an ante of 1.
inline GameTree gen_kuhn() {
  GameBuilder b(2);
  const std::vector<std::string> cards{"J", "Q", "K"};
  int root = b.chance(-1, "", {{"J", 1.0 / 3}, {"Q", 1.0 / 3}, {"K", 1.0 / 3}}, "root");
  for (int c1 = 0; c1 < 3; ++c1) {
    std::vector<std::pair<std::string, double>> deal;
    for (int c2 = 0; c2 < 3; ++c2)
      if (c2 != c1) deal.emplace_back(cards[c2], 0.5);
    const std::string& a = cards[c1];
    int d1 = b.chance(root, a, deal, a);
    for (const auto& [bc, p] : deal) {
      int c2 = bc == "J" ? 0 : bc == "Q" ? 1 : 2;
      double win = c1 > c2 ? 1.0 : -1.0;
      std::string tag = a + bc;
      int p1 = b.decision(d1, bc, 0, "1:" + a, {"check", "bet"}, tag);
      int p2c = b.decision(p1, "check", 1, "2:" + bc + ":c", {"check", "bet"}, tag + "c");
      b.terminal(p2c, "check", {win, -win}, tag + "cc");
      int p1b = b.decision(p2c, "bet", 0, "1:" + a + ":cb", {"fold", "call"}, tag + "cb");
      b.terminal(p1b, "fold", {-1, 1}, tag + "cbf");
      b.terminal(p1b, "call", {2 * win, -2 * win}, tag + "cbc");
      int p2b = b.decision(p1, "bet", 1, "2:" + bc + ":b", {"fold", "call"}, tag + "b");
      b.terminal(p2b, "fold", {1, -1}, tag + "bf");
      b.terminal(p2b, "call", {2 * win, -2 * win}, tag + "bc");
    }
  }
  return std::move(b).build();
}

// Counterexample game separating perfect-recall mediation from normal-form
// coarse correlation. Chance picks one of four subgames uniformly:
//   up/down: player 1 (resp. 2) may exit, giving (0,1) (resp. (1,0)); otherwise
//            matching pennies where the other player moves first and the
//            second mover cannot see that move;
//   H/T:     player 1 guesses the coin without seeing it; a correct guess pays
//            (1,1), a wrong one (0,0).
inline GameTree gen_persuasion_gap() {
  GameBuilder b(2);
  int root = b.chance(-1, "", {{"up", 0.25}, {"down", 0.25}, {"H", 0.25}, {"T", 0.25}}, "root");

  int u = b.decision(root, "up", 0, "up.1", {"exit", "play"}, "u");
  b.terminal(u, "exit", {0, 1}, "u.exit");
  int u2 = b.decision(u, "play", 1, "up.2", {"h", "t"}, "u.2");
  int u3 = b.decision(u2, "h", 0, "up.pennies", {"h", "t"}, "u.h");
  b.terminal(u3, "h", {1, -1}, "u.hh");
  b.terminal(u3, "t", {-1, 1}, "u.ht");
  int u4 = b.decision(u2, "t", 0, "up.pennies", {"h", "t"}, "u.t");
  b.terminal(u4, "h", {-1, 1}, "u.th");
  b.terminal(u4, "t", {1, -1}, "u.tt");

  int d = b.decision(root, "down", 1, "down.2", {"exit", "play"}, "d");
  b.terminal(d, "exit", {1, 0}, "d.exit");
  int d1 = b.decision(d, "play", 0, "down.1", {"h", "t"}, "d.1");
  int d3 = b.decision(d1, "h", 1, "down.pennies", {"h", "t"}, "d.h");
  b.terminal(d3, "h", {1, -1}, "d.hh");
  b.terminal(d3, "t", {-1, 1}, "d.ht");
  int d4 = b.decision(d1, "t", 1, "down.pennies", {"h", "t"}, "d.t");
  b.terminal(d4, "h", {-1, 1}, "d.th");
  b.terminal(d4, "t", {1, -1}, "d.tt");

  int h = b.decision(root, "H", 0, "guess", {"H", "T"}, "coinH");
  b.terminal(h, "H", {1, 1}, "coinH.H");
  b.terminal(h, "T", {0, 0}, "coinH.T");
  int t = b.decision(root, "T", 0, "guess", {"H", "T"}, "coinT");
  b.terminal(t, "H", {0, 0}, "coinT.H");
  b.terminal(t, "T", {1, 1}, "coinT.T");
  return std::move(b).build();
}

struct RandomGameParams {
  int depth = 3;
  int branching = 2;
  int players = 2;
  double chance_freq = 0.25;
  double infoset_merge_prob = 0.5;
  double terminal_prob = 0.25;  // chance that a non-root node ends early
  bool zero_sum = false;
};

namespace detail {

// Platform-independent stream on top of mt19937_64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  int below(int n) { return static_cast<int>(uniform() * n); }
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace detail

// Random timeable, fixed-turn-order, perfect-recall game. Every layer has a
// single owner; nodes of a player layer are merged into infosets only when
// they share the player's sequence. Deterministic in the seed.
inline GameTree gen_random(std::uint64_t seed, const RandomGameParams& params) {
  if (params.depth < 1 || params.branching < 1 || params.players < 1)
    throw Error("random game parameters must be positive");
  if (params.zero_sum && params.players != 2) throw Error("zero-sum random games need two players");
  detail::Rng rng(seed);
  std::vector<int> owner(params.depth);
  for (int d = 0; d < params.depth; ++d)
    owner[d] = rng.bernoulli(params.chance_freq) ? -1 : rng.below(params.players);

  auto utilities = [&]() {
    std::vector<double> u(params.players);
    for (double& x : u) x = std::round(rng.uniform() * 100.0) / 100.0;
    if (params.zero_sum) u[1] = -u[0];
    return u;
  };

  GameBuilder b(params.players);
  std::vector<std::string> actions;
  for (int a = 0; a < params.branching; ++a) actions.push_back("a" + std::to_string(a));

  struct Pending {
    int parent;
    std::string via;
    std::vector<std::pair<int, int>> seq;  // per player (infoset id, action)
  };
  std::vector<Pending> layer{{-1, "", std::vector<std::pair<int, int>>(params.players, {-1, -1})}};
  int infoset_counter = 0;
  int node_counter = 0;
  std::map<std::string, int> infoset_ids;
  for (int d = 0; d <= params.depth && !layer.empty(); ++d) {
    std::vector<Pending> next;
    // player sequence -> infosets created in this layer under it
    std::map<std::pair<int, int>, std::vector<std::string>> groups;
    for (Pending& p : layer) {
      std::string label = "n" + std::to_string(node_counter++);
      bool ends = d == params.depth || (d > 0 && rng.bernoulli(params.terminal_prob));
      if (ends) {
        b.terminal(p.parent, p.via, utilities(), label);
        continue;
      }
      if (owner[d] < 0) {
        std::vector<double> w(params.branching);
        double sum = 0;
        for (double& x : w) sum += (x = 1.0 + std::floor(rng.uniform() * 4.0));
        std::vector<std::pair<std::string, double>> outcomes;
        for (int a = 0; a < params.branching; ++a) outcomes.emplace_back(actions[a], w[a] / sum);
        int id = b.chance(p.parent, p.via, outcomes, label);
        for (int a = 0; a < params.branching; ++a) next.push_back({id, actions[a], p.seq});
        continue;
      }
      int pl = owner[d];
      auto& group = groups[p.seq[pl]];
      std::string name;
      if (!group.empty() && rng.bernoulli(params.infoset_merge_prob)) {
        name = group[rng.below(static_cast<int>(group.size()))];
      } else {
        name = "P" + std::to_string(pl + 1) + "." + std::to_string(infoset_counter);
        infoset_ids[name] = infoset_counter++;
        group.push_back(name);
      }
      int id = b.decision(p.parent, p.via, pl, name, actions, label);
      for (int a = 0; a < params.branching; ++a) {
        Pending c{id, actions[a], p.seq};
        c.seq[pl] = {infoset_ids[name], a};
        next.push_back(std::move(c));
      }
    }
    layer = std::move(next);
    if (b.num_nodes() > 500) throw Error("random game exceeds 500 nodes; reduce depth or branching");
  }
  return std::move(b).build();
}

// Approximate bargaining game in the spirit of "Sheriff": chance draws how
// many illegal items player 1 carries (0..p1_power); each round player 1
// offers a bribe in 0..p2_power and player 2 accepts or rejects without seeing
// the cargo. In the last round player 2 instead chooses among accepting,
// inspecting and letting the cargo pass.
//
// Payoffs: accepted bribe b -> (2k - b, b); pass -> (2k, 0);
// inspect -> (-2k, 2k) if k > 0, else (1, -1).
// Diverges from the published Sheriff rules (no legal goods, no declared
// cargo, fixed item value).
inline GameTree gen_negotiation(int p1_power, int p2_power, int rounds) {
  if (rounds < 1 || rounds > 4) throw Error("negotiation rounds must be in 1..4");
  if (p1_power < 1 || p2_power < 1) throw Error("negotiation powers must be positive");
  GameBuilder b(2);
  std::vector<std::pair<std::string, double>> types;
  for (int k = 0; k <= p1_power; ++k) types.emplace_back("k" + std::to_string(k), 1.0 / (p1_power + 1));
  int root = b.chance(-1, "", types, "root");
  std::vector<std::string> offers;
  for (int x = 0; x <= p2_power; ++x) offers.push_back("b" + std::to_string(x));

  // Recursive expansion: (node to attach under, via, cargo, offer history).
  struct Frame {
    int parent;
    std::string via;
    int cargo;
    std::string history;
    int round;
  };
  std::vector<Frame> stack;
  for (int k = 0; k <= p1_power; ++k) stack.push_back({root, types[k].first, k, "", 1});
  std::vector<Frame> ordered;
  while (!stack.empty()) {
    Frame f = stack.front();
    stack.erase(stack.begin());
    std::string tag = "k" + std::to_string(f.cargo) + f.history;
    int p1 = b.decision(f.parent, f.via, 0, "1:k" + std::to_string(f.cargo) + f.history, offers, tag);
    for (int x = 0; x <= p2_power; ++x) {
      std::string hist = f.history + ".b" + std::to_string(x);
      bool last = f.round == rounds;
      std::vector<std::string> responses =
          last ? std::vector<std::string>{"accept", "inspect", "pass"} : std::vector<std::string>{"accept", "reject"};
      int p2 = b.decision(p1, offers[x], 1, "2:" + hist, responses, tag + ".b" + std::to_string(x));
      double k = f.cargo;
      b.terminal(p2, "accept", {2 * k - x, static_cast<double>(x)}, tag + ".b" + std::to_string(x) + ".a");
      if (last) {
        if (f.cargo > 0) b.terminal(p2, "inspect", {-2 * k, 2 * k}, tag + ".b" + std::to_string(x) + ".i");
        else b.terminal(p2, "inspect", {1, -1}, tag + ".b" + std::to_string(x) + ".i");
        b.terminal(p2, "pass", {2 * k, 0}, tag + ".b" + std::to_string(x) + ".p");
      } else {
        stack.push_back({p2, "reject", f.cargo, hist + ".r", f.round + 1});
      }
    }
  }
  return std::move(b).build();
}

}  // namespace medeq
