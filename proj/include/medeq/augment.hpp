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

// Single-deviator mediator-augmented game.
//
// Every history of the base game is split into a reveal stage (the acting
// player sends a message), a recommendation stage (the mediator answers) and
// an action stage. At most one player ever deviates; that player's transcript
// is tracked as the (reported infoset, recommended action) pair it last
// received, or as tainted once it has withheld information. Choices with a
// single legal option are not materialized as nodes.
//
// The augmented game is itself a GameTree with n + 1 agents; agent n is the
// mediator. Terminal utility vectors carry the n player utilities followed by
// the mediator objective.

#pragma once

#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "medeq/game.hpp"
#include "medeq/notion.hpp"

namespace medeq {

enum class Stage { kOptOut, kReveal, kRecommend, kAct, kChance, kPayment, kTerminal };

struct AugNodeInfo {
  int base = -1;  // node of the normalized base game
  Stage stage = Stage::kTerminal;
  int deviator = -1;
  bool tainted = false;
  int mediator_log = 0;  // interned mediator observation history
  int payee = -1;        // payment stage only
};

struct AugStats {
  int base_nodes = 0;
  int base_sequences = 0;  // |Sigma| summed over players
  int branching = 0;       // B
  int depth = 0;           // D
  int nodes = 0;           // |H^| before payments
  double c_comm = 0;       // |H^| / (|H| |Sigma|)
  double c_fullcert = 0;   // |H^| / (|H| B D)
};

struct AugmentedGame {
  GameTree base;  // normalized input game
  GameTree tree;  // augmented game; agent base.num_players() is the mediator
  std::vector<AugNodeInfo> info;
  // Per augmented infoset: index of the direct action for player infosets,
  // -1 for mediator infosets.
  std::vector<int> direct_action;
  NotionConfig config;
  Objective objective;
  MessageFamily family;
  AugStats stats;

  int num_players() const { return base.num_players(); }
  int mediator() const { return base.num_players(); }
  int num_agents() const { return base.num_players() + 1; }
};

namespace detail {

// Append-only observation histories shared by prefix.
class LogTrie {
 public:
  int push(int parent, int kind, int a = 0, int b = 0) {
    auto key = std::make_tuple(parent, kind, a, b);
    auto it = next_.find(key);
    if (it != next_.end()) return it->second;
    int id = size_++;
    next_.emplace(key, id);
    return id;
  }

 private:
  std::map<std::tuple<int, int, int, int>, int> next_;
  int size_ = 1;  // 0 is the empty log
};

enum LogKind {
  kLogObserve = 1,  // player observes its infoset
  kLogSend,         // player sends a message
  kLogReceive,      // mediator receives (player, message)
  kLogRecommend,    // mediator recommends (player, action)
  kLogGot,          // player receives a recommendation
  kLogAct,          // player plays an action
  kLogOpt,          // normal-form opt-in/opt-out
  kLogTrueInfoset,  // mediator observes (player, infoset)
  kLogChance,       // mediator observes (chance node, outcome)
};

class AugmentBuilder {
 public:
  AugmentBuilder(const GameTree& base, const NotionConfig& config, const Objective& objective)
      : g_(base), config_(config), objective_(objective), n_(base.num_players()) {
    family_ = make_family(g_, config_);
    infoset_seq_.resize(g_.num_infosets());
    for (int I = 0; I < g_.num_infosets(); ++I) {
      SequenceId s = sequence_of(g_, g_.infoset(I).nodes.front(), g_.infoset(I).player);
      infoset_seq_[I] = {s.infoset, s.action};
    }
    for (const auto& [key, cost] : config_.costs) {
      int I = g_.find_infoset(key.first);
      if (I < 0) throw Error("message cost references unknown infoset '" + key.first + "'");
      int m = kBot;
      if (!is_bot_name(key.second)) {
        m = g_.find_infoset(key.second);
        if (m < 0) throw Error("message cost references unknown message '" + key.second + "'");
      }
      costs_[{I, m}] = cost;
    }
  }

  AugmentedGame build() {
    State s;
    s.h = 0;
    s.logs.assign(n_ + 1, 0);
    s.cost.assign(n_, 0.0);
    if (config_.coarseness == Coarseness::kNormalForm) {
      std::vector<int> deciders;
      for (int p = 0; p < n_; ++p)
        if (!g_.infosets_of(p).empty()) deciders.push_back(p);
      opt_out(s, deciders, 0);
    } else {
      reveal(s);
    }
    AugmentedGame out;
    out.base = g_;
    out.tree = GameTree::from_parts(n_ + 1, std::move(nodes_), std::move(infosets_));
    out.info = std::move(info_);
    out.direct_action = std::move(direct_);
    out.config = config_;
    out.objective = objective_;
    out.family = std::move(family_);
    return out;
  }

 private:
  struct State {
    int h = 0;
    int dev = -1;
    bool tainted = false;
    std::pair<int, int> tau{-1, -1};  // deviator transcript (infoset, action)
    std::vector<int> logs;            // per agent, mediator last
    std::vector<double> cost;
  };

  int alloc(NodeKind kind, const State& s, Stage stage, std::vector<std::string> actions) {
    Node nd;
    nd.kind = kind;
    nd.label = std::to_string(nodes_.size());
    nd.actions = std::move(actions);
    nd.children.assign(nd.actions.size(), -1);
    nodes_.push_back(std::move(nd));
    AugNodeInfo inf;
    inf.base = s.h;
    inf.stage = stage;
    inf.deviator = s.dev;
    inf.tainted = s.tainted;
    inf.mediator_log = s.logs[n_];
    info_.push_back(inf);
    return static_cast<int>(nodes_.size()) - 1;
  }

  void link(int parent, int k, int child) {
    nodes_[parent].children[k] = child;
    nodes_[child].parent = parent;
    nodes_[child].via = k;
  }

  int infoset_for(int agent, int key, int sub, const std::vector<std::string>& actions, int direct) {
    auto [it, fresh] = infoset_index_.try_emplace(std::make_tuple(agent, key, sub), static_cast<int>(infosets_.size()));
    if (fresh) {
      Infoset I;
      I.player = agent;
      I.name = (agent == n_ ? "M" : "P" + std::to_string(agent + 1)) + "." + std::to_string(infosets_.size());
      I.actions = actions;
      infosets_.push_back(std::move(I));
      direct_.push_back(direct);
    }
    return it->second;
  }

  int decision(int agent, const State& s, Stage stage, std::vector<std::string> actions, int key, int sub,
               int direct) {
    int id = alloc(NodeKind::kPlayer, s, stage, actions);
    nodes_[id].player = agent;
    nodes_[id].infoset = infoset_for(agent, key, sub, nodes_[id].actions, direct);
    return id;
  }

  void opt_out(State s, const std::vector<int>& deciders, std::size_t k) {
    (void)opt_out_node(std::move(s), deciders, k);
  }

  int opt_out_node(State s, const std::vector<int>& deciders, std::size_t k) {
    if (k == deciders.size()) return reveal(std::move(s));
    int p = deciders[k];
    int id = decision(p, s, Stage::kOptOut, {"in", "out"}, s.logs[p], 0, 0);
    State in = s;
    in.logs[p] = trie_.push(s.logs[p], kLogOpt, 0);
    link(id, 0, opt_out_node(std::move(in), deciders, k + 1));
    State out = std::move(s);
    out.logs[p] = trie_.push(out.logs[p], kLogOpt, 1);
    out.dev = p;
    out.tainted = true;
    link(id, 1, reveal(std::move(out)));
    return id;
  }

  bool advantage() const { return config_.info == MediatorInfo::kInformationAdvantage; }

  int reveal(State s) {
    const Node& b = g_.node(s.h);
    if (b.is_terminal()) return terminal(s);
    if (b.is_chance()) {
      int id = alloc(NodeKind::kChance, s, Stage::kChance, b.actions);
      nodes_[id].probs = b.probs;
      for (std::size_t a = 0; a < b.children.size(); ++a) {
        State c = s;
        c.h = b.children[a];
        if (advantage()) c.logs[n_] = trie_.push(s.logs[n_], kLogChance, s.h, static_cast<int>(a));
        link(id, static_cast<int>(a), reveal(std::move(c)));
      }
      return id;
    }
    const int i = b.player;
    const int I = b.infoset;
    s.logs[i] = trie_.push(s.logs[i], kLogObserve, I);
    if (advantage()) s.logs[n_] = trie_.push(s.logs[n_], kLogTrueInfoset, i, I);
    std::vector<int> options = reveal_options(s, i, I);
    if (options.size() == 1) return after_message(std::move(s), i, I, options[0]);
    std::vector<std::string> names;
    int direct = 0;
    for (std::size_t k = 0; k < options.size(); ++k) {
      names.push_back(message_name(g_, options[k]));
      if (options[k] == I) direct = static_cast<int>(k);
    }
    int id = decision(i, s, Stage::kReveal, std::move(names), s.logs[i], 0, direct);
    for (std::size_t k = 0; k < options.size(); ++k) link(id, static_cast<int>(k), after_message(s, i, I, options[k]));
    return id;
  }

  // Legal messages, truthful first, withholding last.
  std::vector<int> reveal_options(const State& s, int i, int I) const {
    if (s.dev >= 0 && s.dev != i) return {I};
    if (config_.coarseness == Coarseness::kNormalForm) return {s.dev == i ? kBot : I};
    if (s.dev == i && s.tainted) return {kBot};
    std::pair<int, int> tau = s.dev == i ? s.tau : infoset_seq_[I];
    std::vector<int> out;
    bool bot = false;
    for (int m : family_.allowed[I]) {
      if (m == kBot) bot = true;
      else if (infoset_seq_[m] == tau) out.push_back(m);
    }
    auto it = std::find(out.begin(), out.end(), I);
    if (it != out.end()) std::rotate(out.begin(), it, it + 1);
    if (bot) out.push_back(kBot);
    return out;
  }

  double message_cost(int I, int m) const {
    auto it = costs_.find({I, m});
    return it == costs_.end() ? 0.0 : it->second;
  }

  int after_message(State s, int i, int I, int m) {
    s.logs[i] = trie_.push(s.logs[i], kLogSend, m);
    s.logs[n_] = trie_.push(s.logs[n_], kLogReceive, i, m);
    s.cost[i] += message_cost(I, m);
    if (s.dev < 0 && m != I) {
      s.dev = i;
      s.tau = infoset_seq_[I];
    }
    if (m == kBot) s.tainted = true;
    return recommend(std::move(s), i, I, m);
  }

  int recommend(State s, int i, int I, int m) {
    std::vector<int> recs;
    if (m == kBot) recs.push_back(-1);
    else
      for (int a = 0; a < static_cast<int>(g_.infoset(m).actions.size()); ++a) recs.push_back(a);
    auto child = [&](int a) {
      State c = s;
      c.logs[n_] = trie_.push(s.logs[n_], kLogRecommend, i, a);
      c.logs[i] = trie_.push(s.logs[i], kLogGot, a);
      if (c.dev == i && !c.tainted) c.tau = {m, a};
      return act(std::move(c), i, I, m, a);
    };
    if (recs.size() == 1) return child(recs[0]);
    int id = decision(n_, s, Stage::kRecommend, g_.infoset(m).actions, s.logs[n_], 0, -1);
    for (int a : recs) link(id, a, child(a));
    return id;
  }

  int act(State s, int i, int I, int m, int rec) {
    const Node& b = g_.node(s.h);
    const int k = static_cast<int>(b.actions.size());
    // Index in A_h of the recommended label, or -1.
    int rec_here = -1;
    if (rec >= 0) {
      const std::string& label = g_.infoset(m).actions[rec];
      auto it = std::find(b.actions.begin(), b.actions.end(), label);
      if (it != b.actions.end()) rec_here = static_cast<int>(it - b.actions.begin());
    }
    int forced = -1;
    if (s.dev >= 0 && s.dev != i) forced = rec;
    else if (config_.coarseness == Coarseness::kNormalForm && s.dev < 0) forced = rec;
    else if (config_.coarseness == Coarseness::kExInterim && rec_here >= 0) forced = rec_here;
    if (k == 1) forced = 0;
    auto child = [&](int a) {
      State c = s;
      c.logs[i] = trie_.push(s.logs[i], kLogAct, a);
      if (c.dev < 0 && a != rec) {
        c.dev = i;
        c.tau = {m, rec};
      }
      c.h = b.children[a];
      return reveal(std::move(c));
    };
    if (forced >= 0) return child(forced);
    int direct = rec_here >= 0 ? rec_here : 0;
    int id = decision(i, s, Stage::kAct, b.actions, s.logs[i], 0, direct);
    for (int a = 0; a < k; ++a) link(id, a, child(a));
    return id;
  }

  int terminal(const State& s) {
    const Node& b = g_.node(s.h);
    int id = alloc(NodeKind::kTerminal, s, Stage::kTerminal, {});
    std::vector<double> u(n_ + 1, 0.0);
    for (int p = 0; p < n_; ++p) {
      u[p] = b.utilities[p] - s.cost[p];
      u[n_] += objective_.weights[p] * b.utilities[p];
    }
    nodes_[id].utilities = std::move(u);
    return id;
  }

  const GameTree& g_;
  NotionConfig config_;
  Objective objective_;
  int n_;
  MessageFamily family_;
  std::vector<std::pair<int, int>> infoset_seq_;
  std::map<std::pair<int, int>, double> costs_;
  LogTrie trie_;
  std::vector<Node> nodes_;
  std::vector<Infoset> infosets_;
  std::vector<AugNodeInfo> info_;
  std::vector<int> direct_;
  std::map<std::tuple<int, int, int>, int> infoset_index_;
};

}  // namespace detail

inline AugStats augment_stats(const GameTree& base, int aug_nodes) {
  AugStats st;
  st.base_nodes = base.num_nodes();
  st.base_sequences = base.total_sequences();
  st.branching = std::max(1, base.max_branching());
  st.depth = std::max(1, base.depth());
  st.nodes = aug_nodes;
  st.c_comm = static_cast<double>(aug_nodes) / (static_cast<double>(st.base_nodes) * st.base_sequences);
  st.c_fullcert = static_cast<double>(aug_nodes) / (static_cast<double>(st.base_nodes) * st.branching * st.depth);
  return st;
}

// Appends the payment gadget to every terminal: chance picks a player i*
// uniformly, the mediator picks a payment p in {L, U} knowing its own history,
// i* and whether i* deviated; i* gains n p and the mediator objective loses n p.
inline AugmentedGame apply_payments(const AugmentedGame& aug, double L, double U) {
  if (!(L <= U)) throw Error("payment range needs L <= U");
  const int n = aug.num_players();
  std::vector<Node> nodes = aug.tree.nodes();
  std::vector<Infoset> infosets = aug.tree.infosets();
  std::vector<AugNodeInfo> info = aug.info;
  std::vector<int> direct = aug.direct_action;
  std::map<std::tuple<int, int, bool>, int> pay_infoset;
  const int original = static_cast<int>(nodes.size());
  auto add_node = [&](Node nd, AugNodeInfo inf) {
    nodes.push_back(std::move(nd));
    info.push_back(inf);
    return static_cast<int>(nodes.size()) - 1;
  };
  for (int t = 0; t < original; ++t) {
    if (!nodes[t].is_terminal()) continue;
    std::vector<double> u = nodes[t].utilities;
    AugNodeInfo base_info = info[t];
    Node& chance = nodes[t];
    chance.kind = NodeKind::kChance;
    chance.utilities.clear();
    chance.actions.clear();
    chance.probs.clear();
    for (int p = 0; p < n; ++p) {
      chance.actions.push_back("i" + std::to_string(p + 1));
      chance.probs.push_back(1.0 / n);
    }
    chance.children.assign(n, -1);
    info[t].stage = Stage::kChance;
    for (int p = 0; p < n; ++p) {
      auto leaf = [&](double pay) {
        Node z;
        z.kind = NodeKind::kTerminal;
        z.label = std::to_string(nodes.size());
        z.utilities = u;
        z.utilities[p] += n * pay;
        z.utilities[n] -= n * pay;
        AugNodeInfo zi = base_info;
        zi.payee = p;
        return add_node(std::move(z), zi);
      };
      int child;
      if (L == U) {
        child = leaf(L);
      } else {
        auto key = std::make_tuple(base_info.mediator_log, p, base_info.deviator == p);
        auto it = pay_infoset.find(key);
        if (it == pay_infoset.end()) {
          Infoset I;
          I.player = n;
          I.name = "M.pay" + std::to_string(pay_infoset.size());
          I.actions = {"L", "U"};
          it = pay_infoset.emplace(key, static_cast<int>(infosets.size())).first;
          infosets.push_back(std::move(I));
          direct.push_back(-1);
        }
        Node m;
        m.kind = NodeKind::kPlayer;
        m.label = std::to_string(nodes.size());
        m.player = n;
        m.infoset = it->second;
        m.actions = {"L", "U"};
        m.children = {-1, -1};
        AugNodeInfo mi = base_info;
        mi.stage = Stage::kPayment;
        mi.payee = p;
        child = add_node(std::move(m), mi);
        int zl = leaf(L);
        int zu = leaf(U);
        nodes[child].children = {zl, zu};
        nodes[zl].parent = nodes[zu].parent = child;
        nodes[zl].via = 0;
        nodes[zu].via = 1;
      }
      nodes[t].children[p] = child;
      nodes[child].parent = t;
      nodes[child].via = p;
    }
  }
  AugmentedGame out;
  out.base = aug.base;
  out.tree = GameTree::from_parts(n + 1, std::move(nodes), std::move(infosets));
  out.info = std::move(info);
  out.direct_action = std::move(direct);
  out.config = aug.config;
  out.config.payments = std::make_pair(L, U);
  out.objective = aug.objective;
  out.family = aug.family;
  out.stats = aug.stats;
  return out;
}

// Builds the augmented game for a (possibly unnormalized) base game. The base
// game is normalized first; payments in the config are applied last.
inline AugmentedGame build_augmented(const GameTree& game, const NotionConfig& config, const Objective& objective) {
  config.check();
  if (static_cast<int>(objective.weights.size()) != game.num_players())
    throw Error("objective needs one weight per player");
  GameTree base = normalize_turn_order(game);
  AugmentedGame aug = detail::AugmentBuilder(base, config, objective).build();
  aug.stats = augment_stats(aug.base, aug.tree.num_nodes());
  if (config.payments) return apply_payments(aug, config.payments->first, config.payments->second);
  return aug;
}

}  // namespace medeq
