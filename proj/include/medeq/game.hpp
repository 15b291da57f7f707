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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace medeq {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NodeKind { kPlayer, kChance, kTerminal };

// One history of the game. Player indices are 0-based internally; the text
// format and all user-facing output use 1-based indices.
struct Node {
  int parent = -1;
  int via = -1;  // index of the incoming action in the parent's action list
  std::string label;
  NodeKind kind = NodeKind::kTerminal;
  int player = -1;
  int infoset = -1;
  std::vector<std::string> actions;
  std::vector<int> children;
  std::vector<double> probs;      // chance nodes only
  std::vector<double> utilities;  // terminal nodes only
  int layer = 0;

  bool is_terminal() const { return kind == NodeKind::kTerminal; }
  bool is_chance() const { return kind == NodeKind::kChance; }
  bool is_player() const { return kind == NodeKind::kPlayer; }
};

struct Infoset {
  int player = -1;
  std::string name;
  std::vector<std::string> actions;
  std::vector<int> nodes;
};

// Sequence of a player: empty, or identified by its last (infoset, action)
// pair (perfect recall makes the pair sufficient).
struct SequenceId {
  int player = -1;
  int infoset = -1;
  int action = -1;

  bool empty() const { return infoset < 0; }
  friend bool operator==(const SequenceId&, const SequenceId&) = default;
  friend auto operator<=>(const SequenceId&, const SequenceId&) = default;
};

// Rooted extensive-form game. Node 0 is the root. Immutable once built;
// construct through GameBuilder or GameTree::from_parts.
class GameTree {
 public:
  GameTree() = default;

  // Takes ownership of raw node/infoset arrays and recomputes derived data
  // (children lists must already be consistent with parent/via).
  static GameTree from_parts(int num_players, std::vector<Node> nodes,
                             std::vector<Infoset> infosets) {
    GameTree g;
    g.num_players_ = num_players;
    g.nodes_ = std::move(nodes);
    g.infosets_ = std::move(infosets);
    g.finalize();
    return g;
  }

  int num_players() const { return num_players_; }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_infosets() const { return static_cast<int>(infosets_.size()); }
  const Node& node(int id) const { return nodes_.at(id); }
  const Infoset& infoset(int id) const { return infosets_.at(id); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Infoset>& infosets() const { return infosets_; }
  int root() const { return 0; }

  std::string_view incoming_action(int id) const {
    const Node& n = nodes_[id];
    if (n.parent < 0) return {};
    return nodes_[n.parent].actions[n.via];
  }

  int depth() const {
    int d = 0;
    for (const Node& n : nodes_) d = std::max(d, n.layer);
    return d;
  }

  int max_branching() const {
    std::size_t b = 0;
    for (const Node& n : nodes_) b = std::max(b, n.children.size());
    return static_cast<int>(b);
  }

  int num_terminals() const {
    return static_cast<int>(std::count_if(nodes_.begin(), nodes_.end(),
                                          [](const Node& n) { return n.is_terminal(); }));
  }

  std::vector<int> infosets_of(int player) const {
    std::vector<int> out;
    for (int i = 0; i < num_infosets(); ++i)
      if (infosets_[i].player == player) out.push_back(i);
    return out;
  }

  // |Sigma_i|: the empty sequence plus one per infoset-action pair.
  int num_sequences(int player) const {
    int count = 1;
    for (const Infoset& I : infosets_)
      if (I.player == player) count += static_cast<int>(I.actions.size());
    return count;
  }

  int total_sequences() const {
    int s = 0;
    for (int p = 0; p < num_players_; ++p) s += num_sequences(p);
    return s;
  }

  int find_infoset(std::string_view name) const {
    for (int i = 0; i < num_infosets(); ++i)
      if (infosets_[i].name == name) return i;
    return -1;
  }

  // Breadth-first order of node ids starting at the root.
  std::vector<int> bfs_order() const {
    std::vector<int> order;
    if (nodes_.empty()) return order;
    order.reserve(nodes_.size());
    order.push_back(0);
    for (std::size_t k = 0; k < order.size(); ++k)
      for (int c : nodes_[order[k]].children)
        if (c >= 0) order.push_back(c);
    return order;
  }

 private:
  void finalize() {
    for (Infoset& I : infosets_) I.nodes.clear();
    for (int id = 0; id < num_nodes(); ++id) {
      Node& n = nodes_[id];
      if (n.is_player() && n.infoset >= 0 && n.infoset < num_infosets())
        infosets_[n.infoset].nodes.push_back(id);
    }
    for (Node& n : nodes_) n.layer = -1;
    if (nodes_.empty()) return;
    // Layers by BFS; unreachable nodes keep -1 and are reported by validate().
    std::deque<int> queue{0};
    nodes_[0].layer = 0;
    while (!queue.empty()) {
      int id = queue.front();
      queue.pop_front();
      for (int c : nodes_[id].children) {
        if (c < 0 || c >= num_nodes() || nodes_[c].layer >= 0) continue;
        nodes_[c].layer = nodes_[id].layer + 1;
        queue.push_back(c);
      }
    }
  }

  int num_players_ = 0;
  std::vector<Node> nodes_;
  std::vector<Infoset> infosets_;
};

// Incremental construction of a GameTree. Children attach to their parent
// through the label of the incoming action.
class GameBuilder {
 public:
  explicit GameBuilder(int num_players) : num_players_(num_players) {
    if (num_players < 1) throw Error("game needs at least one player");
  }

  int chance(int parent, std::string_view via,
             const std::vector<std::pair<std::string, double>>& outcomes,
             std::string label = {}) {
    Node n;
    n.kind = NodeKind::kChance;
    for (const auto& [a, p] : outcomes) {
      n.actions.push_back(a);
      n.probs.push_back(p);
    }
    return attach(parent, via, std::move(n), std::move(label));
  }

  int decision(int parent, std::string_view via, int player, std::string_view infoset,
               std::vector<std::string> actions, std::string label = {}) {
    if (player < 0 || player >= num_players_)
      throw Error("player index out of range: " + std::to_string(player + 1));
    Node n;
    n.kind = NodeKind::kPlayer;
    n.player = player;
    auto it = infoset_index_.find(std::string(infoset));
    if (it == infoset_index_.end()) {
      Infoset I;
      I.player = player;
      I.name = std::string(infoset);
      I.actions = actions;
      it = infoset_index_.emplace(I.name, static_cast<int>(infosets_.size())).first;
      infosets_.push_back(std::move(I));
    }
    n.infoset = it->second;
    n.actions = std::move(actions);
    return attach(parent, via, std::move(n), std::move(label));
  }

  int terminal(int parent, std::string_view via, std::vector<double> utilities,
               std::string label = {}) {
    if (static_cast<int>(utilities.size()) != num_players_)
      throw Error("terminal needs one utility per player");
    Node n;
    n.kind = NodeKind::kTerminal;
    n.utilities = std::move(utilities);
    return attach(parent, via, std::move(n), std::move(label));
  }

  int num_nodes() const { return static_cast<int>(nodes_.size()); }

  GameTree build() && {
    for (std::size_t id = 0; id < nodes_.size(); ++id)
      for (std::size_t k = 0; k < nodes_[id].children.size(); ++k)
        if (nodes_[id].children[k] < 0)
          throw Error("node '" + nodes_[id].label + "' has no child for action '" +
                      nodes_[id].actions[k] + "'");
    if (nodes_.empty()) throw Error("game has no nodes");
    return GameTree::from_parts(num_players_, std::move(nodes_), std::move(infosets_));
  }

 private:
  int attach(int parent, std::string_view via, Node n, std::string label) {
    int id = static_cast<int>(nodes_.size());
    n.label = label.empty() ? std::to_string(id) : std::move(label);
    n.children.assign(n.actions.size(), -1);
    if (parent < 0) {
      if (!nodes_.empty()) throw Error("root already defined");
    } else {
      if (nodes_.empty()) throw Error("first node must be the root");
      if (parent >= static_cast<int>(nodes_.size())) throw Error("unknown parent node");
      Node& p = nodes_[parent];
      auto pos = std::find(p.actions.begin(), p.actions.end(), via);
      if (pos == p.actions.end())
        throw Error("parent '" + p.label + "' has no action '" + std::string(via) + "'");
      int k = static_cast<int>(pos - p.actions.begin());
      if (p.children[k] >= 0)
        throw Error("action '" + std::string(via) + "' of node '" + p.label +
                    "' already has a child");
      p.children[k] = id;
      n.parent = parent;
      n.via = k;
    }
    nodes_.push_back(std::move(n));
    return id;
  }

  int num_players_;
  std::vector<Node> nodes_;
  std::vector<Infoset> infosets_;
  std::unordered_map<std::string, int> infoset_index_;
};

// sigma_i(h): player i's last infoset-action pair strictly above h.
inline SequenceId sequence_of(const GameTree& g, int node, int player) {
  SequenceId s{player, -1, -1};
  int child = node;
  int cur = g.node(node).parent;
  while (cur >= 0) {
    const Node& n = g.node(cur);
    if (n.is_player() && n.player == player) {
      s.infoset = n.infoset;
      s.action = g.node(child).via;
      return s;
    }
    child = cur;
    cur = n.parent;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Validation

enum class ViolationKind {
  kStructure,
  kInfosetMismatch,
  kPerfectRecall,
  kChanceDistribution,
  kUtilities,
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

// Violations of the structural invariants. Timing properties are reported
// separately because raw (unnormalized) games are legitimate input.
struct ValidationReport {
  std::vector<Violation> violations;
  bool timeable = true;
  bool fixed_turn_order = true;

  bool ok() const { return violations.empty(); }
  bool normalized() const { return timeable && fixed_turn_order; }
  bool has(ViolationKind k) const {
    return std::any_of(violations.begin(), violations.end(),
                       [k](const Violation& v) { return v.kind == k; });
  }
};

inline ValidationReport validate(const GameTree& g) {
  ValidationReport r;
  auto add = [&r](ViolationKind k, std::string msg) { r.violations.push_back({k, std::move(msg)}); };
  const int n = g.num_nodes();
  if (n == 0) {
    add(ViolationKind::kStructure, "empty tree");
    return r;
  }
  if (g.node(0).parent != -1) add(ViolationKind::kStructure, "root has a parent");
  bool structure_ok = true;
  for (int id = 0; id < n; ++id) {
    const Node& nd = g.node(id);
    if (id != 0) {
      if (nd.parent < 0 || nd.parent >= n) {
        add(ViolationKind::kStructure, "node '" + nd.label + "' has no valid parent");
        structure_ok = false;
        continue;
      }
      const Node& p = g.node(nd.parent);
      if (nd.via < 0 || nd.via >= static_cast<int>(p.children.size()) || p.children[nd.via] != id) {
        add(ViolationKind::kStructure, "node '" + nd.label + "' is not linked from its parent");
        structure_ok = false;
      }
    }
    if (nd.layer < 0) {
      add(ViolationKind::kStructure, "node '" + nd.label + "' is unreachable from the root");
      structure_ok = false;
    }
    if (nd.children.size() != nd.actions.size()) {
      add(ViolationKind::kStructure, "node '" + nd.label + "' has mismatched children/actions");
      structure_ok = false;
    }
    if (nd.is_terminal()) {
      if (!nd.children.empty()) add(ViolationKind::kStructure, "terminal '" + nd.label + "' has children");
      if (static_cast<int>(nd.utilities.size()) != g.num_players())
        add(ViolationKind::kUtilities, "terminal '" + nd.label + "' has wrong utility count");
      for (double u : nd.utilities)
        if (!std::isfinite(u)) add(ViolationKind::kUtilities, "terminal '" + nd.label + "' has non-finite utility");
    } else if (nd.children.empty()) {
      add(ViolationKind::kStructure, "non-terminal '" + nd.label + "' has no actions");
      structure_ok = false;
    }
    if (nd.is_chance()) {
      double sum = 0;
      bool bad = nd.probs.size() != nd.children.size();
      for (double p : nd.probs) {
        if (!(p >= 0) || !std::isfinite(p)) bad = true;
        sum += p;
      }
      if (bad || std::abs(sum - 1.0) > 1e-12)
        add(ViolationKind::kChanceDistribution, "chance node '" + nd.label + "' probabilities do not sum to 1");
    }
    if (nd.is_player()) {
      if (nd.infoset < 0 || nd.infoset >= g.num_infosets()) {
        add(ViolationKind::kStructure, "player node '" + nd.label + "' has no infoset");
        structure_ok = false;
        continue;
      }
      const Infoset& I = g.infoset(nd.infoset);
      if (I.player != nd.player)
        add(ViolationKind::kInfosetMismatch, "node '" + nd.label + "' owner differs from infoset '" + I.name + "'");
      if (I.actions != nd.actions)
        add(ViolationKind::kInfosetMismatch, "node '" + nd.label + "' actions differ from infoset '" + I.name + "'");
    }
  }
  // Cycle check: following parents from any node must reach the root.
  for (int id = 0; id < n && structure_ok; ++id) {
    int steps = 0;
    for (int cur = id; cur > 0 && steps <= n; ++steps) cur = g.node(cur).parent;
    if (steps > n) {
      add(ViolationKind::kStructure, "cycle through node '" + g.node(id).label + "'");
      structure_ok = false;
    }
  }
  if (!structure_ok) {
    r.timeable = r.fixed_turn_order = false;
    return r;
  }

  for (int i = 0; i < g.num_infosets(); ++i) {
    const Infoset& I = g.infoset(i);
    if (I.nodes.empty()) continue;
    SequenceId first = sequence_of(g, I.nodes.front(), I.player);
    int layer = g.node(I.nodes.front()).layer;
    for (int h : I.nodes) {
      if (sequence_of(g, h, I.player) != first) {
        add(ViolationKind::kPerfectRecall, "infoset '" + I.name + "' has nodes with different sequences");
        break;
      }
    }
    for (int h : I.nodes)
      if (g.node(h).layer != layer) r.timeable = false;
  }
  std::map<int, int> layer_owner;  // chance = -1
  for (const Node& nd : g.nodes()) {
    if (nd.is_terminal()) continue;
    int owner = nd.is_chance() ? -1 : nd.player;
    auto [it, inserted] = layer_owner.emplace(nd.layer, owner);
    if (!inserted && it->second != owner) r.fixed_turn_order = false;
  }
  return r;
}

// Per-player (min, max) of terminal utilities.
inline std::vector<std::pair<double, double>> reward_range(const GameTree& g) {
  std::vector<std::pair<double, double>> out(g.num_players(), {0.0, 0.0});
  bool first = true;
  for (const Node& n : g.nodes()) {
    if (!n.is_terminal()) continue;
    for (int p = 0; p < g.num_players(); ++p) {
      double u = n.utilities[p];
      if (first) out[p] = {u, u};
      else out[p] = {std::min(out[p].first, u), std::max(out[p].second, u)};
    }
    first = false;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Normalization to timeable, fixed-turn-order form.

inline constexpr std::string_view kDummyAction = "\xC2\xB7";  // "·"

namespace detail {

// Assigns every decision group (player infoset or chance node) a layer by
// list scheduling: at each step one owner acts, advancing every group of that
// owner whose nodes are all waiting at the frontier.
struct Schedule {
  std::vector<int> node_layer;   // new layer of each original node
  std::vector<int> layer_owner;  // -1 for chance
};

inline Schedule schedule_layers(const GameTree& g) {
  const int n = g.num_nodes();
  Schedule s;
  s.node_layer.assign(n, -1);
  auto group_of = [&](int id) {
    const Node& nd = g.node(id);
    return nd.is_chance() ? g.num_infosets() + id : nd.infoset;
  };
  auto owner_of = [&](int id) { return g.node(id).is_chance() ? -1 : g.node(id).player; };
  std::vector<int> group_size(g.num_infosets() + n, 0);
  for (int id = 0; id < n; ++id)
    if (!g.node(id).is_terminal()) ++group_size[group_of(id)];

  std::vector<int> frontier{0};
  int layer = 0;
  while (true) {
    std::vector<int> waiting;
    for (int id : frontier) {
      if (g.node(id).is_terminal()) s.node_layer[id] = layer;
      else waiting.push_back(id);
    }
    if (waiting.empty()) break;
    std::map<int, int> ready_count;  // group -> nodes at frontier
    for (int id : waiting) ++ready_count[group_of(id)];
    std::map<int, int> owner_groups;
    for (int id : waiting) {
      int grp = group_of(id);
      if (ready_count[grp] == group_size[grp]) owner_groups[owner_of(id)] += 1;
    }
    if (owner_groups.empty())
      throw Error("game cannot be timed: infoset precedence is not a partial order");
    int owner;
    if (owner_groups.count(-1)) {
      owner = -1;
    } else {
      owner = owner_groups.begin()->first;
      for (auto [o, c] : owner_groups)
        if (c > owner_groups[owner]) owner = o;
    }
    s.layer_owner.push_back(owner);
    std::vector<int> next;
    for (int id : waiting) {
      int grp = group_of(id);
      if (owner_of(id) == owner && ready_count[grp] == group_size[grp]) {
        s.node_layer[id] = layer;
        for (int c : g.node(id).children) next.push_back(c);
      } else {
        next.push_back(id);
      }
    }
    frontier = std::move(next);
    ++layer;
  }
  return s;
}

}  // namespace detail

// Returns a realization-equivalent tree in which every infoset lies in a
// single layer and each layer has one owner. Dummy nodes carry one action
// (kDummyAction). Original nodes keep their ids; dummies are appended.
// Dummy nodes of one player at one layer that share the player's sequence
// share an infoset, which keeps perfect recall intact.
inline GameTree normalize_turn_order(const GameTree& g) {
  {
    ValidationReport r = validate(g);
    if (!r.ok()) throw Error("cannot normalize an invalid game: " + r.violations.front().message);
  }
  detail::Schedule sched = detail::schedule_layers(g);
  std::vector<Node> nodes = g.nodes();
  std::vector<Infoset> infosets = g.infosets();

  // Insert dummy chains on edges that skip layers. Terminals stay attached to
  // their parent directly.
  const int original = g.num_nodes();
  for (int id = 1; id < original; ++id) {
    if (g.node(id).is_terminal()) continue;
    int parent = g.node(id).parent;
    int gap = sched.node_layer[id] - sched.node_layer[parent] - 1;
    if (gap <= 0) continue;
    int via = g.node(id).via;
    int attach_parent = parent;
    int attach_via = via;
    for (int k = 1; k <= gap; ++k) {
      int layer = sched.node_layer[parent] + k;
      Node d;
      d.label = "~" + std::to_string(nodes.size());
      d.actions = {std::string(kDummyAction)};
      d.children = {-1};
      int owner = sched.layer_owner[layer];
      if (owner < 0) {
        d.kind = NodeKind::kChance;
        d.probs = {1.0};
      } else {
        d.kind = NodeKind::kPlayer;
        d.player = owner;
        d.infoset = -1;  // assigned below
      }
      d.parent = attach_parent;
      d.via = attach_via;
      int did = static_cast<int>(nodes.size());
      nodes[attach_parent].children[attach_via] = did;
      nodes.push_back(std::move(d));
      attach_parent = did;
      attach_via = 0;
    }
    nodes[attach_parent].children[attach_via] = id;
    nodes[id].parent = attach_parent;
    nodes[id].via = attach_via;
  }
  if (static_cast<int>(nodes.size()) == original) return g;

  // Assign dummy infosets in BFS order, keyed by (player, layer, sequence).
  std::map<std::tuple<int, int, int, int>, int> dummy_infoset;
  std::vector<std::vector<std::pair<int, int>>> seq(nodes.size());  // per node: per player (infoset, action)
  std::vector<int> layer(nodes.size(), 0);
  std::vector<int> order{0};
  seq[0].assign(g.num_players(), {-1, -1});
  for (std::size_t k = 0; k < order.size(); ++k) {
    int id = order[k];
    Node& nd = nodes[id];
    if (nd.is_player() && nd.infoset < 0) {
      auto key = std::make_tuple(nd.player, layer[id], seq[id][nd.player].first, seq[id][nd.player].second);
      auto it = dummy_infoset.find(key);
      if (it == dummy_infoset.end()) {
        Infoset I;
        I.player = nd.player;
        I.name = "~d" + std::to_string(layer[id]) + "_" + std::to_string(dummy_infoset.size());
        I.actions = nd.actions;
        it = dummy_infoset.emplace(key, static_cast<int>(infosets.size())).first;
        infosets.push_back(std::move(I));
      }
      nd.infoset = it->second;
    }
    for (std::size_t a = 0; a < nd.children.size(); ++a) {
      int c = nd.children[a];
      seq[c] = seq[id];
      if (nd.is_player()) seq[c][nd.player] = {nd.infoset, static_cast<int>(a)};
      layer[c] = layer[id] + 1;
      order.push_back(c);
    }
  }
  return GameTree::from_parts(g.num_players(), std::move(nodes), std::move(infosets));
}

// Structural equality: both trees are walked from the root in action order,
// comparing labels, kinds, owners, infoset names, actions, probabilities and
// utilities exactly. Node numbering does not matter.
inline bool structurally_equal(const GameTree& a, const GameTree& b) {
  if (a.num_players() != b.num_players() || a.num_nodes() != b.num_nodes()) return false;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [i, j] = stack.back();
    stack.pop_back();
    const Node& x = a.node(i);
    const Node& y = b.node(j);
    if (x.kind != y.kind || x.label != y.label || x.player != y.player || x.actions != y.actions ||
        x.probs != y.probs || x.utilities != y.utilities || x.children.size() != y.children.size())
      return false;
    if (x.is_player() && a.infoset(x.infoset).name != b.infoset(y.infoset).name) return false;
    for (std::size_t k = 0; k < x.children.size(); ++k) stack.emplace_back(x.children[k], y.children[k]);
  }
  return true;
}

}  // namespace medeq
