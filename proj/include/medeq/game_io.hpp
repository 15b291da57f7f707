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

// EFG-S: a line-oriented text format for extensive-form games.
//
//   game <n_players>
//   node <id> player <i> infoset <iid> actions <a1,a2,...> parent <pid> via <action>
//   node <id> chance probs <a1:p1,a2:p2,...> parent <pid> via <action>
//   node <id> terminal utils <u1,u2,...> parent <pid> via <action>
//
// The root omits "parent ... via ...". Lines starting with '#' are comments.
// Players are numbered from 1. A parent must appear before its children.

#pragma once

#include <charconv>
#include <cmath>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <vector>

#include "medeq/game.hpp"

namespace medeq {

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Shortest decimal text that parses back to the same double.
inline std::string format_number(double v) {
  if (v == 0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_double(std::string_view s, int line) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError(line, "invalid number '" + std::string(s) + "'");
  return v;
}

inline int parse_int(std::string_view s, int line) {
  int v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError(line, "invalid integer '" + std::string(s) + "'");
  return v;
}

}  // namespace detail

inline GameTree parse_game(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  int num_players = -1;
  std::unique_ptr<GameBuilder> builder;
  std::unordered_map<std::string, int> ids;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::istringstream tok{std::string(line)};
    std::vector<std::string> t;
    for (std::string w; tok >> w;) t.push_back(w);
    if (t.empty() || t[0][0] == '#') continue;
    if (t[0] == "game") {
      if (num_players > 0) throw ParseError(line_no, "duplicate game header");
      if (t.size() != 2) throw ParseError(line_no, "expected 'game <n_players>'");
      num_players = detail::parse_int(t[1], line_no);
      if (num_players < 1) throw ParseError(line_no, "need at least one player");
      builder = std::make_unique<GameBuilder>(num_players);
      continue;
    }
    if (t[0] != "node") throw ParseError(line_no, "unknown record '" + t[0] + "'");
    if (!builder) throw ParseError(line_no, "node before game header");
    if (t.size() < 4) throw ParseError(line_no, "truncated node record");
    const std::string& id = t[1];
    if (ids.count(id)) throw ParseError(line_no, "duplicate node id '" + id + "'");

    std::size_t tail = 0;  // index where "parent" starts
    const std::string& kind = t[2];
    if (kind == "player") tail = 8;
    else if (kind == "chance" || kind == "terminal") tail = 5;
    else throw ParseError(line_no, "unknown node kind '" + kind + "'");
    int parent = -1;
    std::string via;
    if (t.size() == tail + 4) {
      if (t[tail] != "parent" || t[tail + 2] != "via")
        throw ParseError(line_no, "expected 'parent <pid> via <action>'");
      auto it = ids.find(t[tail + 1]);
      if (it == ids.end()) throw ParseError(line_no, "unknown parent '" + t[tail + 1] + "'");
      parent = it->second;
      via = t[tail + 3];
    } else if (t.size() != tail) {
      throw ParseError(line_no, "malformed node record");
    } else if (!ids.empty()) {
      throw ParseError(line_no, "only the root may omit its parent");
    }

    int created = -1;
    try {
      if (kind == "player") {
        if (t[4] != "infoset" || t[6] != "actions")
          throw ParseError(line_no, "expected 'player <i> infoset <iid> actions <...>'");
        int player = detail::parse_int(t[3], line_no);
        if (player < 1 || player > num_players) throw ParseError(line_no, "player out of range");
        created = builder->decision(parent, via, player - 1, t[5], detail::split(t[7], ','), id);
      } else if (kind == "chance") {
        if (t[3] != "probs") throw ParseError(line_no, "expected 'probs'");
        std::vector<std::pair<std::string, double>> outcomes;
        double sum = 0;
        for (const std::string& item : detail::split(t[4], ',')) {
          auto colon = item.rfind(':');
          if (colon == std::string::npos) throw ParseError(line_no, "expected action:prob in '" + item + "'");
          double p = detail::parse_double(std::string_view(item).substr(colon + 1), line_no);
          if (p < 0) throw ParseError(line_no, "negative probability");
          outcomes.emplace_back(item.substr(0, colon), p);
          sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw ParseError(line_no, "chance probabilities do not sum to 1");
        if (std::abs(sum - 1.0) > 1e-12)
          for (auto& o : outcomes) o.second /= sum;
        created = builder->chance(parent, via, outcomes, id);
      } else {
        if (t[3] != "utils") throw ParseError(line_no, "expected 'utils'");
        std::vector<double> u;
        for (const std::string& item : detail::split(t[4], ','))
          u.push_back(detail::parse_double(item, line_no));
        if (static_cast<int>(u.size()) != num_players)
          throw ParseError(line_no, "expected " + std::to_string(num_players) + " utilities");
        created = builder->terminal(parent, via, std::move(u), id);
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
    ids.emplace(id, created);
  }
  if (!builder) throw ParseError(line_no, "missing game header");
  GameTree g;
  try {
    g = std::move(*builder).build();
  } catch (const Error& e) {
    throw ParseError(line_no, e.what());
  }
  ValidationReport report = validate(g);
  if (!report.ok()) throw Error("invalid game: " + report.violations.front().message);
  return g;
}

// Canonical text: nodes in breadth-first order, actions in stored order.
inline std::string serialize_game(const GameTree& g) {
  std::string out = "game " + std::to_string(g.num_players()) + "\n";
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + v[k];
    return s;
  };
  for (int id : g.bfs_order()) {
    const Node& n = g.node(id);
    out += "node " + n.label;
    if (n.is_player()) {
      out += " player " + std::to_string(n.player + 1) + " infoset " + g.infoset(n.infoset).name +
             " actions " + join(n.actions);
    } else if (n.is_chance()) {
      out += " chance probs ";
      for (std::size_t k = 0; k < n.actions.size(); ++k)
        out += (k ? "," : "") + n.actions[k] + ":" + format_number(n.probs[k]);
    } else {
      out += " terminal utils ";
      for (std::size_t k = 0; k < n.utilities.size(); ++k)
        out += (k ? "," : "") + format_number(n.utilities[k]);
    }
    if (n.parent >= 0)
      out += " parent " + g.node(n.parent).label + " via " + std::string(g.incoming_action(id));
    out += "\n";
  }
  return out;
}

}  // namespace medeq
