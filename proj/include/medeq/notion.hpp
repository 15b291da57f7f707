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
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "medeq/game.hpp"

namespace medeq {

// The withheld message. Stored as -1 in message lists.
inline constexpr int kBot = -1;
inline constexpr std::string_view kBotName = "\xE2\x8A\xA5";  // "⊥"

enum class FamilyKind { kCommunication, kFullCertification, kCustom };
enum class Coarseness { kNone, kExInterim, kNormalForm };
enum class MediatorInfo { kFromMessages, kInformationAdvantage };

// Allowed messages S_I per infoset of a (normalized) game: kBot and infoset
// ids, sorted ascending so kBot comes first.
struct MessageFamily {
  std::vector<std::vector<int>> allowed;

  bool allows(int infoset, int message) const {
    const auto& s = allowed.at(infoset);
    return std::binary_search(s.begin(), s.end(), message);
  }
};

struct NotionConfig {
  FamilyKind family = FamilyKind::kCommunication;
  // Custom family by infoset name; messages are infoset names or "⊥"/"bot".
  std::map<std::string, std::vector<std::string>> custom;
  Coarseness coarseness = Coarseness::kNone;
  MediatorInfo info = MediatorInfo::kFromMessages;
  std::optional<std::pair<double, double>> payments;
  // (infoset name, message name) -> cost charged to the sender.
  std::map<std::pair<std::string, std::string>, double> costs;

  // Message family actually used by the construction.
  FamilyKind effective_family() const {
    return info == MediatorInfo::kInformationAdvantage ? FamilyKind::kFullCertification : family;
  }

  void check() const {
    if (family == FamilyKind::kCustom && info == MediatorInfo::kInformationAdvantage)
      throw Error("a custom message family cannot be combined with mediator information advantage");
    if (payments && !(payments->first <= payments->second))
      throw Error("payment range needs L <= U");
    if (payments && (!std::isfinite(payments->first) || !std::isfinite(payments->second)))
      throw Error("payment bounds must be finite");
    for (const auto& [key, c] : costs)
      if (!std::isfinite(c) || c < 0) throw Error("message cost for '" + key.first + "' must be finite and >= 0");
  }
};

inline bool is_bot_name(std::string_view s) { return s == kBotName || s == "bot"; }

inline std::string message_name(const GameTree& g, int message) {
  return message == kBot ? std::string(kBotName) : g.infoset(message).name;
}

namespace detail {

inline int infoset_layer(const GameTree& g, int I) { return g.node(g.infoset(I).nodes.front()).layer; }

}  // namespace detail

inline MessageFamily default_family(const GameTree& g, FamilyKind kind) {
  if (kind == FamilyKind::kCustom) throw Error("custom families have no default");
  MessageFamily f;
  f.allowed.resize(g.num_infosets());
  for (int I = 0; I < g.num_infosets(); ++I) {
    auto& s = f.allowed[I];
    s.push_back(kBot);
    if (kind == FamilyKind::kFullCertification) {
      s.push_back(I);
      continue;
    }
    int layer = detail::infoset_layer(g, I);
    for (int J = 0; J < g.num_infosets(); ++J)
      if (g.infoset(J).player == g.infoset(I).player && detail::infoset_layer(g, J) == layer) s.push_back(J);
  }
  return f;
}

// Resolves the configured family against a normalized game.
inline MessageFamily make_family(const GameTree& g, const NotionConfig& config) {
  FamilyKind kind = config.effective_family();
  if (kind != FamilyKind::kCustom) return default_family(g, kind);
  MessageFamily f = default_family(g, FamilyKind::kFullCertification);
  for (const auto& [name, messages] : config.custom) {
    int I = g.find_infoset(name);
    if (I < 0) throw Error("custom family references unknown infoset '" + name + "'");
    std::vector<int> s{kBot, I};
    for (const std::string& m : messages) {
      if (is_bot_name(m)) continue;
      int J = g.find_infoset(m);
      if (J < 0) throw Error("custom family references unknown infoset '" + m + "'");
      if (g.infoset(J).player != g.infoset(I).player)
        throw Error("message '" + m + "' of infoset '" + name + "' belongs to another player");
      if (detail::infoset_layer(g, J) != detail::infoset_layer(g, I))
        throw Error("message '" + m + "' of infoset '" + name + "' lies in another layer");
      s.push_back(J);
    }
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    f.allowed[I] = std::move(s);
  }
  return f;
}

struct NrcResult {
  bool holds = true;
  // Witness when violated: I in S_{I'} but s in S_I \ S_{I'}.
  int I = -1;
  int I_prime = -1;
  int s = kBot;
};

inline NrcResult check_nrc(const MessageFamily& f) {
  const int n = static_cast<int>(f.allowed.size());
  for (int Ip = 0; Ip < n; ++Ip) {
    for (int I : f.allowed[Ip]) {
      if (I == kBot || I == Ip) continue;
      for (int s : f.allowed.at(I))
        if (!f.allows(Ip, s)) return {false, I, Ip, s};
    }
  }
  return {};
}

// Mediator objective as weights on player utilities.
struct Objective {
  std::vector<double> weights;

  static Objective welfare(int n) { return {std::vector<double>(n, 1.0)}; }
  static Objective player(int n, int i) {
    Objective o{std::vector<double>(n, 0.0)};
    o.weights.at(i) = 1.0;
    return o;
  }

  // "welfare", "player:<i>" (1-based) or "w1,w2,...".
  static Objective parse(const std::string& text, int n) {
    if (text == "welfare") return welfare(n);
    if (text.rfind("player:", 0) == 0) {
      int i = std::stoi(text.substr(7));
      if (i < 1 || i > n) throw Error("objective player out of range: " + text);
      return player(n, i - 1);
    }
    Objective o;
    std::string rest = text.rfind("weights:", 0) == 0 ? text.substr(8) : text;
    std::size_t start = 0;
    while (start <= rest.size()) {
      std::size_t pos = rest.find(',', start);
      std::string item = rest.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
      try {
        std::size_t used = 0;
        o.weights.push_back(std::stod(item, &used));
        if (used != item.size()) throw Error("");
      } catch (...) {
        throw Error("invalid objective '" + text + "'");
      }
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (static_cast<int>(o.weights.size()) != n)
      throw Error("objective needs " + std::to_string(n) + " weights");
    return o;
  }
};

inline const std::vector<std::string>& notion_names() {
  static const std::vector<std::string> names{
      "comm",     "coarse-comm",       "nf-coarse-comm",       "full-cert", "coarse-full-cert",
      "nf-coarse-full-cert", "persuasion", "coarse-persuasion", "nf-coarse-persuasion"};
  return names;
}

inline NotionConfig named_notion(const std::string& name) {
  NotionConfig c;
  std::string base = name;
  if (base.rfind("nf-coarse-", 0) == 0) {
    c.coarseness = Coarseness::kNormalForm;
    base = base.substr(10);
  } else if (base.rfind("coarse-", 0) == 0) {
    c.coarseness = Coarseness::kExInterim;
    base = base.substr(7);
  }
  if (base == "comm") {
    c.family = FamilyKind::kCommunication;
  } else if (base == "full-cert") {
    c.family = FamilyKind::kFullCertification;
  } else if (base == "persuasion") {
    c.family = FamilyKind::kFullCertification;
    c.info = MediatorInfo::kInformationAdvantage;
  } else {
    throw Error("unknown notion '" + name + "'");
  }
  return c;
}

inline std::string notion_label(const NotionConfig& c) {
  std::string prefix = c.coarseness == Coarseness::kNormalForm ? "nf-coarse-"
                       : c.coarseness == Coarseness::kExInterim ? "coarse-"
                                                                : "";
  if (c.info == MediatorInfo::kInformationAdvantage) return prefix + "persuasion";
  switch (c.family) {
    case FamilyKind::kCommunication: return prefix + "comm";
    case FamilyKind::kFullCertification: return prefix + "full-cert";
    case FamilyKind::kCustom: return prefix + "custom";
  }
  return prefix;
}

inline void parse_costs(const nlohmann::json& j, NotionConfig& c) {
  if (!j.is_object()) throw Error("costs must be an object {infoset: {message: cost}}");
  for (const auto& [infoset, inner] : j.items()) {
    if (!inner.is_object()) throw Error("costs for '" + infoset + "' must be an object");
    for (const auto& [msg, v] : inner.items()) {
      if (!v.is_number()) throw Error("cost for '" + infoset + "' must be a number");
      std::string m = is_bot_name(msg) ? std::string(kBotName) : msg;
      c.costs[{infoset, m}] = v.get<double>();
    }
  }
}

// {"notion": "comm|full-cert|custom|<named notion>", "coarse": "none|interim|normal-form",
//  "info": "messages|advantage", "payments": [L,U] | null, "costs": {...},
//  "family": {infoset: [messages]}}
inline NotionConfig parse_notion_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("invalid notion JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error("notion JSON must be an object");
  NotionConfig c;
  std::string notion = j.value("notion", "comm");
  if (notion == "custom") {
    c.family = FamilyKind::kCustom;
    if (!j.contains("family")) throw Error("custom notion needs a \"family\" object");
    for (const auto& [name, msgs] : j.at("family").items())
      c.custom[name] = msgs.get<std::vector<std::string>>();
  } else {
    c = named_notion(notion);
  }
  if (j.contains("coarse")) {
    std::string s = j.at("coarse").get<std::string>();
    if (s == "none") c.coarseness = Coarseness::kNone;
    else if (s == "interim") c.coarseness = Coarseness::kExInterim;
    else if (s == "normal-form") c.coarseness = Coarseness::kNormalForm;
    else throw Error("unknown coarseness '" + s + "'");
  }
  if (j.contains("info")) {
    std::string s = j.at("info").get<std::string>();
    if (s == "messages") c.info = MediatorInfo::kFromMessages;
    else if (s == "advantage") c.info = MediatorInfo::kInformationAdvantage;
    else throw Error("unknown mediator info '" + s + "'");
  }
  if (j.contains("payments") && !j.at("payments").is_null()) {
    auto p = j.at("payments").get<std::vector<double>>();
    if (p.size() != 2) throw Error("payments must be [L, U]");
    c.payments = std::make_pair(p[0], p[1]);
  }
  if (j.contains("costs")) parse_costs(j.at("costs"), c);
  c.check();
  return c;
}

}  // namespace medeq
