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

// Two-player payoff sets by scalarized objectives.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "medeq/augment.hpp"
#include "medeq/game_io.hpp"
#include "medeq/oracle.hpp"
#include "medeq/program.hpp"
#include "medeq/simplex.hpp"

namespace medeq {

struct Point2 {
  double x = 0;
  double y = 0;
  bool operator==(const Point2&) const = default;
};

struct FrontierPoint {
  double theta = 0;
  Point2 u;            // honest-profile expected payoffs
  double value = 0;    // LP optimum of cos(theta) u1 + sin(theta) u2
  double max_gain = 0; // verifier deviation gain of the extracted policy
  LpStatus status = LpStatus::kOptimal;

  bool ok() const { return status == LpStatus::kOptimal; }
};

// Worker count: MEDEQ_THREADS if set and positive, else hardware concurrency.
inline int worker_count() {
  int hw = std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("MEDEQ_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min<long>(v, 256));
  }
  return hw;
}

inline FrontierPoint solve_direction(const GameTree& game, const NotionConfig& config, double theta,
                                     const LpOptions& options = {}) {
  FrontierPoint p;
  p.theta = theta;
  Objective obj{{std::cos(theta), std::sin(theta)}};
  AugmentedGame aug = build_augmented(game, config, obj);
  LinearProgram lp = build_program(aug);
  LpSolution sol = solve(lp.model, options);
  p.status = sol.status;
  if (!p.ok()) return p;
  p.value = sol.objective;
  MediatorPolicy pol = extract_policy(aug, lp, sol);
  p.u = {direct_path_value(aug, pol, 0), direct_path_value(aug, pol, 1)};
  p.max_gain = verify_equilibrium(aug, pol).max_gain;
  return p;
}

// Directions theta_k = 2 pi k / k_directions, solved in parallel and returned
// in theta order. Failed directions keep their status and a zero point.
inline std::vector<FrontierPoint> payoff_frontier(const GameTree& game, const NotionConfig& config,
                                                  int k_directions, int threads = 0) {
  if (game.num_players() != 2) throw Error("payoff frontier needs a two-player game");
  if (k_directions < 4) throw Error("payoff frontier needs at least 4 directions");
  std::vector<FrontierPoint> out(k_directions);
  int workers = std::clamp(threads > 0 ? threads : worker_count(), 1, k_directions);
  std::atomic<int> next{0};
  std::vector<std::string> errors(k_directions);
  auto work = [&] {
    for (int k = next++; k < k_directions; k = next++) {
      double theta = 2.0 * std::numbers::pi * k / k_directions;
      try {
        out[k] = solve_direction(game, config, theta);
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const std::string& e : errors)
    if (!e.empty()) throw Error(e);
  return out;
}

// Convex hull, counterclockwise from the lowest-leftmost point, without
// collinear points; points closer than 1e-7 are merged.
inline std::vector<Point2> hull(std::vector<Point2> pts) {
  constexpr double kEps = 1e-7;
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  std::vector<Point2> uniq;
  for (const Point2& p : pts) {
    bool dup = false;
    for (const Point2& q : uniq)
      if (std::abs(p.x - q.x) <= kEps && std::abs(p.y - q.y) <= kEps) {
        dup = true;
        break;
      }
    if (!dup) uniq.push_back(p);
  }
  if (uniq.size() <= 2) return uniq;
  auto cross = [](const Point2& o, const Point2& a, const Point2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  };
  std::vector<Point2> h(2 * uniq.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < uniq.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], uniq[i]) <= kEps * kEps) --k;
    h[k++] = uniq[i];
  }
  for (std::size_t i = uniq.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(h[k - 2], h[k - 1], uniq[i]) <= kEps * kEps) --k;
    h[k++] = uniq[i];
  }
  h.resize(k - 1);
  // Start at the lowest point, then leftmost.
  auto start = std::min_element(h.begin(), h.end(), [](const Point2& a, const Point2& b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  });
  std::rotate(h.begin(), start, h.end());
  return h;
}

inline std::vector<Point2> frontier_hull(const std::vector<FrontierPoint>& pts) {
  std::vector<Point2> ok;
  for (const FrontierPoint& p : pts)
    if (p.ok()) ok.push_back(p.u);
  return hull(std::move(ok));
}

// max over the polygon of d . p
inline double support(const std::vector<Point2>& poly, double dx, double dy) {
  double best = -kInf;
  for (const Point2& p : poly) best = std::max(best, dx * p.x + dy * p.y);
  return best;
}

inline std::string frontier_csv(const std::vector<FrontierPoint>& pts) {
  std::string out = "theta,u1,u2\n";
  for (const FrontierPoint& p : pts) {
    if (!p.ok()) continue;
    out += format_number(p.theta) + "," + format_number(p.u.x) + "," + format_number(p.u.y) + "\n";
  }
  return out;
}

inline nlohmann::ordered_json frontier_json(const std::vector<FrontierPoint>& pts) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json points = nlohmann::ordered_json::array();
  for (const FrontierPoint& p : pts) {
    nlohmann::ordered_json e;
    e["theta"] = p.theta;
    e["status"] = to_string(p.status);
    if (p.ok()) {
      e["u1"] = p.u.x;
      e["u2"] = p.u.y;
      e["value"] = p.value;
      e["max_gain"] = p.max_gain;
    }
    points.push_back(std::move(e));
  }
  j["points"] = std::move(points);
  nlohmann::ordered_json h = nlohmann::ordered_json::array();
  for (const Point2& p : frontier_hull(pts)) h.push_back({p.x, p.y});
  j["hull"] = std::move(h);
  return j;
}

}  // namespace medeq
