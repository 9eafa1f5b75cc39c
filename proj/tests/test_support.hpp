#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "vln/nav_graph.hpp"
#include "vln/rng.hpp"

namespace vln::test {

inline bool near(double a, double b, double eps = 1e-12) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= eps * scale;
}

inline std::string pad2(int i) {
  std::string s = std::to_string(i);
  return s.size() < 2 ? "0" + s : s;
}

// Random connected graph with n nodes and roughly extra_edges chords beyond
// a random spanning tree. Positions land in a 30 m box.
inline NavGraph random_graph(Rng& rng, int n, int extra_edges) {
  std::vector<Waypoint> waypoints;
  for (int i = 0; i < n; ++i) {
    waypoints.push_back(Waypoint{
        "n" + pad2(i), Eigen::Vector3d(rng.next_real(0.0, 30.0), rng.next_real(0.0, 30.0),
                                       rng.next_real(0.0, 3.0))});
  }
  std::vector<std::pair<std::string, std::string>> edges;
  std::set<std::pair<std::string, std::string>> seen;
  for (int i = 1; i < n; ++i) {
    const int j = rng.next_int(0, i - 1);
    edges.emplace_back(waypoints[j].id, waypoints[i].id);
    seen.emplace(std::min(waypoints[j].id, waypoints[i].id),
                 std::max(waypoints[j].id, waypoints[i].id));
  }
  for (int k = 0; k < extra_edges && n > 2; ++k) {
    const int a = rng.next_int(0, n - 1);
    const int b = rng.next_int(0, n - 1);
    if (a == b) {
      continue;
    }
    auto key = std::make_pair(std::min(waypoints[a].id, waypoints[b].id),
                              std::max(waypoints[a].id, waypoints[b].id));
    if (seen.insert(key).second) {
      edges.push_back(key);
    }
  }
  return NavGraph(std::move(waypoints), std::move(edges));
}

// Exhaustive simple-path enumeration with pruning: the independent oracle
// for geodesic_distance and shortest_path.
struct EnumeratedPath {
  double length = std::numeric_limits<double>::infinity();
  std::vector<std::string> path;
};

inline void enumerate_paths(const NavGraph& graph, const std::string& current,
                            const std::string& goal, std::set<std::string>& visited,
                            std::vector<std::string>& stack, double length,
                            EnumeratedPath& best) {
  if (length > best.length + 1e-9) {
    return;
  }
  if (current == goal) {
    const bool better = length < best.length - 1e-9 ||
                        (std::abs(length - best.length) <= 1e-9 &&
                         (best.path.empty() || stack < best.path));
    if (better) {
      best.length = length;
      best.path = stack;
    }
    return;
  }
  for (const auto& next : graph.neighbors(current)) {
    if (visited.count(next)) {
      continue;
    }
    visited.insert(next);
    stack.push_back(next);
    enumerate_paths(graph, next, goal, visited, stack, length + graph.edge_weight(current, next),
                    best);
    stack.pop_back();
    visited.erase(next);
  }
}

inline EnumeratedPath enumerate_shortest(const NavGraph& graph, const std::string& from,
                                         const std::string& to) {
  EnumeratedPath best;
  std::set<std::string> visited{from};
  std::vector<std::string> stack{from};
  enumerate_paths(graph, from, to, visited, stack, 0.0, best);
  return best;
}

}  // namespace vln::test
