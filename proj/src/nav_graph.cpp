#include "vln/nav_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>

#include "vln/errors.hpp"

namespace vln {

namespace {

constexpr double kPathTieEps = 1e-9;

}  // namespace

NavGraph::NavGraph(std::vector<Waypoint> waypoints,
                   std::vector<std::pair<std::string, std::string>> edges) {
  for (auto& wp : waypoints) {
    if (!wp.position.allFinite()) {
      throw ValidationError("waypoint '" + wp.id + "' has a non-finite position");
    }
    const std::string id = wp.id;
    auto [it, inserted] = nodes_.emplace(id, Node{std::move(wp), {}});
    if (!inserted) {
      throw ValidationError("duplicate waypoint id '" + id + "'");
    }
  }

  std::set<std::pair<std::string, std::string>> canonical;
  for (auto& [a, b] : edges) {
    if (a == b) {
      throw ValidationError("self-loop edge on waypoint '" + a + "'");
    }
    if (!nodes_.count(a) || !nodes_.count(b)) {
      throw ValidationError("edge (" + a + ", " + b + ") references an unknown waypoint");
    }
    canonical.emplace(std::min(a, b), std::max(a, b));
  }
  for (const auto& [a, b] : canonical) {
    nodes_.at(a).neighbors.push_back(b);
    nodes_.at(b).neighbors.push_back(a);
    edges_.emplace_back(a, b);
  }
  for (auto& [id, node] : nodes_) {
    std::sort(node.neighbors.begin(), node.neighbors.end());
  }
}

bool NavGraph::contains(const std::string& id) const { return nodes_.count(id) > 0; }

const Waypoint& NavGraph::waypoint(const std::string& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    throw LookupError("unknown waypoint id '" + id + "'");
  }
  return it->second.waypoint;
}

const std::vector<std::string>& NavGraph::neighbors(const std::string& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    throw LookupError("unknown waypoint id '" + id + "'");
  }
  return it->second.neighbors;
}

double NavGraph::edge_weight(const std::string& a, const std::string& b) const {
  const auto& na = neighbors(a);
  if (!std::binary_search(na.begin(), na.end(), b)) {
    throw LookupError("waypoints '" + a + "' and '" + b + "' are not adjacent");
  }
  return (waypoint(a).position - waypoint(b).position).norm();
}

std::vector<std::string> NavGraph::ids() const {
  std::vector<std::string> out;
  out.reserve(nodes_.size());
  for (const auto& [id, node] : nodes_) {
    out.push_back(id);
  }
  return out;
}

std::vector<std::string> navigable_candidates(const NavGraph& graph, const std::string& at) {
  return graph.neighbors(at);
}

namespace {

// Dijkstra distances from `source` to every reachable node.
std::map<std::string, double> dijkstra(const NavGraph& graph, const std::string& source) {
  std::map<std::string, double> dist;
  using Item = std::pair<double, std::string>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> frontier;
  dist[source] = 0.0;
  frontier.emplace(0.0, source);
  while (!frontier.empty()) {
    auto [d, u] = frontier.top();
    frontier.pop();
    auto it = dist.find(u);
    if (it != dist.end() && d > it->second) {
      continue;
    }
    for (const auto& v : graph.neighbors(u)) {
      const double nd = d + graph.edge_weight(u, v);
      auto vit = dist.find(v);
      if (vit == dist.end() || nd < vit->second) {
        dist[v] = nd;
        frontier.emplace(nd, v);
      }
    }
  }
  return dist;
}

}  // namespace

std::optional<double> geodesic_distance(const NavGraph& graph, const std::string& from,
                                        const std::string& to) {
  if (!graph.contains(from)) {
    throw LookupError("unknown waypoint id '" + from + "'");
  }
  if (!graph.contains(to)) {
    throw LookupError("unknown waypoint id '" + to + "'");
  }
  if (from == to) {
    return 0.0;
  }
  const auto dist = dijkstra(graph, from);
  auto it = dist.find(to);
  if (it == dist.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::vector<std::string> shortest_path(const NavGraph& graph, const std::string& from,
                                       const std::string& to) {
  if (!graph.contains(from)) {
    throw LookupError("unknown waypoint id '" + from + "'");
  }
  if (!graph.contains(to)) {
    throw LookupError("unknown waypoint id '" + to + "'");
  }
  if (from == to) {
    return {from};
  }

  // Walk greedily from `from`, always taking the lexicographically smallest
  // neighbor that still lies on some shortest path to `to`. Distances-to-goal
  // come from one Dijkstra pass rooted at `to` (the graph is undirected).
  const auto dist_to_goal = dijkstra(graph, to);
  if (!dist_to_goal.count(from)) {
    throw UnreachableError("no path from '" + from + "' to '" + to + "'");
  }

  std::vector<std::string> path{from};
  std::set<std::string> on_path{from};
  std::string current = from;
  while (current != to) {
    const double remaining = dist_to_goal.at(current);
    const std::string* next = nullptr;
    for (const auto& n : graph.neighbors(current)) {
      auto it = dist_to_goal.find(n);
      if (it == dist_to_goal.end() || on_path.count(n)) {
        continue;
      }
      const double via = graph.edge_weight(current, n) + it->second;
      if (std::abs(via - remaining) <= kPathTieEps * std::max(1.0, remaining)) {
        next = &n;
        break;  // Neighbors are sorted, so the first hit is the smallest id.
      }
    }
    if (next == nullptr) {
      throw UnreachableError("no path from '" + from + "' to '" + to + "'");
    }
    path.push_back(*next);
    on_path.insert(*next);
    current = *next;
  }
  return path;
}

double graph_diameter(const NavGraph& graph) {
  double best = 0.0;
  for (const auto& id : graph.ids()) {
    for (const auto& [other, d] : dijkstra(graph, id)) {
      best = std::max(best, d);
    }
  }
  return best;
}

void validate_episode(const Episode& episode) {
  if (!episode.graph.contains(episode.start_id)) {
    throw ValidationError("episode start '" + episode.start_id + "' is not in the graph");
  }
  if (!episode.graph.contains(episode.goal_id)) {
    throw ValidationError("episode goal '" + episode.goal_id + "' is not in the graph");
  }
  if (!geodesic_distance(episode.graph, episode.start_id, episode.goal_id).has_value()) {
    throw ValidationError("episode goal '" + episode.goal_id + "' is unreachable from start");
  }
  if (!(episode.success_radius > 0.0) || !std::isfinite(episode.success_radius)) {
    throw ValidationError("success_radius must be positive and finite");
  }
  if (episode.max_steps < 0) {
    throw ValidationError("max_steps must be non-negative");
  }
}

}  // namespace vln
