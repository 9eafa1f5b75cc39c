#include "vln/search_tree.hpp"

#include <algorithm>
#include <cmath>

#include "vln/errors.hpp"

namespace vln {

SearchTree::SearchTree(std::string root_id, double root_value, int initial_visits)
    : root_(root_id), initial_visits_(initial_visits) {
  nodes_.emplace(root_, TreeNode{root_, std::nullopt, {}, root_value, initial_visits});
}

const TreeNode& SearchTree::node(const std::string& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    throw StructureError("waypoint '" + id + "' is not in the search tree");
  }
  return it->second;
}

TreeNode& SearchTree::node_mutable(const std::string& id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    throw StructureError("waypoint '" + id + "' is not in the search tree");
  }
  return it->second;
}

std::vector<std::string> SearchTree::ids() const {
  std::vector<std::string> out;
  out.reserve(nodes_.size());
  for (const auto& [id, n] : nodes_) {
    out.push_back(id);
  }
  return out;
}

std::vector<std::string> SearchTree::leaves() const {
  std::vector<std::string> out;
  for (const auto& [id, n] : nodes_) {
    if (n.children.empty()) {
      out.push_back(id);
    }
  }
  return out;
}

std::vector<std::string> SearchTree::path_from_root(const std::string& id) const {
  std::vector<std::string> path;
  const TreeNode* cursor = &node(id);
  path.push_back(cursor->waypoint_id);
  while (cursor->parent) {
    cursor = &node(*cursor->parent);
    path.push_back(cursor->waypoint_id);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<std::string> SearchTree::expand(const std::string& current,
                                            const std::vector<std::string>& candidates,
                                            const SemanticValueMap& values) {
  TreeNode& parent = node_mutable(current);
  std::vector<std::string> added;
  for (const auto& candidate : candidates) {
    if (nodes_.count(candidate)) {
      continue;  // cross-branch waypoint, skipped to preserve acyclicity
    }
    auto vit = values.find(candidate);
    if (vit == values.end()) {
      throw LookupError("no semantic value for candidate '" + candidate + "'");
    }
    nodes_.emplace(candidate,
                   TreeNode{candidate, current, {}, vit->second, initial_visits_});
    parent.children.push_back(candidate);
    added.push_back(candidate);
  }
  return added;
}

double SearchTree::compute_reward(const std::string& current,
                                  const std::vector<std::string>& added,
                                  const SemanticValueMap& values) const {
  if (added.empty()) {
    return node(current).q_value;
  }
  double sum = 0.0;
  for (const auto& id : added) {
    auto it = values.find(id);
    if (it == values.end()) {
      throw LookupError("no semantic value for added waypoint '" + id + "'");
    }
    sum += it->second;
  }
  return sum / static_cast<double>(added.size());
}

void SearchTree::backpropagate(const std::string& current, double reward) {
  for (const auto& id : path_from_root(current)) {
    TreeNode& n = node_mutable(id);
    n.visit_count += 1;
    n.q_value += (reward - n.q_value) / static_cast<double>(n.visit_count);
  }
}

double SearchTree::path_value(const std::string& leaf) const {
  double weighted = 0.0;
  double total = 0.0;
  for (const auto& id : path_from_root(leaf)) {
    const TreeNode& n = node(id);
    const double w = static_cast<double>(n.visit_count) + 1.0;
    weighted += w * n.q_value;
    total += w;
  }
  return weighted / total;
}

ScoredCandidate SearchTree::score_leaf(const NavGraph& graph, const std::string& current,
                                       const std::string& leaf, double lambda,
                                       double max_dist) const {
  const auto dist = geodesic_distance(graph, current, leaf);
  if (!dist) {
    throw UnreachableError("leaf '" + leaf + "' is unreachable from '" + current + "'");
  }
  ScoredCandidate scored;
  scored.waypoint_id = leaf;
  scored.path_value = path_value(leaf);
  scored.distance = *dist;
  const double penalty = (max_dist > 0.0) ? lambda * (*dist / max_dist) : 0.0;
  scored.score = scored.path_value - penalty;
  return scored;
}

std::vector<ScoredCandidate> SearchTree::select_top_k(const NavGraph& graph,
                                                      const std::string& current, int k,
                                                      double lambda,
                                                      int max_children_per_parent) const {
  if (k < 1) {
    throw ConfigError("top-k selection requires k >= 1");
  }
  if (max_children_per_parent < 1) {
    throw ConfigError("top-k selection requires max_children_per_parent >= 1");
  }

  // Candidate leaves: childless, not the current node, reachable in `graph`.
  std::vector<std::string> candidates;
  std::vector<double> distances;
  double max_dist = 0.0;
  for (const auto& leaf : leaves()) {
    if (leaf == current) {
      continue;
    }
    const auto dist = geodesic_distance(graph, current, leaf);
    if (!dist) {
      continue;
    }
    candidates.push_back(leaf);
    distances.push_back(*dist);
    max_dist = std::max(max_dist, *dist);
  }

  std::vector<ScoredCandidate> scored;
  scored.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    ScoredCandidate sc;
    sc.waypoint_id = candidates[i];
    sc.path_value = path_value(candidates[i]);
    sc.distance = distances[i];
    sc.score = sc.path_value - ((max_dist > 0.0) ? lambda * (distances[i] / max_dist) : 0.0);
    scored.push_back(std::move(sc));
  }
  std::sort(scored.begin(), scored.end(), [](const ScoredCandidate& a, const ScoredCandidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.path_value != b.path_value) return a.path_value > b.path_value;
    return a.waypoint_id < b.waypoint_id;
  });

  std::vector<ScoredCandidate> selected;
  std::map<std::string, int> admitted_per_parent;
  for (auto& sc : scored) {
    if (static_cast<int>(selected.size()) == k) {
      break;
    }
    const std::string parent_key = node(sc.waypoint_id).parent.value_or("");
    int& count = admitted_per_parent[parent_key];
    if (count >= max_children_per_parent) {
      continue;
    }
    count += 1;
    selected.push_back(std::move(sc));
  }
  return selected;
}

}  // namespace vln
