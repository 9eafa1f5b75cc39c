#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vln/nav_graph.hpp"

namespace vln {

// Waypoint id -> semantic value in [0, 1].
using SemanticValueMap = std::map<std::string, double>;

struct TreeNode {
  std::string waypoint_id;
  std::optional<std::string> parent;   // unset only for the root
  std::vector<std::string> children;   // insertion order
  double q_value = 0.0;
  int visit_count = 0;
};

struct ScoredCandidate {
  std::string waypoint_id;
  double path_value = 0.0;
  double distance = 0.0;  // geodesic meters from the current waypoint
  double score = 0.0;     // path_value - lambda * distance / max_distance
};

// Global search tree over discovered waypoints. Waypoints enter the tree at
// most once; candidates already present elsewhere are skipped on expansion,
// which keeps the tree acyclic over a cyclic navigation graph.
class SearchTree {
 public:
  // initial_visits > 0 turns the semantic-value prior into pseudo
  // observations that survive the first backpropagation.
  explicit SearchTree(std::string root_id, double root_value = 0.5, int initial_visits = 0);

  [[nodiscard]] const std::string& root() const { return root_; }
  [[nodiscard]] bool contains(const std::string& id) const { return nodes_.count(id) > 0; }
  [[nodiscard]] const TreeNode& node(const std::string& id) const;
  [[nodiscard]] std::size_t size() const { return nodes_.size(); }
  [[nodiscard]] std::vector<std::string> ids() const;

  // Childless nodes, sorted by id.
  [[nodiscard]] std::vector<std::string> leaves() const;

  // Root-to-id waypoint sequence.
  [[nodiscard]] std::vector<std::string> path_from_root(const std::string& id) const;

  // Adds each candidate not yet in the tree as a child of `current`, with
  // Q = its semantic value and N = initial_visits. Candidates already in
  // the tree are skipped. Returns the ids actually added, in input order.
  // Throws StructureError if `current` is not in the tree, LookupError if a
  // new candidate has no value.
  std::vector<std::string> expand(const std::string& current,
                                  const std::vector<std::string>& candidates,
                                  const SemanticValueMap& values);

  // Mean semantic value over `added`, or Q(current) when nothing was added.
  [[nodiscard]] double compute_reward(const std::string& current,
                                      const std::vector<std::string>& added,
                                      const SemanticValueMap& values) const;

  // Running-mean update N += 1, Q += (reward - Q) / N for every node on the
  // root-to-current path; nodes off the path are untouched.
  void backpropagate(const std::string& current, double reward);

  // Visit-count-weighted average of Q along the root-to-leaf path, with
  // +1 smoothing so fresh leaves (N = 0) still contribute their initial
  // semantic value: w_i = (N_i + 1) / sum_j (N_j + 1).
  [[nodiscard]] double path_value(const std::string& leaf) const;

  // Score(leaf) = path_value - lambda * d / max_dist, where d is the
  // geodesic distance from `current`. A zero max_dist disables the penalty.
  [[nodiscard]] ScoredCandidate score_leaf(const NavGraph& graph, const std::string& current,
                                           const std::string& leaf, double lambda,
                                           double max_dist) const;

  // Scores every leaf reachable from `current` (the current node itself is
  // excluded), sorts by (score desc, path_value desc, id asc), and greedily
  // admits candidates while no parent contributes more than
  // max_children_per_parent of them. Returns at most k candidates; an empty
  // list when no reachable leaf exists.
  [[nodiscard]] std::vector<ScoredCandidate> select_top_k(const NavGraph& graph,
                                                          const std::string& current, int k,
                                                          double lambda,
                                                          int max_children_per_parent = 2) const;

 private:
  TreeNode& node_mutable(const std::string& id);

  std::map<std::string, TreeNode> nodes_;
  std::string root_;
  int initial_visits_ = 0;
};

}  // namespace vln
