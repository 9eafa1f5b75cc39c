#pragma once

#include <Eigen/Core>

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vln {

struct Waypoint {
  std::string id;
  Eigen::Vector3d position{Eigen::Vector3d::Zero()};
};

// Undirected navigation graph over named waypoints. Immutable after
// construction, safe for concurrent reads. Edge weight is the Euclidean
// distance between endpoint positions, in meters.
class NavGraph {
 public:
  NavGraph() = default;

  // Throws ValidationError on duplicate ids, non-finite positions,
  // self-loops, or edges with unknown endpoints.
  NavGraph(std::vector<Waypoint> waypoints,
           std::vector<std::pair<std::string, std::string>> edges);

  [[nodiscard]] bool contains(const std::string& id) const;
  [[nodiscard]] const Waypoint& waypoint(const std::string& id) const;

  // Adjacent waypoint ids, sorted lexicographically.
  [[nodiscard]] const std::vector<std::string>& neighbors(const std::string& id) const;

  // Euclidean length of the edge (a, b). Throws LookupError if a and b are
  // not adjacent.
  [[nodiscard]] double edge_weight(const std::string& a, const std::string& b) const;

  [[nodiscard]] std::size_t size() const { return nodes_.size(); }
  [[nodiscard]] std::vector<std::string> ids() const;

  // Canonical edge list: each pair ordered (min, max), list sorted.
  [[nodiscard]] const std::vector<std::pair<std::string, std::string>>& edges() const {
    return edges_;
  }

 private:
  struct Node {
    Waypoint waypoint;
    std::vector<std::string> neighbors;
  };

  std::map<std::string, Node> nodes_;
  std::vector<std::pair<std::string, std::string>> edges_;
};

// Ids adjacent to `at`, sorted lexicographically. Throws LookupError for an
// unknown id.
[[nodiscard]] std::vector<std::string> navigable_candidates(const NavGraph& graph,
                                                            const std::string& at);

// Shortest weighted path length in meters; 0 when from == to; std::nullopt
// when the pair is disconnected. Throws LookupError for unknown ids.
[[nodiscard]] std::optional<double> geodesic_distance(const NavGraph& graph,
                                                      const std::string& from,
                                                      const std::string& to);

// Waypoint sequence achieving geodesic_distance(from, to); ties broken by
// the lexicographically smallest id sequence. Throws LookupError for
// unknown ids and UnreachableError when disconnected.
[[nodiscard]] std::vector<std::string> shortest_path(const NavGraph& graph,
                                                     const std::string& from,
                                                     const std::string& to);

// Largest finite pairwise geodesic distance; 0 for graphs with < 2 nodes.
[[nodiscard]] double graph_diameter(const NavGraph& graph);

struct Episode {
  NavGraph graph;
  std::string start_id;
  std::string goal_id;
  std::string instruction;
  double success_radius = 3.0;
  int max_steps = 20;
};

// Checks that start and goal exist, the goal is reachable from the start,
// success_radius is positive, and max_steps is non-negative.
void validate_episode(const Episode& episode);

}  // namespace vln
