#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vln/search_tree.hpp"

namespace vln {

// Per-step multimodal record: instruction, trajectory caption, semantic map
// rendering, perception answers, plus the waypoint and semantic-value
// snapshot for retrieval. Immutable once stored.
struct MultimodalContext {
  int timestep = 0;
  std::string instruction;
  std::string trajectory_caption;
  std::string semantic_map_text;
  std::vector<std::string> answers;
  std::string waypoint_id;
  SemanticValueMap semantic_values;
  // Up to three map categories ordered by ascending depth; used by
  // trajectory reconstruction.
  std::vector<std::string> nearest_objects;
};

// Ordered store of per-step contexts with a waypoint -> timesteps index.
class MemoryBank {
 public:
  // Appends a context. Timesteps must be strictly increasing; an
  // out-of-order timestep throws ValidationError.
  void store(MultimodalContext context);

  [[nodiscard]] const std::vector<MultimodalContext>& contexts() const { return contexts_; }
  [[nodiscard]] std::size_t size() const { return contexts_.size(); }

  // Timesteps at which `waypoint_id` was the step waypoint (empty if never).
  [[nodiscard]] std::vector<int> visits(const std::string& waypoint_id) const;

  // Most recent context stored for `waypoint_id`, or nullptr if unvisited.
  [[nodiscard]] const MultimodalContext* latest_context(const std::string& waypoint_id) const;

  // Most recent semantic-value snapshot mentioning `waypoint_id`.
  [[nodiscard]] std::optional<double> latest_value(const std::string& waypoint_id) const;

  struct PathEntry {
    std::string waypoint_id;
    const MultimodalContext* context = nullptr;  // null for never-visited waypoints
    std::optional<double> semantic_value;        // latest snapshot value, when known
  };

  // For each path waypoint, in path order: the most recent context when
  // visited, otherwise a placeholder carrying only its latest value.
  [[nodiscard]] std::vector<PathEntry> contexts_for_path(
      const std::vector<std::string>& path) const;

 private:
  std::vector<MultimodalContext> contexts_;
  std::map<std::string, std::vector<int>> index_;
};

// Deterministic trajectory caption over the visited decision waypoints, one
// clause per step:
//   "Step 0: started at w00; saw door, bench; learned <answer excerpt>"
// joined by "; ". Every visited id must have at least one stored context;
// a missing entry throws ValidationError.
[[nodiscard]] std::string reconstruct_trajectory(const MemoryBank& bank,
                                                 const std::vector<std::string>& visited);

}  // namespace vln
