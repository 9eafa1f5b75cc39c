#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vln/agents.hpp"
#include "vln/nav_graph.hpp"

namespace vln {

struct SceneObject {
  std::string id;
  std::string category;
  std::map<std::string, std::string> attributes;  // at least "color"
  Eigen::Vector3d position{Eigen::Vector3d::Zero()};
  std::vector<std::string> visible_from;  // waypoint ids, sorted
};

enum class WorldProfile { kCorridor, kTrap, kMaze, kR2rLike, kLandmarkGated };

[[nodiscard]] std::string profile_name(WorldProfile profile);
[[nodiscard]] WorldProfile parse_profile(const std::string& name);  // throws ValidationError

// Per-waypoint shaping of the oracle's semantic values. `fixed` replaces the
// base value, `scale` multiplies it; decoy branches use a fixed high value
// near the junction and a 0.3 scale beyond depth 2.
struct ValueOverride {
  std::optional<double> fixed;
  std::optional<double> scale;
};

struct WorldSpec {
  NavGraph graph;
  std::vector<SceneObject> objects;
  std::string start_id;
  std::string goal_id;
  std::string instruction;
  std::vector<std::string> landmark_object_ids;  // priority order for queries
  std::map<std::string, ValueOverride> value_overrides;
  // When landmark_gated is set, the orchestration oracle only produces
  // correct values once every gate noun appears in this step's answers;
  // until then misleading_values substitutes the listed waypoints.
  bool landmark_gated = false;
  std::vector<std::string> gate_nouns;
  std::map<std::string, double> misleading_values;
  double success_radius = 3.0;
  int max_steps = 20;
  std::uint64_t seed = 0;
  WorldProfile profile = WorldProfile::kCorridor;
  double diameter = 0.0;  // cached graph diameter, normalizes value estimates
};

// Deterministic synthetic world per (seed, profile). Identical inputs yield
// an identical WorldSpec on every run.
[[nodiscard]] WorldSpec generate_world(std::uint64_t seed, WorldProfile profile);

[[nodiscard]] Episode episode_from_world(const WorldSpec& world);

// Landmark categories in priority order (the oracle's query agenda).
[[nodiscard]] std::vector<std::string> landmark_nouns(const WorldSpec& world);

// Indices into world.objects of the objects visible from `at`, in object
// order; parallel to the detections oracle_scan emits there.
[[nodiscard]] std::vector<std::size_t> visible_objects(const WorldSpec& world,
                                                       const std::string& at);

// Ground-truth panoramic scan standing in for detection, masking, and depth
// estimation. Bounding boxes are placed so that heading_angle recovers the
// true bearing of each object (up to the circular wrap at +-pi); depth is
// the Euclidean distance to the object. Throws LookupError for an unknown
// waypoint.
[[nodiscard]] ScanResult oracle_scan(const WorldSpec& world, const std::string& at,
                                     int num_views = 8, double panorama_width = 2048.0,
                                     double panorama_height = 512.0);

}  // namespace vln
