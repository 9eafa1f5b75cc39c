#include "vln/world.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

#include "vln/digest.hpp"
#include "vln/errors.hpp"
#include "vln/rng.hpp"

namespace vln {

namespace {

constexpr double kPi = std::numbers::pi;

// Edge steps stay >= 3.2 m so no intermediate waypoint falls inside the
// default 3 m success radius.
constexpr double kSpacing = 3.4;

std::string pad2(int i) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%02d", i);
  return buf;
}

const std::vector<std::string> kLandmarkCategories = {
    "door", "sofa", "table", "bench", "plant", "lamp", "clock", "painting", "shelf", "rug"};
const std::vector<std::string> kDistractorCategories = {"bed", "wardrobe", "mirror", "vase",
                                                        "stool", "basket"};
const std::vector<std::string> kColors = {"brown", "white", "blue", "green",
                                          "red",   "gray",  "black", "beige"};
const std::vector<std::string> kMaterials = {"wooden", "metal", "fabric", "glass", "wicker"};

struct WorldBuilder {
  std::vector<Waypoint> waypoints;
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<SceneObject> objects;

  std::string add_waypoint(const std::string& id, double x, double y, double z = 0.0) {
    waypoints.push_back(Waypoint{id, Eigen::Vector3d(x, y, z)});
    return id;
  }

  const Waypoint& find(const std::string& id) const {
    for (const auto& wp : waypoints) {
      if (wp.id == id) return wp;
    }
    throw LookupError("builder has no waypoint '" + id + "'");
  }

  void add_edge(const std::string& a, const std::string& b) { edges.emplace_back(a, b); }

  // Neighbors of `id` over the edges added so far.
  std::vector<std::string> adjacent(const std::string& id) const {
    std::vector<std::string> out;
    for (const auto& [a, b] : edges) {
      if (a == id) out.push_back(b);
      if (b == id) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::string add_object(Rng& rng, const std::string& category, const std::string& anchor,
                         std::vector<std::string> visible, bool with_state = false) {
    SceneObject obj;
    obj.id = "obj" + pad2(static_cast<int>(objects.size()));
    obj.category = category;
    obj.attributes["color"] = rng.pick(kColors);
    obj.attributes["material"] = rng.pick(kMaterials);
    if (with_state) {
      obj.attributes["state"] = (rng.next_below(2) == 0) ? "open" : "closed";
    }
    const auto& wp = find(anchor);
    const double side = (rng.next_below(2) == 0) ? 1.0 : -1.0;
    obj.position = wp.position + Eigen::Vector3d(rng.next_real(-1.2, 1.2),
                                                 side * rng.next_real(1.0, 2.0),
                                                 rng.next_real(0.3, 1.4));
    std::set<std::string> vis(visible.begin(), visible.end());
    vis.insert(anchor);
    obj.visible_from.assign(vis.begin(), vis.end());
    objects.push_back(obj);
    return objects.back().id;
  }
};

// Distinct categories drawn from `pool`, avoiding anything in `used`.
std::vector<std::string> pick_categories(Rng& rng, const std::vector<std::string>& pool,
                                         std::size_t count, std::set<std::string>& used) {
  std::vector<std::string> out;
  while (out.size() < count) {
    const std::string& c = rng.pick(pool);
    if (used.insert(c).second) {
      out.push_back(c);
    }
  }
  return out;
}

std::string describe(const SceneObject& obj) {
  return obj.attributes.at("color") + " " + obj.category;
}

void finalize(WorldSpec& world, WorldBuilder&& builder) {
  world.graph = NavGraph(std::move(builder.waypoints), std::move(builder.edges));
  world.objects = std::move(builder.objects);
  world.diameter = graph_diameter(world.graph);
}

WorldSpec make_corridor(std::uint64_t seed) {
  WorldSpec world;
  world.seed = seed;
  world.profile = WorldProfile::kCorridor;
  Rng rng(fnv1a64("corridor") ^ (seed * 0x9E3779B97F4A7C15ull + 1));

  const int n = 6 + static_cast<int>(seed % 5);
  WorldBuilder b;
  double x = 0.0;
  for (int i = 0; i < n; ++i) {
    b.add_waypoint("w" + pad2(i), x, rng.next_real(-0.5, 0.5));
    x += 3.2 + 0.6 * rng.next_unit();
  }
  for (int i = 0; i + 1 < n; ++i) {
    b.add_edge("w" + pad2(i), "w" + pad2(i + 1));
  }
  world.start_id = "w00";
  world.goal_id = "w" + pad2(n - 1);

  std::set<std::string> used_categories;
  const int n_landmarks = rng.next_int(1, 2);
  std::set<int> anchor_set;
  while (static_cast<int>(anchor_set.size()) < n_landmarks) {
    anchor_set.insert(rng.next_int(1, n - 2));
  }
  const auto landmark_cats =
      pick_categories(rng, kLandmarkCategories, static_cast<std::size_t>(n_landmarks) + 1,
                      used_categories);

  std::vector<std::string> clauses;
  int cat_index = 0;
  for (int anchor : anchor_set) {
    const std::string wp = "w" + pad2(anchor);
    const std::string& category = landmark_cats[cat_index++];
    const std::string id =
        b.add_object(rng, category, wp, b.adjacent(wp), category == "door");
    world.landmark_object_ids.push_back(id);
    clauses.push_back("the " + describe(b.objects.back()));
  }
  const std::string goal_obj = b.add_object(rng, landmark_cats.back(), world.goal_id,
                                            b.adjacent(world.goal_id));
  world.landmark_object_ids.push_back(goal_obj);
  const std::string goal_clause = "the " + describe(b.objects.back());

  const int n_distractors = rng.next_int(1, 2);
  for (int i = 0; i < n_distractors; ++i) {
    const std::string wp = "w" + pad2(rng.next_int(0, n - 1));
    std::set<std::string> pool_guard = used_categories;
    b.add_object(rng, pick_categories(rng, kDistractorCategories, 1, pool_guard).front(), wp,
                 b.adjacent(wp));
  }

  std::string instruction = "Walk down the corridor past ";
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    if (i > 0) instruction += " and ";
    instruction += clauses[i];
  }
  world.instruction = instruction + ", then stop at " + goal_clause + ".";

  finalize(world, std::move(b));
  return world;
}

WorldSpec make_trap(std::uint64_t seed) {
  WorldSpec world;
  world.seed = seed;
  world.profile = WorldProfile::kTrap;
  Rng rng(fnv1a64("trap") ^ (seed * 0x9E3779B97F4A7C15ull + 1));

  const int stem_len = 3 + static_cast<int>(seed % 2);         // includes the junction
  const int decoy_len = 4 + static_cast<int>((seed >> 2) % 2);
  const int correct_len = 2 + static_cast<int>((seed >> 4) % 2);

  WorldBuilder b;
  double x = 0.0;
  for (int i = 0; i < stem_len; ++i) {
    b.add_waypoint("s" + pad2(i), x, rng.next_real(-0.4, 0.4));
    if (i > 0) b.add_edge("s" + pad2(i - 1), "s" + pad2(i));
    x += kSpacing + 0.2 * rng.next_unit();
  }
  const std::string junction = "s" + pad2(stem_len - 1);
  const Eigen::Vector3d jpos = b.find(junction).position;

  // Decoy arm: dead end heading +y, locally attractive.
  double dy = jpos.y();
  for (int i = 0; i < decoy_len; ++i) {
    dy += kSpacing + 0.2 * rng.next_unit();
    b.add_waypoint("t" + pad2(i), jpos.x() + rng.next_real(-0.8, 0.8), dy);
    b.add_edge(i == 0 ? junction : "t" + pad2(i - 1), "t" + pad2(i));
  }

  // Correct arm heading -y, then the goal.
  double cy = jpos.y();
  for (int i = 0; i < correct_len; ++i) {
    cy -= kSpacing + 0.2 * rng.next_unit();
    b.add_waypoint("c" + pad2(i), jpos.x() + rng.next_real(-0.8, 0.8), cy);
    b.add_edge(i == 0 ? junction : "c" + pad2(i - 1), "c" + pad2(i));
  }
  b.add_waypoint("g00", jpos.x() + rng.next_real(-0.8, 0.8), cy - kSpacing);
  b.add_edge("c" + pad2(correct_len - 1), "g00");

  world.start_id = "s00";
  world.goal_id = "g00";

  // The decoy looks promising up close; its tail gives the branch away.
  world.value_overrides["t00"] = ValueOverride{0.90, std::nullopt};
  world.value_overrides["t01"] = ValueOverride{0.85, std::nullopt};
  for (int i = 2; i < decoy_len; ++i) {
    world.value_overrides["t" + pad2(i)] = ValueOverride{std::nullopt, 0.3};
  }

  std::set<std::string> used_categories;
  const auto cats = pick_categories(rng, kLandmarkCategories, 2, used_categories);
  const std::string arm_obj =
      b.add_object(rng, cats[0], "c" + pad2(0), {junction, "c" + pad2(std::min(1, correct_len - 1))});
  const std::string goal_obj =
      b.add_object(rng, cats[1], "g00", {"c" + pad2(correct_len - 1)});
  world.landmark_object_ids = {arm_obj, goal_obj};

  // Bedroom-flavored scenery on the decoy arm.
  b.add_object(rng, "bed", "t" + pad2(decoy_len - 1), b.adjacent("t" + pad2(decoy_len - 1)));
  b.add_object(rng, "wardrobe", "t" + pad2(1), b.adjacent("t" + pad2(1)));

  world.instruction = "Head down the hall, take the passage past the " +
                      describe(b.objects[0]) + ", and stop at the " + describe(b.objects[1]) +
                      ".";

  finalize(world, std::move(b));
  return world;
}

WorldSpec make_maze(std::uint64_t seed) {
  WorldSpec world;
  world.seed = seed;
  world.profile = WorldProfile::kMaze;
  Rng rng(fnv1a64("maze") ^ (seed * 0x9E3779B97F4A7C15ull + 1));

  const int cols = 3 + static_cast<int>(seed % 2);
  const int rows = 3 + static_cast<int>((seed >> 1) % 2);
  WorldBuilder b;
  auto id_at = [&](int r, int c) { return "m" + pad2(r * cols + c); };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      b.add_waypoint(id_at(r, c), c * kSpacing + rng.next_real(-0.15, 0.15),
                     r * kSpacing + rng.next_real(-0.15, 0.15));
    }
  }

  // Randomized DFS spanning tree over the grid, then a few extra edges.
  std::set<int> visited;
  std::vector<int> stack{0};
  visited.insert(0);
  while (!stack.empty()) {
    const int cell = stack.back();
    const int r = cell / cols;
    const int c = cell % cols;
    std::vector<int> unvisited;
    const int dr[4] = {-1, 1, 0, 0};
    const int dc[4] = {0, 0, -1, 1};
    for (int k = 0; k < 4; ++k) {
      const int nr = r + dr[k];
      const int nc = c + dc[k];
      if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
      const int ncell = nr * cols + nc;
      if (!visited.count(ncell)) unvisited.push_back(ncell);
    }
    if (unvisited.empty()) {
      stack.pop_back();
      continue;
    }
    const int next = unvisited[rng.next_below(unvisited.size())];
    b.add_edge(id_at(r, c), id_at(next / cols, next % cols));
    visited.insert(next);
    stack.push_back(next);
  }
  const int extra_edges = rng.next_int(1, 3);
  std::set<std::pair<std::string, std::string>> have;
  for (const auto& [a, bb] : b.edges) have.emplace(std::min(a, bb), std::max(a, bb));
  int attempts = 0;
  int added = 0;
  while (added < extra_edges && attempts++ < 40) {
    const int r = rng.next_int(0, rows - 1);
    const int c = rng.next_int(0, cols - 1);
    const int k = static_cast<int>(rng.next_below(4));
    const int dr[4] = {-1, 1, 0, 0};
    const int dc[4] = {0, 0, -1, 1};
    const int nr = r + dr[k];
    const int nc = c + dc[k];
    if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
    auto key = std::make_pair(std::min(id_at(r, c), id_at(nr, nc)),
                              std::max(id_at(r, c), id_at(nr, nc)));
    if (have.count(key)) continue;
    have.insert(key);
    b.add_edge(key.first, key.second);
    ++added;
  }

  world.start_id = "m00";
  NavGraph probe(b.waypoints, b.edges);
  double best = -1.0;
  for (const auto& id : probe.ids()) {
    const auto d = geodesic_distance(probe, "m00", id);
    if (d && *d > best) {
      best = *d;
      world.goal_id = id;
    }
  }

  std::set<std::string> used_categories;
  const auto cats = pick_categories(rng, kLandmarkCategories, 3, used_categories);
  std::vector<std::string> clause;
  for (int i = 0; i < 2; ++i) {
    const std::string wp = "m" + pad2(rng.next_int(0, rows * cols - 1));
    const std::string id = b.add_object(rng, cats[i], wp, b.adjacent(wp));
    world.landmark_object_ids.push_back(id);
    clause.push_back("the " + describe(b.objects.back()));
  }
  const std::string goal_obj =
      b.add_object(rng, cats[2], world.goal_id, b.adjacent(world.goal_id));
  world.landmark_object_ids.push_back(goal_obj);
  world.instruction = "Find your way past " + clause[0] + " and " + clause[1] +
                      ", and stop at the " + describe(b.objects.back()) + ".";

  finalize(world, std::move(b));
  return world;
}

WorldSpec make_r2r_like(std::uint64_t seed) {
  WorldSpec world;
  world.seed = seed;
  world.profile = WorldProfile::kR2rLike;
  Rng rng(fnv1a64("r2r-like") ^ (seed * 0x9E3779B97F4A7C15ull + 1));

  const int backbone = 7 + static_cast<int>(seed % 3);
  WorldBuilder b;
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  for (int i = 0; i < backbone; ++i) {
    b.add_waypoint("p" + pad2(i), x, y);
    if (i > 0) b.add_edge("p" + pad2(i - 1), "p" + pad2(i));
    heading += rng.next_real(-0.5, 0.5);
    const double step = kSpacing + 0.3 * rng.next_unit();
    x += step * std::cos(heading);
    y += step * std::sin(heading);
  }
  const int spurs = rng.next_int(1, 2);
  for (int i = 0; i < spurs; ++i) {
    const int at = rng.next_int(1, backbone - 2);
    const auto base = b.find("p" + pad2(at)).position;
    const double ang = rng.next_real(0.0, 2.0 * kPi);
    b.add_waypoint("q" + pad2(i), base.x() + kSpacing * std::cos(ang),
                   base.y() + kSpacing * std::sin(ang));
    b.add_edge("p" + pad2(at), "q" + pad2(i));
  }

  world.start_id = "p00";
  world.goal_id = "p" + pad2(backbone - 1);

  std::set<std::string> used_categories;
  const auto cats = pick_categories(rng, kLandmarkCategories, 3, used_categories);
  std::vector<std::string> clause;
  for (int i = 0; i < 2; ++i) {
    const std::string wp = "p" + pad2(rng.next_int(1, backbone - 2));
    world.landmark_object_ids.push_back(b.add_object(rng, cats[i], wp, b.adjacent(wp)));
    clause.push_back("the " + describe(b.objects.back()));
  }
  world.landmark_object_ids.push_back(
      b.add_object(rng, cats[2], world.goal_id, b.adjacent(world.goal_id)));
  world.instruction = "Go past " + clause[0] + ", continue until you reach " + clause[1] +
                      ", and wait near the " + describe(b.objects.back()) + ".";

  finalize(world, std::move(b));
  return world;
}

WorldSpec make_landmark_gated(std::uint64_t seed) {
  WorldSpec world;
  world.seed = seed;
  world.profile = WorldProfile::kLandmarkGated;
  Rng rng(fnv1a64("landmark-gated") ^ (seed * 0x9E3779B97F4A7C15ull + 1));

  WorldBuilder b;
  const double jitter = 0.12;
  auto jx = [&] { return rng.next_real(-jitter, jitter); };
  b.add_waypoint("s00", 0.0, jx());
  b.add_waypoint("s01", kSpacing, jx());
  b.add_waypoint("f00", 2 * kSpacing, jx());
  b.add_waypoint("a00", 3 * kSpacing, jx());
  b.add_waypoint("g00", 4 * kSpacing, jx());
  const int detour = 3 + static_cast<int>(seed % 2);
  for (int i = 0; i < detour; ++i) {
    b.add_waypoint("b" + pad2(i), (2 + i) * kSpacing + jx(), kSpacing + jx());
  }
  b.add_edge("s00", "s01");
  b.add_edge("s01", "f00");
  b.add_edge("f00", "a00");
  b.add_edge("a00", "g00");
  b.add_edge("f00", "b00");
  for (int i = 0; i + 1 < detour; ++i) {
    b.add_edge("b" + pad2(i), "b" + pad2(i + 1));
  }
  b.add_edge("b" + pad2(detour - 1), "g00");

  world.start_id = "s00";
  world.goal_id = "g00";

  // The fork choice is only readable after inspecting the door up close;
  // without that answer the wide detour looks like the main route.
  world.landmark_gated = true;
  world.gate_nouns = {"door"};
  world.misleading_values["a00"] = 0.15;
  world.misleading_values["b00"] = 0.85;

  const std::string door =
      b.add_object(rng, "door", "f00", {"s01", "a00"}, /*with_state=*/true);
  std::set<std::string> used_categories{"door"};
  const auto goal_cat = pick_categories(rng, kLandmarkCategories, 1, used_categories).front();
  const std::string goal_obj =
      b.add_object(rng, goal_cat, "g00", {"a00", "b" + pad2(detour - 1)});
  world.landmark_object_ids = {door, goal_obj};
  b.add_object(rng, "bench", "b00", b.adjacent("b00"));

  world.instruction = "Enter through the " + describe(b.objects[0]) + " and stop at the " +
                      describe(b.objects[1]) + ".";

  finalize(world, std::move(b));
  return world;
}

}  // namespace

std::string profile_name(WorldProfile profile) {
  switch (profile) {
    case WorldProfile::kCorridor: return "corridor";
    case WorldProfile::kTrap: return "trap";
    case WorldProfile::kMaze: return "maze";
    case WorldProfile::kR2rLike: return "r2r-like";
    case WorldProfile::kLandmarkGated: return "landmark-gated";
  }
  throw ValidationError("unknown profile");
}

WorldProfile parse_profile(const std::string& name) {
  if (name == "corridor") return WorldProfile::kCorridor;
  if (name == "trap") return WorldProfile::kTrap;
  if (name == "maze") return WorldProfile::kMaze;
  if (name == "r2r-like" || name == "r2r_like") return WorldProfile::kR2rLike;
  if (name == "landmark-gated" || name == "landmark_gated") return WorldProfile::kLandmarkGated;
  throw ValidationError("unknown world profile '" + name + "'");
}

WorldSpec generate_world(std::uint64_t seed, WorldProfile profile) {
  switch (profile) {
    case WorldProfile::kCorridor: return make_corridor(seed);
    case WorldProfile::kTrap: return make_trap(seed);
    case WorldProfile::kMaze: return make_maze(seed);
    case WorldProfile::kR2rLike: return make_r2r_like(seed);
    case WorldProfile::kLandmarkGated: return make_landmark_gated(seed);
  }
  throw ValidationError("unknown profile");
}

Episode episode_from_world(const WorldSpec& world) {
  Episode episode;
  episode.graph = world.graph;
  episode.start_id = world.start_id;
  episode.goal_id = world.goal_id;
  episode.instruction = world.instruction;
  episode.success_radius = world.success_radius;
  episode.max_steps = world.max_steps;
  validate_episode(episode);
  return episode;
}

std::vector<std::string> landmark_nouns(const WorldSpec& world) {
  std::vector<std::string> nouns;
  for (const auto& id : world.landmark_object_ids) {
    for (const auto& obj : world.objects) {
      if (obj.id == id) {
        nouns.push_back(obj.category);
        break;
      }
    }
  }
  return nouns;
}

std::vector<std::size_t> visible_objects(const WorldSpec& world, const std::string& at) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < world.objects.size(); ++i) {
    const auto& vis = world.objects[i].visible_from;
    if (std::binary_search(vis.begin(), vis.end(), at)) {
      out.push_back(i);
    }
  }
  return out;
}

ScanResult oracle_scan(const WorldSpec& world, const std::string& at, int num_views,
                       double panorama_width, double panorama_height) {
  const auto& wp = world.graph.waypoint(at);
  const double W = panorama_width;
  const double H = panorama_height;

  ScanResult result;
  for (const std::size_t index : visible_objects(world, at)) {
    const auto& obj = world.objects[index];
    const Eigen::Vector3d rel = obj.position - wp.position;
    const double depth = rel.norm();
    const double bearing = std::atan2(rel.y(), rel.x());

    // Invert the heading formula: the box center lands where
    // heading_angle recovers the bearing exactly.
    const double center = W * (bearing + kPi) / (2.0 * kPi);
    double width = std::clamp(W * 0.05 * (2.5 / std::max(depth, 1.0)), 12.0, W * 0.10);
    double x1 = center - width / 2.0;
    double x2 = center + width / 2.0;
    if (x1 < 0.0) {
      // Shrink against the seam, preserving the center (and the bearing).
      x1 = 0.0;
      x2 = 2.0 * center;
    }

    const double elevation = std::clamp(rel.z() / std::max(depth, 1e-9), -1.0, 1.0);
    const double height = std::min(width * 0.8, H * 0.45);
    double yc = H / 2.0 - elevation * (H / 4.0);
    double y1 = std::clamp(yc - height / 2.0, 0.0, H);
    double y2 = std::clamp(yc + height / 2.0, 0.0, H);

    Detection det;
    det.bbox = PixelRect{x1, y1, x2, y2};
    det.category = obj.category;
    det.view_index = std::clamp(
        static_cast<int>((bearing + kPi) / (2.0 * kPi) * num_views), 0, num_views - 1);
    result.depths[result.detections.size()] = depth;
    result.detections.push_back(std::move(det));
  }
  return result;
}

}  // namespace vln
