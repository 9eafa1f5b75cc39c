#pragma once

#include <string>
#include <vector>

#include "vln/episode_runner.hpp"
#include "vln/metrics.hpp"
#include "vln/nav_graph.hpp"
#include "vln/world.hpp"

namespace vln {

// Episode/world JSON schema:
//   {waypoints:[{id,pos:[x,y,z]}], edges:[[id,id]], start, goal,
//    instruction, success_radius?, max_steps?}
// World files add an `objects` array plus generator annotations. All
// serialization uses ordered keys and is byte-stable for identical inputs.

[[nodiscard]] std::string episode_to_json(const Episode& episode);
[[nodiscard]] Episode episode_from_json(const std::string& text);  // throws ValidationError

[[nodiscard]] std::string world_to_json(const WorldSpec& world);
[[nodiscard]] WorldSpec world_from_json(const std::string& text);  // throws ValidationError

// Loads either schema: a file with an `objects` key parses as a world, a
// bare episode becomes an object-free world (the scan oracle then sees an
// empty scene).
[[nodiscard]] WorldSpec load_world_file(const std::string& path);

// R2R-style adapter: maps {scan, path, heading, instructions} onto the
// episode schema; waypoint positions and connectivity come from a sidecar
// graph JSON ({waypoints, edges}).
[[nodiscard]] Episode episode_from_r2r(const std::string& r2r_record_json,
                                       const std::string& connectivity_json);

// Trace JSONL: one step record per line plus a terminal summary record.
[[nodiscard]] std::string trace_to_jsonl(const EpisodeTrace& trace);
[[nodiscard]] EpisodeTrace trace_from_jsonl(const std::string& text);  // throws ValidationError

[[nodiscard]] std::string metrics_to_json(const MetricsReport& report);

[[nodiscard]] std::string read_text_file(const std::string& path);   // throws ValidationError
void write_text_file(const std::string& path, const std::string& content);

}  // namespace vln
