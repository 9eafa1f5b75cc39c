#pragma once

#include <vector>

#include "vln/episode_runner.hpp"
#include "vln/nav_graph.hpp"

namespace vln {

struct EpisodeMetrics {
  double ne = 0.0;  // geodesic distance from final position to goal, meters
  bool success = false;
  bool oracle_success = false;
  double spl = 0.0;
};

struct MetricsReport {
  std::vector<EpisodeMetrics> episodes;
  double ne_mean = 0.0;
  double sr_percent = 0.0;
  double osr_percent = 0.0;
  double spl_percent = 0.0;
};

// Standard VLN metrics over aligned (trace, episode) pairs:
//   success        final geodesic distance to goal <= success_radius
//   oracle success any travelled waypoint within success_radius
//   spl            success * l_star / max(path_length, l_star)
// Aggregates are arithmetic means, rates scaled to percent. Throws
// ValidationError when the lists are misaligned.
[[nodiscard]] MetricsReport compute_metrics(const std::vector<EpisodeTrace>& traces,
                                            const std::vector<Episode>& episodes);

}  // namespace vln
