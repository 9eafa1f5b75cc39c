#include "vln/metrics.hpp"

#include <algorithm>

#include "vln/errors.hpp"

namespace vln {

MetricsReport compute_metrics(const std::vector<EpisodeTrace>& traces,
                              const std::vector<Episode>& episodes) {
  if (traces.size() != episodes.size()) {
    throw ValidationError("metrics require one trace per episode (" +
                          std::to_string(traces.size()) + " traces, " +
                          std::to_string(episodes.size()) + " episodes)");
  }

  MetricsReport report;
  double ne_sum = 0.0;
  double sr_sum = 0.0;
  double osr_sum = 0.0;
  double spl_sum = 0.0;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const Episode& episode = episodes[i];
    const EpisodeSummary& summary = traces[i].summary;

    EpisodeMetrics m;
    const auto final_d =
        geodesic_distance(episode.graph, summary.final_waypoint, episode.goal_id);
    if (!final_d) {
      throw ValidationError("final waypoint '" + summary.final_waypoint +
                            "' is disconnected from the goal");
    }
    m.ne = *final_d;
    m.success = m.ne <= episode.success_radius;

    for (const auto& visited : summary.travelled) {
      const auto d = geodesic_distance(episode.graph, visited, episode.goal_id);
      if (d && *d <= episode.success_radius) {
        m.oracle_success = true;
        break;
      }
    }

    if (m.success) {
      const double l_star =
          geodesic_distance(episode.graph, episode.start_id, episode.goal_id).value_or(0.0);
      m.spl = (l_star > 0.0) ? l_star / std::max(summary.path_length, l_star) : 1.0;
    }

    ne_sum += m.ne;
    sr_sum += m.success ? 1.0 : 0.0;
    osr_sum += m.oracle_success ? 1.0 : 0.0;
    spl_sum += m.spl;
    report.episodes.push_back(m);
  }

  const double n = static_cast<double>(std::max<std::size_t>(traces.size(), 1));
  report.ne_mean = ne_sum / n;
  report.sr_percent = 100.0 * sr_sum / n;
  report.osr_percent = 100.0 * osr_sum / n;
  report.spl_percent = 100.0 * spl_sum / n;
  return report;
}

}  // namespace vln
