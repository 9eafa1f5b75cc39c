#include "vln/oracle_agents.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "vln/errors.hpp"

namespace vln {

namespace {

std::string to_lower(std::string text) {
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return text;
}

bool contains_noun(const std::string& text, const std::string& noun) {
  return to_lower(text).find(to_lower(noun)) != std::string::npos;
}

bool answers_cover(const std::vector<std::string>& answers, const std::string& noun) {
  return std::any_of(answers.begin(), answers.end(),
                     [&](const std::string& a) { return contains_noun(a, noun); });
}

bool history_covers(const QueryHistory& history, const std::string& noun) {
  return std::any_of(history.begin(), history.end(), [&](const QueryRecord& record) {
    return contains_noun(record.answer, noun);
  });
}

PixelRect whole_panorama(double width, double height) { return PixelRect{0.0, 0.0, width, height}; }

PixelRect inflate_and_clamp(const PixelRect& box, double factor, double width, double height) {
  const double cx = box.center_x();
  const double cy = box.center_y();
  const double hw = 0.5 * box.width() * factor;
  const double hh = 0.5 * box.height() * factor;
  PixelRect out{cx - hw, cy - hh, cx + hw, cy + hh};
  out.x1 = std::clamp(out.x1, 0.0, width);
  out.x2 = std::clamp(out.x2, 0.0, width);
  out.y1 = std::clamp(out.y1, 0.0, height);
  out.y2 = std::clamp(out.y2, 0.0, height);
  return out;
}

double intersection_area(const PixelRect& a, const PixelRect& b) {
  const double ix = std::max(0.0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
  const double iy = std::max(0.0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
  return ix * iy;
}

}  // namespace

OracleScanBackend::OracleScanBackend(std::shared_ptr<const WorldSpec> world,
                                     PanoramaConfig panorama)
    : world_(std::move(world)), panorama_(panorama) {}

ScanResult OracleScanBackend::scan(const Observation& observation) {
  return oracle_scan(*world_, observation.waypoint_id, panorama_.num_views, panorama_.width,
                     panorama_.height);
}

OracleOrchestrationAgent::OracleOrchestrationAgent(std::shared_ptr<const WorldSpec> world)
    : world_(std::move(world)) {}

VisualQuery OracleOrchestrationAgent::generate_query(const std::string& map_text,
                                                     const std::string& /*trajectory*/,
                                                     const std::string& /*instruction*/,
                                                     const QueryHistory& history,
                                                     double panorama_width,
                                                     double panorama_height) {
  const auto nouns = landmark_nouns(*world_);
  const std::string* target = nullptr;
  for (const auto& noun : nouns) {
    if (!history_covers(history, noun)) {
      target = &noun;
      break;
    }
  }

  VisualQuery query;
  if (target == nullptr) {
    // Everything covered; keep questions unique so the loop's dedup
    // contract holds if it asks anyway.
    query.question =
        "Is there anything else notable nearby? (query " + std::to_string(history.size() + 1) +
        ")";
    query.focus_region = whole_panorama(panorama_width, panorama_height);
    return query;
  }

  int prior_attempts = 0;
  for (const auto& record : history) {
    if (contains_noun(record.query.question, *target)) {
      ++prior_attempts;
    }
  }
  query.question = "What does the " + *target + " look like?";
  if (prior_attempts > 0) {
    query.question += " (attempt " + std::to_string(prior_attempts + 1) + ")";
  }

  query.focus_region = whole_panorama(panorama_width, panorama_height);
  if (const auto lines = parse_map_text(map_text)) {
    for (const auto& line : *lines) {
      if (line.category == *target) {
        query.focus_region =
            inflate_and_clamp(line.bbox, 1.2, panorama_width, panorama_height);
        break;
      }
    }
  }
  return query;
}

Sufficiency OracleOrchestrationAgent::check_sufficiency(const std::string& /*map_text*/,
                                                        const QueryHistory& history,
                                                        const std::string& /*instruction*/) {
  for (const auto& noun : landmark_nouns(*world_)) {
    if (!history_covers(history, noun)) {
      return Sufficiency::kInsufficient;
    }
  }
  return Sufficiency::kSufficient;
}

SemanticValueMap OracleOrchestrationAgent::evaluate_values(
    const std::string& /*instruction*/, const std::string& /*trajectory*/,
    const std::vector<std::string>& answers, const std::vector<std::string>& candidates) {
  bool gate_open = true;
  if (world_->landmark_gated) {
    for (const auto& noun : world_->gate_nouns) {
      if (!answers_cover(answers, noun)) {
        gate_open = false;
        break;
      }
    }
  }

  SemanticValueMap values;
  for (const auto& candidate : candidates) {
    double v = 0.5;
    if (world_->diameter > 0.0) {
      const auto d = geodesic_distance(world_->graph, candidate, world_->goal_id);
      v = d ? std::clamp(1.0 - *d / world_->diameter, 0.0, 1.0) : 0.0;
    } else if (candidate == world_->goal_id) {
      v = 1.0;
    }
    if (auto it = world_->value_overrides.find(candidate); it != world_->value_overrides.end()) {
      if (it->second.fixed) {
        v = *it->second.fixed;
      }
      if (it->second.scale) {
        v *= *it->second.scale;
      }
    }
    if (!gate_open) {
      if (auto it = world_->misleading_values.find(candidate);
          it != world_->misleading_values.end()) {
        v = it->second;
      }
    }
    values[candidate] = std::clamp(v, 0.0, 1.0);
  }
  return values;
}

OraclePerceptionAgent::OraclePerceptionAgent(std::shared_ptr<const WorldSpec> world,
                                             PanoramaConfig panorama)
    : world_(std::move(world)), panorama_(panorama) {}

std::string OraclePerceptionAgent::answer_query(const Observation& observation,
                                                const VisualQuery& query) {
  const ScanResult scan = oracle_scan(*world_, observation.waypoint_id, panorama_.num_views,
                                      panorama_.width, panorama_.height);
  const auto object_indices = visible_objects(*world_, observation.waypoint_id);

  std::size_t best = scan.detections.size();
  double best_area = 0.0;
  for (std::size_t i = 0; i < scan.detections.size(); ++i) {
    const double area = intersection_area(scan.detections[i].bbox, query.focus_region);
    if (area <= 0.0) {
      continue;
    }
    const bool better =
        best == scan.detections.size() || area > best_area ||
        (area == best_area && scan.depths.at(i) < scan.depths.at(best));
    if (better) {
      best = i;
      best_area = area;
    }
  }
  if (best == scan.detections.size()) {
    return "no relevant objects in region";
  }

  const SceneObject& obj = world_->objects[object_indices[best]];
  std::string answer = "a " + obj.attributes.at("color");
  if (auto it = obj.attributes.find("material"); it != obj.attributes.end()) {
    answer += " " + it->second;
  }
  answer += " " + obj.category;
  if (auto it = obj.attributes.find("state"); it != obj.attributes.end()) {
    answer += ", " + it->second;
  }

  // Spatial relation against the heading-nearest other visible object.
  const double own_heading = heading_angle(scan.detections[best].bbox, panorama_.width);
  std::size_t nearest = scan.detections.size();
  double nearest_gap = 0.0;
  for (std::size_t i = 0; i < scan.detections.size(); ++i) {
    if (i == best) {
      continue;
    }
    const double gap = std::abs(heading_angle(scan.detections[i].bbox, panorama_.width) -
                                own_heading);
    if (nearest == scan.detections.size() || gap < nearest_gap) {
      nearest = i;
      nearest_gap = gap;
    }
  }
  if (nearest != scan.detections.size()) {
    const double other_heading = heading_angle(scan.detections[nearest].bbox, panorama_.width);
    const std::string& other = world_->objects[object_indices[nearest]].category;
    if (own_heading < other_heading) {
      answer += ", to the left of a " + other;
    } else if (own_heading > other_heading) {
      answer += ", to the right of a " + other;
    } else {
      answer += ", beside a " + other;
    }
  }
  return answer;
}

OracleDecisionAgent::OracleDecisionAgent(std::shared_ptr<const WorldSpec> world)
    : world_(std::move(world)) {}

Decision OracleDecisionAgent::decide(const DecisionRequest& request) {
  const auto d = geodesic_distance(world_->graph, request.current_id, world_->goal_id);
  if (d && *d <= world_->success_radius) {
    return Decision{true, {}};
  }
  if (request.candidates.empty()) {
    return Decision{true, {}};
  }
  return Decision{false, request.candidates.front().waypoint_id};
}

AgentBackends make_oracle_backends(std::shared_ptr<const WorldSpec> world,
                                   PanoramaConfig panorama) {
  AgentBackends backends;
  backends.scan = std::make_shared<OracleScanBackend>(world, panorama);
  backends.orchestration = std::make_shared<OracleOrchestrationAgent>(world);
  backends.perception = std::make_shared<OraclePerceptionAgent>(world, panorama);
  backends.decision = std::make_shared<OracleDecisionAgent>(world);
  return backends;
}

}  // namespace vln
