#include "vln/json_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "vln/errors.hpp"

namespace vln {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json parse_or_throw(const std::string& text, const std::string& what) {
  ordered_json parsed = ordered_json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) {
    throw ValidationError("malformed JSON in " + what);
  }
  return parsed;
}

ordered_json graph_to_json(const NavGraph& graph) {
  ordered_json out;
  out["waypoints"] = ordered_json::array();
  for (const auto& id : graph.ids()) {
    const auto& wp = graph.waypoint(id);
    out["waypoints"].push_back(ordered_json{
        {"id", id}, {"pos", {wp.position.x(), wp.position.y(), wp.position.z()}}});
  }
  out["edges"] = ordered_json::array();
  for (const auto& [a, b] : graph.edges()) {
    out["edges"].push_back(ordered_json::array({a, b}));
  }
  return out;
}

NavGraph graph_from_json(const ordered_json& doc, const std::string& what) {
  if (!doc.contains("waypoints") || !doc["waypoints"].is_array()) {
    throw ValidationError(what + " is missing a waypoints array");
  }
  std::vector<Waypoint> waypoints;
  for (const auto& w : doc["waypoints"]) {
    if (!w.contains("id") || !w.contains("pos") || !w["pos"].is_array() || w["pos"].size() != 3) {
      throw ValidationError(what + " has a malformed waypoint entry");
    }
    waypoints.push_back(Waypoint{
        w["id"].get<std::string>(),
        Eigen::Vector3d(w["pos"][0].get<double>(), w["pos"][1].get<double>(),
                        w["pos"][2].get<double>())});
  }
  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& e : doc.value("edges", ordered_json::array())) {
    if (!e.is_array() || e.size() != 2) {
      throw ValidationError(what + " has a malformed edge entry");
    }
    edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
  }
  return NavGraph(std::move(waypoints), std::move(edges));
}

ordered_json scored_to_json(const ScoredCandidate& sc) {
  return ordered_json{{"id", sc.waypoint_id},
                      {"v_path", sc.path_value},
                      {"dist", sc.distance},
                      {"score", sc.score}};
}

ScoredCandidate scored_from_json(const ordered_json& j) {
  ScoredCandidate sc;
  sc.waypoint_id = j.value("id", "");
  sc.path_value = j.value("v_path", 0.0);
  sc.distance = j.value("dist", 0.0);
  sc.score = j.value("score", 0.0);
  return sc;
}

ordered_json context_to_json(const MultimodalContext& context) {
  ordered_json j;
  j["timestep"] = context.timestep;
  j["instruction"] = context.instruction;
  j["trajectory"] = context.trajectory_caption;
  j["map_text"] = context.semantic_map_text;
  j["answers"] = context.answers;
  j["waypoint"] = context.waypoint_id;
  j["values"] = ordered_json::object();
  for (const auto& [id, v] : context.semantic_values) {
    j["values"][id] = v;
  }
  j["nearest"] = context.nearest_objects;
  return j;
}

MultimodalContext context_from_json(const ordered_json& j) {
  MultimodalContext context;
  context.timestep = j.value("timestep", 0);
  context.instruction = j.value("instruction", "");
  context.trajectory_caption = j.value("trajectory", "");
  context.semantic_map_text = j.value("map_text", "");
  context.answers = j.value("answers", std::vector<std::string>{});
  context.waypoint_id = j.value("waypoint", "");
  if (j.contains("values")) {
    for (auto it = j["values"].begin(); it != j["values"].end(); ++it) {
      context.semantic_values[it.key()] = it.value().get<double>();
    }
  }
  context.nearest_objects = j.value("nearest", std::vector<std::string>{});
  return context;
}

}  // namespace

std::string episode_to_json(const Episode& episode) {
  ordered_json out = graph_to_json(episode.graph);
  out["start"] = episode.start_id;
  out["goal"] = episode.goal_id;
  out["instruction"] = episode.instruction;
  out["success_radius"] = episode.success_radius;
  out["max_steps"] = episode.max_steps;
  return out.dump(2) + "\n";
}

Episode episode_from_json(const std::string& text) {
  const ordered_json doc = parse_or_throw(text, "episode");
  Episode episode;
  episode.graph = graph_from_json(doc, "episode");
  episode.start_id = doc.value("start", "");
  episode.goal_id = doc.value("goal", "");
  episode.instruction = doc.value("instruction", "");
  episode.success_radius = doc.value("success_radius", 3.0);
  episode.max_steps = doc.value("max_steps", 20);
  validate_episode(episode);
  return episode;
}

std::string world_to_json(const WorldSpec& world) {
  ordered_json out = graph_to_json(world.graph);
  out["start"] = world.start_id;
  out["goal"] = world.goal_id;
  out["instruction"] = world.instruction;
  out["success_radius"] = world.success_radius;
  out["max_steps"] = world.max_steps;
  out["objects"] = ordered_json::array();
  for (const auto& obj : world.objects) {
    ordered_json o;
    o["id"] = obj.id;
    o["category"] = obj.category;
    o["attributes"] = ordered_json::object();
    for (const auto& [k, v] : obj.attributes) {
      o["attributes"][k] = v;
    }
    o["pos"] = {obj.position.x(), obj.position.y(), obj.position.z()};
    o["visible_from"] = obj.visible_from;
    out["objects"].push_back(std::move(o));
  }
  out["landmarks"] = world.landmark_object_ids;
  if (!world.value_overrides.empty()) {
    out["value_overrides"] = ordered_json::object();
    for (const auto& [id, ov] : world.value_overrides) {
      ordered_json o = ordered_json::object();
      if (ov.fixed) {
        o["fixed"] = *ov.fixed;
      }
      if (ov.scale) {
        o["scale"] = *ov.scale;
      }
      out["value_overrides"][id] = std::move(o);
    }
  }
  if (world.landmark_gated) {
    out["landmark_gated"] = true;
    out["gate_nouns"] = world.gate_nouns;
    out["misleading_values"] = ordered_json::object();
    for (const auto& [id, v] : world.misleading_values) {
      out["misleading_values"][id] = v;
    }
  }
  out["seed"] = world.seed;
  out["profile"] = profile_name(world.profile);
  return out.dump(2) + "\n";
}

WorldSpec world_from_json(const std::string& text) {
  const ordered_json doc = parse_or_throw(text, "world");
  WorldSpec world;
  world.graph = graph_from_json(doc, "world");
  world.start_id = doc.value("start", "");
  world.goal_id = doc.value("goal", "");
  world.instruction = doc.value("instruction", "");
  world.success_radius = doc.value("success_radius", 3.0);
  world.max_steps = doc.value("max_steps", 20);
  for (const auto& o : doc.value("objects", ordered_json::array())) {
    SceneObject obj;
    obj.id = o.value("id", "");
    obj.category = o.value("category", "");
    if (o.contains("attributes")) {
      for (auto it = o["attributes"].begin(); it != o["attributes"].end(); ++it) {
        obj.attributes[it.key()] = it.value().get<std::string>();
      }
    }
    if (o.contains("pos") && o["pos"].is_array() && o["pos"].size() == 3) {
      obj.position = Eigen::Vector3d(o["pos"][0].get<double>(), o["pos"][1].get<double>(),
                                     o["pos"][2].get<double>());
    }
    obj.visible_from = o.value("visible_from", std::vector<std::string>{});
    world.objects.push_back(std::move(obj));
  }
  world.landmark_object_ids = doc.value("landmarks", std::vector<std::string>{});
  if (doc.contains("value_overrides")) {
    for (auto it = doc["value_overrides"].begin(); it != doc["value_overrides"].end(); ++it) {
      ValueOverride ov;
      if (it.value().contains("fixed")) {
        ov.fixed = it.value()["fixed"].get<double>();
      }
      if (it.value().contains("scale")) {
        ov.scale = it.value()["scale"].get<double>();
      }
      world.value_overrides[it.key()] = ov;
    }
  }
  world.landmark_gated = doc.value("landmark_gated", false);
  world.gate_nouns = doc.value("gate_nouns", std::vector<std::string>{});
  if (doc.contains("misleading_values")) {
    for (auto it = doc["misleading_values"].begin(); it != doc["misleading_values"].end(); ++it) {
      world.misleading_values[it.key()] = it.value().get<double>();
    }
  }
  world.seed = doc.value("seed", 0ull);
  if (doc.contains("profile")) {
    world.profile = parse_profile(doc["profile"].get<std::string>());
  }
  world.diameter = graph_diameter(world.graph);
  validate_episode(episode_from_world(world));
  return world;
}

WorldSpec load_world_file(const std::string& path) {
  const std::string text = read_text_file(path);
  const ordered_json doc = parse_or_throw(text, path);
  if (doc.contains("objects")) {
    return world_from_json(text);
  }
  const Episode episode = episode_from_json(text);
  WorldSpec world;
  world.graph = episode.graph;
  world.start_id = episode.start_id;
  world.goal_id = episode.goal_id;
  world.instruction = episode.instruction;
  world.success_radius = episode.success_radius;
  world.max_steps = episode.max_steps;
  world.diameter = graph_diameter(world.graph);
  return world;
}

Episode episode_from_r2r(const std::string& r2r_record_json,
                         const std::string& connectivity_json) {
  const ordered_json record = parse_or_throw(r2r_record_json, "R2R record");
  const ordered_json connectivity = parse_or_throw(connectivity_json, "connectivity sidecar");

  Episode episode;
  episode.graph = graph_from_json(connectivity, "connectivity sidecar");
  if (!record.contains("path") || !record["path"].is_array() || record["path"].empty()) {
    throw ValidationError("R2R record has no path");
  }
  episode.start_id = record["path"].front().get<std::string>();
  episode.goal_id = record["path"].back().get<std::string>();
  if (record.contains("instructions") && record["instructions"].is_array() &&
      !record["instructions"].empty()) {
    episode.instruction = record["instructions"].front().get<std::string>();
  }
  episode.success_radius = record.value("success_radius", 3.0);
  episode.max_steps = record.value("max_steps", 20);
  validate_episode(episode);
  return episode;
}

std::string trace_to_jsonl(const EpisodeTrace& trace) {
  std::ostringstream out;
  for (const auto& step : trace.steps) {
    ordered_json j;
    j["type"] = "step";
    j["t"] = step.timestep;
    j["waypoint"] = step.waypoint_id;
    j["map_text"] = step.semantic_map_text;
    j["queries"] = ordered_json::array();
    for (const auto& record : step.queries) {
      j["queries"].push_back(
          ordered_json{{"question", record.query.question},
                       {"region",
                        {record.query.focus_region.x1, record.query.focus_region.y1,
                         record.query.focus_region.x2, record.query.focus_region.y2}},
                       {"answer", record.answer}});
    }
    j["verdicts"] = ordered_json::array();
    for (const auto verdict : step.verdicts) {
      j["verdicts"].push_back(verdict == Sufficiency::kSufficient ? "sufficient"
                                                                  : "insufficient");
    }
    j["values"] = ordered_json::object();
    for (const auto& [id, v] : step.semantic_values) {
      j["values"][id] = v;
    }
    j["tree"] = ordered_json::object();
    j["tree"]["nodes"] = ordered_json::array();
    for (const auto& node : step.tree_snapshot) {
      ordered_json n;
      n["id"] = node.waypoint_id;
      n["parent"] = node.parent ? ordered_json(*node.parent) : ordered_json(nullptr);
      n["q"] = node.q_value;
      n["n"] = node.visit_count;
      j["tree"]["nodes"].push_back(std::move(n));
    }
    if (step.has_top_k) {
      j["topk"] = ordered_json::array();
      for (const auto& sc : step.top_k) {
        j["topk"].push_back(scored_to_json(sc));
      }
    }
    j["decision"] = ordered_json::object();
    j["decision"]["action"] = step.decision.stop ? "stop" : "move";
    if (!step.decision.stop) {
      j["decision"]["target"] = step.decision.target;
    }
    j["decision"]["candidates"] = ordered_json::array();
    for (const auto& sc : step.decision_candidates) {
      j["decision"]["candidates"].push_back(scored_to_json(sc));
    }
    j["traversed"] = step.traversed;
    j["path_length"] = step.cumulative_path_length;
    j["context"] = context_to_json(step.context);
    if (!step.warnings.empty()) {
      j["warnings"] = step.warnings;
    }
    if (!step.llm_calls.empty()) {
      j["llm_calls"] = ordered_json::array();
      for (const auto& call : step.llm_calls) {
        j["llm_calls"].push_back(ordered_json{{"role", call.role},
                                              {"request_digest", call.request_digest},
                                              {"response_digest", call.response_digest},
                                              {"status", call.http_status},
                                              {"attempts", call.attempts},
                                              {"total_tokens", call.total_tokens}});
      }
    }
    out << j.dump() << "\n";
  }

  ordered_json s;
  s["type"] = "summary";
  s["final"] = trace.summary.final_waypoint;
  s["steps"] = trace.summary.steps;
  s["path_length"] = trace.summary.path_length;
  s["termination"] = trace.summary.termination;
  s["travelled"] = trace.summary.travelled;
  s["decisions"] = trace.summary.decision_waypoints;
  out << s.dump() << "\n";
  return out.str();
}

EpisodeTrace trace_from_jsonl(const std::string& text) {
  EpisodeTrace trace;
  std::istringstream in(text);
  std::string line;
  bool saw_summary = false;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    const ordered_json j = parse_or_throw(line, "trace line");
    const std::string type = j.value("type", "");
    if (type == "step") {
      StepRecord step;
      step.timestep = j.value("t", 0);
      step.waypoint_id = j.value("waypoint", "");
      step.semantic_map_text = j.value("map_text", "");
      for (const auto& q : j.value("queries", ordered_json::array())) {
        QueryRecord record;
        record.query.question = q.value("question", "");
        const auto& r = q["region"];
        record.query.focus_region = PixelRect{r[0].get<double>(), r[1].get<double>(),
                                              r[2].get<double>(), r[3].get<double>()};
        record.answer = q.value("answer", "");
        step.queries.push_back(std::move(record));
      }
      for (const auto& v : j.value("verdicts", ordered_json::array())) {
        step.verdicts.push_back(v.get<std::string>() == "sufficient"
                                    ? Sufficiency::kSufficient
                                    : Sufficiency::kInsufficient);
      }
      if (j.contains("values")) {
        for (auto it = j["values"].begin(); it != j["values"].end(); ++it) {
          step.semantic_values[it.key()] = it.value().get<double>();
        }
      }
      if (j.contains("tree") && j["tree"].contains("nodes")) {
        for (const auto& n : j["tree"]["nodes"]) {
          TreeNode node;
          node.waypoint_id = n.value("id", "");
          if (!n["parent"].is_null()) {
            node.parent = n["parent"].get<std::string>();
          }
          node.q_value = n.value("q", 0.0);
          node.visit_count = n.value("n", 0);
          step.tree_snapshot.push_back(std::move(node));
        }
      }
      if (j.contains("topk")) {
        step.has_top_k = true;
        for (const auto& sc : j["topk"]) {
          step.top_k.push_back(scored_from_json(sc));
        }
      }
      if (j.contains("decision")) {
        step.decision.stop = j["decision"].value("action", "move") == "stop";
        step.decision.target = j["decision"].value("target", "");
        for (const auto& sc : j["decision"].value("candidates", ordered_json::array())) {
          step.decision_candidates.push_back(scored_from_json(sc));
        }
      }
      step.traversed = j.value("traversed", std::vector<std::string>{});
      step.cumulative_path_length = j.value("path_length", 0.0);
      if (j.contains("context")) {
        step.context = context_from_json(j["context"]);
      }
      step.warnings = j.value("warnings", std::vector<std::string>{});
      trace.steps.push_back(std::move(step));
    } else if (type == "summary") {
      trace.summary.final_waypoint = j.value("final", "");
      trace.summary.steps = j.value("steps", 0);
      trace.summary.path_length = j.value("path_length", 0.0);
      trace.summary.termination = j.value("termination", "");
      trace.summary.travelled = j.value("travelled", std::vector<std::string>{});
      trace.summary.decision_waypoints = j.value("decisions", std::vector<std::string>{});
      saw_summary = true;
    } else {
      throw ValidationError("unknown trace record type '" + type + "'");
    }
  }
  if (!saw_summary) {
    throw ValidationError("trace has no summary record");
  }
  return trace;
}

std::string metrics_to_json(const MetricsReport& report) {
  ordered_json out;
  out["episodes"] = ordered_json::array();
  for (const auto& m : report.episodes) {
    out["episodes"].push_back(ordered_json{{"ne_m", m.ne},
                                           {"success", m.success},
                                           {"oracle_success", m.oracle_success},
                                           {"spl", m.spl}});
  }
  out["NE"] = report.ne_mean;
  out["SR"] = report.sr_percent;
  out["OSR"] = report.osr_percent;
  out["SPL"] = report.spl_percent;
  return out.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot read file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError("cannot write file '" + path + "'");
  }
  out << content;
}

}  // namespace vln
