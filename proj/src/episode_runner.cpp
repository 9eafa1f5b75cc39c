#include "vln/episode_runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "vln/errors.hpp"
#include "vln/semantic_map.hpp"

namespace vln {

namespace {

constexpr double kRootPrior = 0.5;

// Candidates ranked by this step's semantic values: the decision view used
// when focused reasoning is off, and the fallback when the tree offers no
// reachable leaf.
std::vector<ScoredCandidate> rank_by_value(const std::vector<std::string>& candidates,
                                           const SemanticValueMap& values,
                                           const NavGraph& discovered,
                                           const std::string& current) {
  std::vector<ScoredCandidate> ranked;
  ranked.reserve(candidates.size());
  for (const auto& id : candidates) {
    ScoredCandidate sc;
    sc.waypoint_id = id;
    auto it = values.find(id);
    sc.path_value = (it != values.end()) ? it->second : 0.5;
    sc.score = sc.path_value;
    sc.distance = geodesic_distance(discovered, current, id).value_or(0.0);
    ranked.push_back(std::move(sc));
  }
  std::sort(ranked.begin(), ranked.end(), [](const ScoredCandidate& a, const ScoredCandidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.waypoint_id < b.waypoint_id;
  });
  return ranked;
}

std::string render_context_text(const MultimodalContext& context) {
  std::ostringstream out;
  out << "Instruction: " << context.instruction << "\nTrajectory: " << context.trajectory_caption
      << "\nSemantic map:\n"
      << context.semantic_map_text;
  if (!context.answers.empty()) {
    out << "\nGathered descriptions:";
    for (const auto& answer : context.answers) {
      out << "\n- " << answer;
    }
  }
  return out.str();
}

// Compact per-candidate memory digest along its root-to-leaf path.
std::string render_candidate_history(const std::string& candidate,
                                     const std::vector<MemoryBank::PathEntry>& entries) {
  std::ostringstream out;
  out << candidate << ":";
  for (const auto& entry : entries) {
    out << " " << entry.waypoint_id;
    if (entry.context != nullptr) {
      out << "[t" << entry.context->timestep;
      if (!entry.context->nearest_objects.empty()) {
        out << ", saw " << entry.context->nearest_objects.front();
      }
      out << "]";
    } else if (entry.semantic_value) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "[v=%.2f]", *entry.semantic_value);
      out << buf;
    }
  }
  return out.str();
}

// Incrementally discovered subgraph: the waypoints the agent has stood on
// plus every candidate it has seen, connected by observed edges.
class DiscoveredWorld {
 public:
  explicit DiscoveredWorld(const NavGraph& full) : full_(full) {}

  void observe(const std::string& at, const std::vector<std::string>& candidates) {
    touch(at);
    for (const auto& candidate : candidates) {
      touch(candidate);
      auto key = std::make_pair(std::min(at, candidate), std::max(at, candidate));
      if (edge_set_.insert(key).second) {
        edges_.push_back(key);
        rebuilt_ = false;
      }
    }
  }

  const NavGraph& graph() {
    if (!rebuilt_) {
      std::vector<Waypoint> waypoints;
      waypoints.reserve(known_.size());
      for (const auto& id : known_) {
        waypoints.push_back(full_.waypoint(id));
      }
      graph_ = NavGraph(std::move(waypoints), edges_);
      rebuilt_ = true;
    }
    return graph_;
  }

 private:
  void touch(const std::string& id) {
    if (known_.insert(id).second) {
      rebuilt_ = false;
    }
  }

  const NavGraph& full_;
  std::set<std::string> known_;
  std::set<std::pair<std::string, std::string>> edge_set_;
  std::vector<std::pair<std::string, std::string>> edges_;
  NavGraph graph_;
  bool rebuilt_ = false;
};

}  // namespace

void validate_config(const RunConfig& config) {
  if (config.n_max < 1) {
    throw ConfigError("n_max must be >= 1");
  }
  if (config.top_k < 1) {
    throw ConfigError("top_k must be >= 1");
  }
  if (!(config.lambda >= 0.0) || !std::isfinite(config.lambda)) {
    throw ConfigError("lambda must be finite and non-negative");
  }
  if (config.prior_visit < 0) {
    throw ConfigError("prior_visit must be non-negative");
  }
  if (config.panorama.num_views < 1 || config.panorama.width <= 0.0 ||
      config.panorama.height <= 0.0) {
    throw ConfigError("invalid panorama configuration");
  }
}

EpisodeTrace run_episode(const Episode& episode, const AgentBackends& backends,
                         const RunConfig& config, CallLog* log) {
  validate_config(config);
  validate_episode(episode);
  const int max_steps = (config.max_steps >= 0) ? config.max_steps : episode.max_steps;

  EpisodeTrace trace;
  std::string current = episode.start_id;
  SearchTree tree(current, kRootPrior, config.prior_visit);
  MemoryBank bank;
  DiscoveredWorld discovered(episode.graph);
  std::string trajectory = "at " + current + ", no steps taken yet";

  auto& summary = trace.summary;
  summary.travelled.push_back(current);
  summary.termination = "max_steps";

  for (int t = 0; t < max_steps; ++t) {
    StepRecord step;
    step.timestep = t;
    step.waypoint_id = current;
    summary.decision_waypoints.push_back(current);

    const Observation observation{current, t};
    const ScanResult scan = backends.scan->scan(observation);
    const SemanticMap map =
        build_semantic_map(scan.detections, scan.depths, config.panorama.width,
                           config.panorama.height, t);
    step.semantic_map_text = render_map_text(map);

    const std::vector<std::string> candidates = navigable_candidates(episode.graph, current);
    discovered.observe(current, candidates);

    PerceptionLoopResult loop =
        run_perception_loop(backends, observation, map, trajectory, episode.instruction,
                            candidates, LoopConfig{config.n_max, config.enable_pp});
    step.queries = loop.history;
    step.verdicts = loop.verdicts;
    step.semantic_values = loop.values;
    step.warnings = std::move(loop.warnings);

    const std::vector<std::string> added = tree.expand(current, candidates, loop.values);
    const double reward = tree.compute_reward(current, added, loop.values);
    tree.backpropagate(current, reward);

    const NavGraph& known = discovered.graph();
    if (config.enable_bd_mcts) {
      step.top_k = tree.select_top_k(known, current, config.top_k, config.lambda);
      step.has_top_k = true;
      step.decision_candidates =
          step.top_k.empty() ? rank_by_value(candidates, loop.values, known, current)
                             : step.top_k;
    } else {
      // Ablation: no focused filtering; the decider sees the immediate
      // candidates ranked by this step's values alone.
      step.decision_candidates = rank_by_value(candidates, loop.values, known, current);
    }

    MultimodalContext context =
        build_context(episode.instruction, trajectory, map, loop.answers);
    context.timestep = t;
    context.waypoint_id = current;
    context.semantic_values = loop.values;
    bank.store(context);
    step.context = context;

    DecisionRequest request;
    request.current_id = current;
    request.instruction = episode.instruction;
    request.candidates = step.decision_candidates;
    request.context_text = render_context_text(context);
    for (const auto& candidate : step.decision_candidates) {
      if (tree.contains(candidate.waypoint_id)) {
        request.candidate_histories.push_back(render_candidate_history(
            candidate.waypoint_id,
            bank.contexts_for_path(tree.path_from_root(candidate.waypoint_id))));
      }
    }

    Decision decision;
    try {
      decision = backends.decision->decide(request);
    } catch (const AgentError& e) {
      step.warnings.push_back(std::string("decision failed, using best candidate: ") + e.what());
      decision = request.candidates.empty() ? Decision{true, {}}
                                            : Decision{false, request.candidates.front().waypoint_id};
    }
    if (!decision.stop) {
      const bool known_target =
          std::any_of(request.candidates.begin(), request.candidates.end(),
                      [&](const ScoredCandidate& c) { return c.waypoint_id == decision.target; });
      if (!known_target) {
        step.warnings.push_back("decision target '" + decision.target +
                                "' not among candidates, using best candidate");
        decision = request.candidates.empty()
                       ? Decision{true, {}}
                       : Decision{false, request.candidates.front().waypoint_id};
      }
    }
    step.decision = decision;

    if (!decision.stop) {
      std::vector<std::string> hops = shortest_path(known, current, decision.target);
      if (config.move_policy == RunConfig::MovePolicy::kSingleEdge && hops.size() > 2) {
        hops.resize(2);
      }
      for (std::size_t i = 1; i < hops.size(); ++i) {
        summary.path_length += known.edge_weight(hops[i - 1], hops[i]);
        summary.travelled.push_back(hops[i]);
      }
      step.traversed = hops;
      current = hops.back();
    }
    step.cumulative_path_length = summary.path_length;

    for (const auto& node_id : tree.ids()) {
      step.tree_snapshot.push_back(tree.node(node_id));
    }
    if (log != nullptr) {
      step.llm_calls = log->drain_calls();
      for (auto& warning : log->drain_warnings()) {
        step.warnings.push_back(std::move(warning));
      }
    }
    trace.steps.push_back(std::move(step));

    if (decision.stop) {
      summary.termination = "stop";
      break;
    }
    trajectory = reconstruct_trajectory(bank, summary.decision_waypoints);
  }

  summary.final_waypoint = current;
  summary.steps = static_cast<int>(trace.steps.size());
  return trace;
}

}  // namespace vln
