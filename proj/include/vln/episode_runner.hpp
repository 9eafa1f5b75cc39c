#pragma once

#include <string>
#include <vector>

#include "vln/agents.hpp"
#include "vln/llm_client.hpp"
#include "vln/memory_bank.hpp"
#include "vln/nav_graph.hpp"
#include "vln/oracle_agents.hpp"
#include "vln/perception_loop.hpp"
#include "vln/search_tree.hpp"

namespace vln {

struct RunConfig {
  double lambda = 0.3;  // distance penalty strength
  int top_k = 5;
  int n_max = 3;       // per-step query budget
  int max_steps = -1;  // -1 inherits the episode's max_steps
  bool enable_bd_mcts = true;
  bool enable_pp = true;
  int prior_visit = 0;  // >0 keeps the semantic-value prior as pseudo visits
  enum class MovePolicy { kTraverse, kSingleEdge };
  MovePolicy move_policy = MovePolicy::kTraverse;
  PanoramaConfig panorama;
};

void validate_config(const RunConfig& config);  // throws ConfigError

struct StepRecord {
  int timestep = 0;
  std::string waypoint_id;
  std::string semantic_map_text;
  QueryHistory queries;
  std::vector<Sufficiency> verdicts;
  SemanticValueMap semantic_values;
  std::vector<TreeNode> tree_snapshot;            // sorted by id
  std::vector<ScoredCandidate> top_k;             // absent in the no-BD-MCTS ablation
  bool has_top_k = false;
  std::vector<ScoredCandidate> decision_candidates;
  Decision decision;
  std::vector<std::string> traversed;             // waypoint sequence walked this step
  double cumulative_path_length = 0.0;
  MultimodalContext context;                      // the stored S_t
  std::vector<std::string> warnings;
  std::vector<LlmCall> llm_calls;
};

struct EpisodeSummary {
  std::string final_waypoint;
  int steps = 0;
  double path_length = 0.0;
  std::string termination;  // "stop" | "max_steps"
  std::vector<std::string> travelled;           // every waypoint passed through
  std::vector<std::string> decision_waypoints;  // one per step
};

struct EpisodeTrace {
  std::vector<StepRecord> steps;
  EpisodeSummary summary;
};

// Runs the full per-step cycle: scan -> semantic map -> perception loop ->
// tree expansion, reward, backpropagation -> top-k selection -> decision ->
// traversal over the discovered graph -> memory update -> trajectory
// reconstruction; terminates on STOP or after max_steps. `log`, when given,
// drains HTTP call records and warnings into each step.
[[nodiscard]] EpisodeTrace run_episode(const Episode& episode, const AgentBackends& backends,
                                       const RunConfig& config, CallLog* log = nullptr);

}  // namespace vln
