#pragma once

#include <string>
#include <vector>

#include "vln/agents.hpp"
#include "vln/memory_bank.hpp"
#include "vln/semantic_map.hpp"

namespace vln {

struct LoopConfig {
  int n_max = 3;          // per-step query budget, >= 1
  bool enable_pp = true;  // false skips the query loop entirely (ablation)
};

struct PerceptionLoopResult {
  std::vector<std::string> answers;
  SemanticValueMap values;
  QueryHistory history;
  std::vector<Sufficiency> verdicts;  // one per completed iteration
  std::vector<std::string> warnings;  // fail-open degradations, for the trace
};

// Closed perception-reasoning loop: generate_query -> perceive ->
// check_sufficiency, until sufficient or the n_max budget is exhausted, then
// one semantic valuation over the accumulated answers. Agent failures
// degrade fail-open (treated as sufficient / neutral 0.5 values) and are
// recorded as warnings. Throws ConfigError when n_max < 1.
//
// With enable_pp = false the loop body never runs: no queries are issued and
// values are estimated from the instruction and trajectory alone.
[[nodiscard]] PerceptionLoopResult run_perception_loop(
    const AgentBackends& backends, const Observation& observation, const SemanticMap& map,
    const std::string& trajectory, const std::string& instruction,
    const std::vector<std::string>& new_candidates, const LoopConfig& config);

// Bundles instruction, trajectory caption, rendered map, and answers into a
// context record. Timestep, waypoint, and value snapshot are filled by the
// episode runner before the record is stored.
[[nodiscard]] MultimodalContext build_context(const std::string& instruction,
                                              const std::string& trajectory,
                                              const SemanticMap& map,
                                              const std::vector<std::string>& answers);

}  // namespace vln
