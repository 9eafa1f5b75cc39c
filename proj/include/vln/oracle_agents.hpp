#pragma once

#include <memory>

#include "vln/agents.hpp"
#include "vln/world.hpp"

namespace vln {

struct PanoramaConfig {
  int num_views = 8;
  double width = 2048.0;
  double height = 512.0;
};

// Deterministic scripted backends over a synthetic world. They never fail
// and are pure functions of their inputs, which makes episode traces
// replayable byte for byte.
//
// Orchestration rules: queries target uncovered instruction landmarks in
// priority order (focus region = the landmark's map box inflated 20%);
// sufficiency holds once every landmark noun appears in an answer; values
// follow clamp(1 - d(u, goal) / diameter, 0, 1) with per-world trap and
// gating overrides. The perceiver describes the ground-truth attributes of
// the object best overlapping the focus region. The decider takes the
// best-scored candidate and stops within the success radius of the goal.
class OracleScanBackend : public ScanBackend {
 public:
  OracleScanBackend(std::shared_ptr<const WorldSpec> world, PanoramaConfig panorama);
  ScanResult scan(const Observation& observation) override;

 private:
  std::shared_ptr<const WorldSpec> world_;
  PanoramaConfig panorama_;
};

class OracleOrchestrationAgent : public OrchestrationAgent {
 public:
  explicit OracleOrchestrationAgent(std::shared_ptr<const WorldSpec> world);

  VisualQuery generate_query(const std::string& map_text, const std::string& trajectory,
                             const std::string& instruction, const QueryHistory& history,
                             double panorama_width, double panorama_height) override;

  Sufficiency check_sufficiency(const std::string& map_text, const QueryHistory& history,
                                const std::string& instruction) override;

  SemanticValueMap evaluate_values(const std::string& instruction, const std::string& trajectory,
                                   const std::vector<std::string>& answers,
                                   const std::vector<std::string>& candidates) override;

 private:
  std::shared_ptr<const WorldSpec> world_;
};

class OraclePerceptionAgent : public PerceptionAgent {
 public:
  OraclePerceptionAgent(std::shared_ptr<const WorldSpec> world, PanoramaConfig panorama);
  std::string answer_query(const Observation& observation, const VisualQuery& query) override;

 private:
  std::shared_ptr<const WorldSpec> world_;
  PanoramaConfig panorama_;
};

class OracleDecisionAgent : public DecisionAgent {
 public:
  explicit OracleDecisionAgent(std::shared_ptr<const WorldSpec> world);
  Decision decide(const DecisionRequest& request) override;

 private:
  std::shared_ptr<const WorldSpec> world_;
};

[[nodiscard]] AgentBackends make_oracle_backends(std::shared_ptr<const WorldSpec> world,
                                                 PanoramaConfig panorama = {});

}  // namespace vln
