#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "vln/search_tree.hpp"
#include "vln/semantic_map.hpp"

namespace vln {

// Opaque reference to the panoramic observation at the agent's current pose.
// Backends resolve it against whatever world or image source they own.
struct Observation {
  std::string waypoint_id;
  int timestep = 0;
};

struct VisualQuery {
  std::string question;
  PixelRect focus_region;  // within [0,W] x [0,H], positive area
};

struct QueryRecord {
  VisualQuery query;
  std::string answer;
};

// Query-answer pairs accumulated within one timestep; cleared between steps.
using QueryHistory = std::vector<QueryRecord>;

enum class Sufficiency { kSufficient, kInsufficient };

struct ScanResult {
  std::vector<Detection> detections;
  std::map<std::size_t, double> depths;  // detection index -> meters
};

// Panoramic scan: views in, detections plus per-detection depth out.
class ScanBackend {
 public:
  virtual ~ScanBackend() = default;
  virtual ScanResult scan(const Observation& observation) = 0;
};

// LLM role: spatial inference over the semantic map and the query loop, plus
// semantic valuation of candidate waypoints.
class OrchestrationAgent {
 public:
  virtual ~OrchestrationAgent() = default;

  virtual VisualQuery generate_query(const std::string& map_text, const std::string& trajectory,
                                     const std::string& instruction, const QueryHistory& history,
                                     double panorama_width, double panorama_height) = 0;

  virtual Sufficiency check_sufficiency(const std::string& map_text, const QueryHistory& history,
                                        const std::string& instruction) = 0;

  virtual SemanticValueMap evaluate_values(const std::string& instruction,
                                           const std::string& trajectory,
                                           const std::vector<std::string>& answers,
                                           const std::vector<std::string>& candidates) = 0;
};

// VLM role: fine-grained sensing within a focused region of the panorama.
class PerceptionAgent {
 public:
  virtual ~PerceptionAgent() = default;
  virtual std::string answer_query(const Observation& observation, const VisualQuery& query) = 0;
};

struct DecisionRequest {
  std::string current_id;
  std::string instruction;
  // Candidates sorted best-first: the BD-MCTS top-k set, or value-ranked
  // navigable candidates when focused reasoning is disabled.
  std::vector<ScoredCandidate> candidates;
  std::string context_text;                      // rendered current context S_t
  std::vector<std::string> candidate_histories;  // per-candidate memory digests
};

struct Decision {
  bool stop = false;
  std::string target;  // next waypoint id when stop == false
};

// LLM role: pick the next waypoint from the filtered candidate set, or stop.
class DecisionAgent {
 public:
  virtual ~DecisionAgent() = default;
  virtual Decision decide(const DecisionRequest& request) = 0;
};

struct AgentBackends {
  std::shared_ptr<ScanBackend> scan;
  std::shared_ptr<OrchestrationAgent> orchestration;
  std::shared_ptr<PerceptionAgent> perception;
  std::shared_ptr<DecisionAgent> decision;
};

}  // namespace vln
