#pragma once

#include <memory>

#include "vln/agents.hpp"
#include "vln/llm_client.hpp"
#include "vln/prompts.hpp"

namespace vln {

// AgentBackends over a chat-completion endpoint. Replies are requested as
// fenced JSON per role schema; a single repair re-prompt is attempted on
// parse failure before falling back to neutral defaults (logged). Scanning
// is not part of this bundle: detection and depth stay with the simulator
// oracle, so the caller supplies the scan backend.
class HttpOrchestrationAgent : public OrchestrationAgent {
 public:
  HttpOrchestrationAgent(std::shared_ptr<ChatClient> client, PromptSet prompts, CallLog* log);

  VisualQuery generate_query(const std::string& map_text, const std::string& trajectory,
                             const std::string& instruction, const QueryHistory& history,
                             double panorama_width, double panorama_height) override;
  Sufficiency check_sufficiency(const std::string& map_text, const QueryHistory& history,
                                const std::string& instruction) override;
  SemanticValueMap evaluate_values(const std::string& instruction, const std::string& trajectory,
                                   const std::vector<std::string>& answers,
                                   const std::vector<std::string>& candidates) override;

 private:
  std::shared_ptr<ChatClient> client_;
  PromptSet prompts_;
  CallLog* log_;
};

class HttpPerceptionAgent : public PerceptionAgent {
 public:
  HttpPerceptionAgent(std::shared_ptr<ChatClient> client, PromptSet prompts, CallLog* log);
  std::string answer_query(const Observation& observation, const VisualQuery& query) override;

 private:
  std::shared_ptr<ChatClient> client_;
  PromptSet prompts_;
  CallLog* log_;
};

class HttpDecisionAgent : public DecisionAgent {
 public:
  HttpDecisionAgent(std::shared_ptr<ChatClient> client, PromptSet prompts, CallLog* log);
  Decision decide(const DecisionRequest& request) override;

 private:
  std::shared_ptr<ChatClient> client_;
  PromptSet prompts_;
  CallLog* log_;
};

// Bundles the three HTTP agents around one shared client; `scan` stays as
// provided by the caller.
[[nodiscard]] AgentBackends make_http_backends(const EndpointConfig& config,
                                               const PromptSet& prompts,
                                               std::shared_ptr<ScanBackend> scan, CallLog* log);

}  // namespace vln
