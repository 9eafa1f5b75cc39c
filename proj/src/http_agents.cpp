#include "vln/http_agents.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "vln/errors.hpp"

namespace vln {

namespace {

constexpr const char* kRepairPrompt =
    "Your previous reply was not a valid fenced JSON block in the required schema. "
    "Reply again with only the fenced JSON block.";

std::string render_history(const QueryHistory& history) {
  if (history.empty()) {
    return "(none)";
  }
  std::ostringstream out;
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (i > 0) {
      out << "\n";
    }
    out << (i + 1) << ". " << history[i].query.question << " -> " << history[i].answer;
  }
  return out.str();
}

std::string render_list(const std::vector<std::string>& items) {
  if (items.empty()) {
    return "(none)";
  }
  std::ostringstream out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) {
      out << ", ";
    }
    out << items[i];
  }
  return out.str();
}

std::string render_region(const PixelRect& region) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "[%.0f, %.0f, %.0f, %.0f]", region.x1, region.y1, region.x2,
                region.y2);
  return buf;
}

// One chat exchange with a single repair re-prompt on parse failure.
StructuredOutput chat_structured(ChatClient& client, AgentRole role, const std::string& prompt,
                                 StructuredSchema schema, CallLog* log,
                                 const std::string& image_ref = {}) {
  std::vector<ChatMessage> messages{{"user", prompt, image_ref}};
  const std::string reply = client.chat(role, messages);
  StructuredOutput parsed = parse_structured(reply, schema);
  if (!parsed.degraded) {
    return parsed;
  }
  messages.push_back({"assistant", reply, {}});
  messages.push_back({"user", kRepairPrompt, {}});
  const std::string repaired = client.chat(role, messages);
  StructuredOutput reparsed = parse_structured(repaired, schema);
  if (reparsed.degraded && log != nullptr) {
    log->warn(role_name(role) + ": " + reparsed.warning);
  }
  return reparsed;
}

}  // namespace

HttpOrchestrationAgent::HttpOrchestrationAgent(std::shared_ptr<ChatClient> client,
                                               PromptSet prompts, CallLog* log)
    : client_(std::move(client)), prompts_(std::move(prompts)), log_(log) {}

VisualQuery HttpOrchestrationAgent::generate_query(const std::string& map_text,
                                                   const std::string& trajectory,
                                                   const std::string& instruction,
                                                   const QueryHistory& history,
                                                   double panorama_width,
                                                   double panorama_height) {
  const std::string prompt = render_template(
      prompts_.orchestration_query,
      {{"instruction", instruction},
       {"trajectory", trajectory},
       {"semantic_map", map_text},
       {"query_history", render_history(history)},
       {"panorama_width", std::to_string(static_cast<long long>(panorama_width))},
       {"panorama_height", std::to_string(static_cast<long long>(panorama_height))}});

  const StructuredOutput parsed = chat_structured(*client_, AgentRole::kOrchestration, prompt,
                                                  StructuredSchema::kQueryRegion, log_);

  VisualQuery query;
  query.question = parsed.degraded || parsed.query.question.empty()
                       ? "Describe the most relevant objects (round " +
                             std::to_string(history.size() + 1) + ")."
                       : parsed.query.question;
  query.focus_region = PixelRect{0.0, 0.0, panorama_width, panorama_height};
  if (parsed.query.has_region) {
    PixelRect r = parsed.query.region;
    r.x1 = std::clamp(r.x1, 0.0, panorama_width);
    r.x2 = std::clamp(r.x2, 0.0, panorama_width);
    r.y1 = std::clamp(r.y1, 0.0, panorama_height);
    r.y2 = std::clamp(r.y2, 0.0, panorama_height);
    if (r.area() > 0.0) {
      query.focus_region = r;
    } else if (log_ != nullptr) {
      log_->warn("orchestration: degenerate focus region, using whole panorama");
    }
  }
  return query;
}

Sufficiency HttpOrchestrationAgent::check_sufficiency(const std::string& map_text,
                                                      const QueryHistory& history,
                                                      const std::string& instruction) {
  const std::string prompt =
      render_template(prompts_.orchestration_sufficiency,
                      {{"instruction", instruction},
                       {"semantic_map", map_text},
                       {"query_history", render_history(history)}});
  const StructuredOutput parsed = chat_structured(*client_, AgentRole::kOrchestration, prompt,
                                                  StructuredSchema::kVerdict, log_);
  return parsed.sufficient ? Sufficiency::kSufficient : Sufficiency::kInsufficient;
}

SemanticValueMap HttpOrchestrationAgent::evaluate_values(
    const std::string& instruction, const std::string& trajectory,
    const std::vector<std::string>& answers, const std::vector<std::string>& candidates) {
  const std::string prompt = render_template(prompts_.orchestration_values,
                                             {{"instruction", instruction},
                                              {"trajectory", trajectory},
                                              {"answers", render_list(answers)},
                                              {"candidates", render_list(candidates)}});
  const StructuredOutput parsed = chat_structured(*client_, AgentRole::kOrchestration, prompt,
                                                  StructuredSchema::kValueMap, log_);
  // Missing entries are topped up to the neutral prior by the perception
  // loop; only pass through what the model actually scored.
  return parsed.values;
}

HttpPerceptionAgent::HttpPerceptionAgent(std::shared_ptr<ChatClient> client, PromptSet prompts,
                                         CallLog* log)
    : client_(std::move(client)), prompts_(std::move(prompts)), log_(log) {}

std::string HttpPerceptionAgent::answer_query(const Observation& observation,
                                              const VisualQuery& query) {
  const std::string region = render_region(query.focus_region);
  const std::string prompt = render_template(
      prompts_.perception_answer, {{"question", query.question}, {"region", region}});

  // The focused crop travels as an image reference resolvable by the
  // serving side; coordinates are panorama pixels.
  char image_ref[160];
  std::snprintf(image_ref, sizeof(image_ref), "crop://%s/t%d?x1=%.0f&y1=%.0f&x2=%.0f&y2=%.0f",
                observation.waypoint_id.c_str(), observation.timestep, query.focus_region.x1,
                query.focus_region.y1, query.focus_region.x2, query.focus_region.y2);

  std::vector<ChatMessage> messages{{"user", prompt, image_ref}};
  return client_->chat(AgentRole::kPerception, messages);
}

HttpDecisionAgent::HttpDecisionAgent(std::shared_ptr<ChatClient> client, PromptSet prompts,
                                     CallLog* log)
    : client_(std::move(client)), prompts_(std::move(prompts)), log_(log) {}

Decision HttpDecisionAgent::decide(const DecisionRequest& request) {
  std::ostringstream candidates;
  for (std::size_t i = 0; i < request.candidates.size(); ++i) {
    if (i > 0) {
      candidates << ", ";
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%s (score %.3f, %.1f m away)",
                  request.candidates[i].waypoint_id.c_str(), request.candidates[i].score,
                  request.candidates[i].distance);
    candidates << buf;
  }
  std::ostringstream histories;
  for (const auto& digest : request.candidate_histories) {
    histories << digest << "\n";
  }

  const std::string prompt = render_template(prompts_.decision_choose,
                                             {{"instruction", request.instruction},
                                              {"context", request.context_text},
                                              {"candidates", candidates.str()},
                                              {"candidate_histories", histories.str()}});
  const StructuredOutput parsed = chat_structured(*client_, AgentRole::kDecision, prompt,
                                                  StructuredSchema::kDecision, log_);

  if (parsed.decision.stop) {
    return Decision{true, {}};
  }
  const auto known = std::find_if(
      request.candidates.begin(), request.candidates.end(),
      [&](const ScoredCandidate& c) { return c.waypoint_id == parsed.decision.target; });
  if (!parsed.degraded && known != request.candidates.end()) {
    return Decision{false, parsed.decision.target};
  }
  if (request.candidates.empty()) {
    if (log_ != nullptr) {
      log_->warn("decision: no candidates available, stopping");
    }
    return Decision{true, {}};
  }
  if (log_ != nullptr) {
    log_->warn("decision: unusable reply, falling back to best-scored candidate");
  }
  return Decision{false, request.candidates.front().waypoint_id};
}

AgentBackends make_http_backends(const EndpointConfig& config, const PromptSet& prompts,
                                 std::shared_ptr<ScanBackend> scan, CallLog* log) {
  auto client = std::make_shared<ChatClient>(config, log);
  AgentBackends backends;
  backends.scan = std::move(scan);
  backends.orchestration = std::make_shared<HttpOrchestrationAgent>(client, prompts, log);
  backends.perception = std::make_shared<HttpPerceptionAgent>(client, prompts, log);
  backends.decision = std::make_shared<HttpDecisionAgent>(client, prompts, log);
  return backends;
}

}  // namespace vln
