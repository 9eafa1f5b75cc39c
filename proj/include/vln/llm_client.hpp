#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "vln/search_tree.hpp"
#include "vln/semantic_map.hpp"

namespace vln {

enum class AgentRole { kOrchestration, kPerception, kDecision };

[[nodiscard]] std::string role_name(AgentRole role);

struct EndpointConfig {
  std::string base_url = "http://127.0.0.1:8080/v1";
  std::string model_orchestration = "orchestration-model";
  std::string model_perception = "perception-model";
  std::string model_decision = "decision-model";
  std::string api_key_env = "VLN_API_KEY";  // env var NAME; the key itself never leaves the process
  double timeout_seconds = 30.0;
  int max_retries = 2;
  int backoff_base_ms = 250;  // doubled per retry
  double temperature = 0.0;
  int max_concurrency = 4;

  [[nodiscard]] const std::string& model_for(AgentRole role) const;
};

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
  std::string image_ref;  // optional cropped-image reference
};

// Digest record of one HTTP call for the trace. Digests are FNV-1a hashes
// of the payloads; raw bodies and API keys are never written.
struct LlmCall {
  std::string role;
  std::string request_digest;
  std::string response_digest;
  int http_status = 0;
  int attempts = 0;
  long long total_tokens = 0;
};

// Shared sink for call records and degradation warnings.
class CallLog {
 public:
  void record(LlmCall call);
  void warn(std::string message);
  [[nodiscard]] std::vector<LlmCall> drain_calls();
  [[nodiscard]] std::vector<std::string> drain_warnings();
  [[nodiscard]] std::size_t call_count() const;

 private:
  mutable std::mutex mutex_;
  std::vector<LlmCall> calls_;
  std::vector<std::string> warnings_;
};

// Minimal chat-completion client: POST {base_url}/chat/completions with
// {model, messages, temperature}, returning choices[0].message.content.
// Retryable failures (connect/timeout, 408/409/429, 5xx) are retried up to
// max_retries with exponential backoff; exhaustion throws AgentError.
class ChatClient {
 public:
  explicit ChatClient(EndpointConfig config, CallLog* log = nullptr);
  ~ChatClient();

  ChatClient(const ChatClient&) = delete;
  ChatClient& operator=(const ChatClient&) = delete;

  [[nodiscard]] std::string chat(AgentRole role, const std::vector<ChatMessage>& messages);

  [[nodiscard]] const EndpointConfig& config() const { return config_; }

 private:
  struct Impl;
  EndpointConfig config_;
  CallLog* log_ = nullptr;
  std::unique_ptr<Impl> impl_;
};

// --- Structured output parsing ------------------------------------------

enum class StructuredSchema { kQueryRegion, kVerdict, kValueMap, kDecision };

struct ParsedQuery {
  std::string question;
  PixelRect region;
  bool has_region = false;
};

struct ParsedDecision {
  bool stop = false;
  std::string target;
};

// Typed view of a model reply. Extraction looks for a fenced ```json block
// first, then any balanced JSON object. On failure the role-specific
// neutral defaults apply (verdict sufficient, empty value map, empty
// decision) and `degraded` is set with a warning. Values are clamped to
// [0, 1]. Never throws.
struct StructuredOutput {
  bool degraded = false;
  std::string warning;
  ParsedQuery query;         // kQueryRegion
  bool sufficient = true;    // kVerdict
  SemanticValueMap values;   // kValueMap
  ParsedDecision decision;   // kDecision
};

[[nodiscard]] StructuredOutput parse_structured(const std::string& text, StructuredSchema schema);

}  // namespace vln
