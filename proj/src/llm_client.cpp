#include "vln/llm_client.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <thread>
#include <utility>

#include "httplib.h"
#include "json.hpp"

#include "vln/digest.hpp"
#include "vln/errors.hpp"

namespace vln {

namespace {

using nlohmann::json;

bool retryable_status(int status) {
  return status == 408 || status == 409 || status == 429 || status >= 500;
}

// Splits "http://host:port/prefix" into origin and path prefix.
std::pair<std::string, std::string> split_base_url(const std::string& base_url) {
  const auto scheme_end = base_url.find("://");
  const std::size_t host_start = (scheme_end == std::string::npos) ? 0 : scheme_end + 3;
  const auto path_start = base_url.find('/', host_start);
  if (path_start == std::string::npos) {
    return {base_url, ""};
  }
  std::string prefix = base_url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') {
    prefix.pop_back();
  }
  return {base_url.substr(0, path_start), prefix};
}

}  // namespace

std::string role_name(AgentRole role) {
  switch (role) {
    case AgentRole::kOrchestration: return "orchestration";
    case AgentRole::kPerception: return "perception";
    case AgentRole::kDecision: return "decision";
  }
  return "unknown";
}

const std::string& EndpointConfig::model_for(AgentRole role) const {
  switch (role) {
    case AgentRole::kPerception: return model_perception;
    case AgentRole::kDecision: return model_decision;
    case AgentRole::kOrchestration: break;
  }
  return model_orchestration;
}

void CallLog::record(LlmCall call) {
  std::lock_guard lock(mutex_);
  calls_.push_back(std::move(call));
}

void CallLog::warn(std::string message) {
  std::lock_guard lock(mutex_);
  warnings_.push_back(std::move(message));
}

std::vector<LlmCall> CallLog::drain_calls() {
  std::lock_guard lock(mutex_);
  return std::exchange(calls_, {});
}

std::vector<std::string> CallLog::drain_warnings() {
  std::lock_guard lock(mutex_);
  return std::exchange(warnings_, {});
}

std::size_t CallLog::call_count() const {
  std::lock_guard lock(mutex_);
  return calls_.size();
}

struct ChatClient::Impl {
  std::string origin;
  std::string path_prefix;
  std::mutex slots_mutex;
  std::condition_variable slots_cv;
  int slots_in_use = 0;
};

ChatClient::ChatClient(EndpointConfig config, CallLog* log)
    : config_(std::move(config)), log_(log), impl_(std::make_unique<Impl>()) {
  if (config_.timeout_seconds <= 0.0) {
    throw ConfigError("endpoint timeout must be positive");
  }
  if (config_.max_retries < 0) {
    throw ConfigError("endpoint max_retries must be non-negative");
  }
  std::tie(impl_->origin, impl_->path_prefix) = split_base_url(config_.base_url);
}

ChatClient::~ChatClient() = default;

std::string ChatClient::chat(AgentRole role, const std::vector<ChatMessage>& messages) {
  if (messages.empty()) {
    throw AgentError("chat called with no messages");
  }

  json body;
  body["model"] = config_.model_for(role);
  body["temperature"] = config_.temperature;
  body["messages"] = json::array();
  for (const auto& message : messages) {
    json m;
    m["role"] = message.role;
    if (message.image_ref.empty()) {
      m["content"] = message.content;
    } else {
      m["content"] = json::array({json{{"type", "text"}, {"text", message.content}},
                                  json{{"type", "image_url"},
                                       {"image_url", json{{"url", message.image_ref}}}}});
    }
    body["messages"].push_back(std::move(m));
  }
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key != nullptr && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }

  // Bound in-flight requests without holding a client-wide lock during IO.
  {
    std::unique_lock lock(impl_->slots_mutex);
    impl_->slots_cv.wait(lock, [&] { return impl_->slots_in_use < config_.max_concurrency; });
    ++impl_->slots_in_use;
  }
  struct SlotRelease {
    Impl* impl;
    ~SlotRelease() {
      {
        std::lock_guard lock(impl->slots_mutex);
        --impl->slots_in_use;
      }
      impl->slots_cv.notify_one();
    }
  } release{impl_.get()};

  LlmCall record;
  record.role = role_name(role);
  record.request_digest = hex_digest(payload);

  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    record.attempts = attempt + 1;
    if (attempt > 0) {
      const auto delay = std::chrono::milliseconds(config_.backoff_base_ms) * (1 << (attempt - 1));
      std::this_thread::sleep_for(delay);
    }

    httplib::Client client(impl_->origin);
    client.set_connection_timeout(std::chrono::duration<double>(config_.timeout_seconds));
    client.set_read_timeout(std::chrono::duration<double>(config_.timeout_seconds));
    auto res = client.Post(impl_->path_prefix + "/chat/completions", headers, payload,
                           "application/json");
    if (!res) {
      last_error = "connection error: " + httplib::to_string(res.error());
      continue;
    }
    record.http_status = res->status;
    if (res->status != 200) {
      last_error = "http status " + std::to_string(res->status);
      if (retryable_status(res->status)) {
        continue;
      }
      break;
    }

    json reply = json::parse(res->body, nullptr, /*allow_exceptions=*/false);
    if (reply.is_discarded() || !reply.contains("choices") || reply["choices"].empty() ||
        !reply["choices"][0].contains("message")) {
      last_error = "malformed completion payload";
      break;
    }
    const std::string content = reply["choices"][0]["message"].value("content", "");
    record.response_digest = hex_digest(res->body);
    if (reply.contains("usage") && reply["usage"].is_object()) {
      record.total_tokens = reply["usage"].value("total_tokens", 0);
    }
    if (log_ != nullptr) {
      log_->record(record);
    }
    return content;
  }

  if (log_ != nullptr) {
    log_->record(record);
  }
  throw AgentError(record.role + " endpoint failed after " + std::to_string(record.attempts) +
                   " attempt(s): " + last_error);
}

namespace {

// First fenced ```json block, else the first balanced top-level JSON object.
std::string extract_json_block(const std::string& text) {
  const auto fence = text.find("```json");
  if (fence != std::string::npos) {
    const auto start = text.find('\n', fence);
    const auto end = text.find("```", fence + 7);
    if (start != std::string::npos && end != std::string::npos && start < end) {
      return text.substr(start + 1, end - start - 1);
    }
  }
  const auto open = text.find('{');
  if (open == std::string::npos) {
    return "";
  }
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) {
        return text.substr(open, i - open + 1);
      }
    }
  }
  return "";
}

}  // namespace

StructuredOutput parse_structured(const std::string& text, StructuredSchema schema) {
  StructuredOutput out;
  auto degrade = [&](const std::string& why) {
    out.degraded = true;
    out.warning = "structured parse failed (" + why + "); neutral defaults applied";
  };

  const std::string block = extract_json_block(text);
  if (block.empty()) {
    degrade("no JSON block found");
    return out;
  }
  const json parsed = json::parse(block, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded() || !parsed.is_object()) {
    degrade("invalid JSON");
    return out;
  }

  switch (schema) {
    case StructuredSchema::kQueryRegion: {
      if (!parsed.contains("question") || !parsed["question"].is_string()) {
        degrade("missing question");
        return out;
      }
      out.query.question = parsed["question"].get<std::string>();
      if (parsed.contains("region") && parsed["region"].is_array() &&
          parsed["region"].size() == 4) {
        const auto& r = parsed["region"];
        if (r[0].is_number() && r[1].is_number() && r[2].is_number() && r[3].is_number()) {
          out.query.region =
              PixelRect{r[0].get<double>(), r[1].get<double>(), r[2].get<double>(),
                        r[3].get<double>()};
          out.query.has_region = true;
        }
      }
      return out;
    }
    case StructuredSchema::kVerdict: {
      if (parsed.contains("sufficient") && parsed["sufficient"].is_boolean()) {
        out.sufficient = parsed["sufficient"].get<bool>();
        return out;
      }
      if (parsed.contains("verdict") && parsed["verdict"].is_string()) {
        out.sufficient = parsed["verdict"].get<std::string>() != "insufficient";
        return out;
      }
      degrade("missing verdict");
      return out;
    }
    case StructuredSchema::kValueMap: {
      const json* map = nullptr;
      if (parsed.contains("values") && parsed["values"].is_object()) {
        map = &parsed["values"];
      } else {
        map = &parsed;  // tolerate a bare {"id": value} object
      }
      bool any = false;
      for (auto it = map->begin(); it != map->end(); ++it) {
        if (it.value().is_number()) {
          out.values[it.key()] = std::clamp(it.value().get<double>(), 0.0, 1.0);
          any = true;
        }
      }
      if (!any) {
        degrade("no numeric values");
      }
      return out;
    }
    case StructuredSchema::kDecision: {
      std::string action;
      if (parsed.contains("action") && parsed["action"].is_string()) {
        action = parsed["action"].get<std::string>();
      } else if (parsed.contains("decision") && parsed["decision"].is_string()) {
        action = parsed["decision"].get<std::string>();
      }
      if (action == "stop") {
        out.decision.stop = true;
        return out;
      }
      if (action == "move" && parsed.contains("target") && parsed["target"].is_string()) {
        out.decision.target = parsed["target"].get<std::string>();
        return out;
      }
      degrade("missing action/target");
      return out;
    }
  }
  degrade("unknown schema");
  return out;
}

}  // namespace vln
