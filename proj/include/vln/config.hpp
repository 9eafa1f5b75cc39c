#pragma once

#include <map>
#include <optional>
#include <string>

#include "vln/episode_runner.hpp"
#include "vln/llm_client.hpp"

namespace vln {

// Flat TOML-style key/value file: `key = value` lines, `#` comments, and
// optional `[section]` headers that prefix keys as `section.key`. Values are
// numbers, booleans, or (optionally quoted) strings.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;
  static KeyValueConfig parse(const std::string& text);      // throws ConfigError
  static KeyValueConfig load(const std::string& path);       // throws ConfigError

  [[nodiscard]] bool has(const std::string& key) const;
  [[nodiscard]] std::string get_string(const std::string& key, std::string fallback) const;
  [[nodiscard]] double get_double(const std::string& key, double fallback) const;
  [[nodiscard]] int get_int(const std::string& key, int fallback) const;
  [[nodiscard]] bool get_bool(const std::string& key, bool fallback) const;

 private:
  std::map<std::string, std::string> values_;
};

struct AppConfig {
  RunConfig run;
  EndpointConfig endpoint;
  std::string backend = "oracle";  // "oracle" | "http"
  std::string prompts_dir;         // empty -> embedded templates
  int workers = 1;
};

// Maps config keys (lambda, top_k, n_max, max_steps, prior_visit,
// move_policy, backend, workers, prompts_dir, panorama.*, http.*) onto the
// runtime configuration. Unknown keys are ignored.
[[nodiscard]] AppConfig app_config_from(const KeyValueConfig& file);

}  // namespace vln
