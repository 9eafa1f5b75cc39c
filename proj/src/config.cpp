#include "vln/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "vln/errors.hpp"

namespace vln {

namespace {

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

std::string unquote(std::string value) {
  if (value.size() >= 2 && ((value.front() == '"' && value.back() == '"') ||
                            (value.front() == '\'' && value.back() == '\''))) {
    return value.substr(1, value.size() - 2);
  }
  return value;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
  KeyValueConfig config;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + " is not 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) + " has an empty key");
    }
    if (!section.empty()) {
      key = section + "." + key;
    }
    config.values_[key] = unquote(trim(line.substr(eq + 1)));
  }
  return config;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot read config file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

bool KeyValueConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::string KeyValueConfig::get_string(const std::string& key, std::string fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? std::move(fallback) : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) {
    return fallback;
  }
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not a number: " + it->second);
  }
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) {
    return fallback;
  }
  try {
    return std::stoi(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not an integer: " + it->second);
  }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) {
    return fallback;
  }
  std::string v = it->second;
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") {
    return true;
  }
  if (v == "false" || v == "0" || v == "no" || v == "off") {
    return false;
  }
  throw ConfigError("config key '" + key + "' is not a boolean: " + it->second);
}

AppConfig app_config_from(const KeyValueConfig& file) {
  AppConfig config;
  config.run.lambda = file.get_double("lambda", config.run.lambda);
  config.run.top_k = file.get_int("top_k", config.run.top_k);
  config.run.n_max = file.get_int("n_max", config.run.n_max);
  config.run.max_steps = file.get_int("max_steps", config.run.max_steps);
  config.run.enable_bd_mcts = file.get_bool("enable_bd_mcts", config.run.enable_bd_mcts);
  config.run.enable_pp = file.get_bool("enable_pp", config.run.enable_pp);
  config.run.prior_visit = file.get_int("prior_visit", config.run.prior_visit);
  const std::string policy = file.get_string("move_policy", "traverse");
  if (policy == "traverse") {
    config.run.move_policy = RunConfig::MovePolicy::kTraverse;
  } else if (policy == "single_edge" || policy == "single-edge") {
    config.run.move_policy = RunConfig::MovePolicy::kSingleEdge;
  } else {
    throw ConfigError("unknown move_policy '" + policy + "'");
  }
  config.run.panorama.num_views = file.get_int("panorama.views", config.run.panorama.num_views);
  config.run.panorama.width = file.get_double("panorama.width", config.run.panorama.width);
  config.run.panorama.height = file.get_double("panorama.height", config.run.panorama.height);

  config.backend = file.get_string("backend", config.backend);
  config.prompts_dir = file.get_string("prompts_dir", config.prompts_dir);
  config.workers = file.get_int("workers", config.workers);

  config.endpoint.base_url = file.get_string("http.base_url", config.endpoint.base_url);
  config.endpoint.model_orchestration =
      file.get_string("http.model_orchestration", config.endpoint.model_orchestration);
  config.endpoint.model_perception =
      file.get_string("http.model_perception", config.endpoint.model_perception);
  config.endpoint.model_decision =
      file.get_string("http.model_decision", config.endpoint.model_decision);
  config.endpoint.api_key_env = file.get_string("http.api_key_env", config.endpoint.api_key_env);
  config.endpoint.timeout_seconds =
      file.get_double("http.timeout_s", config.endpoint.timeout_seconds);
  config.endpoint.max_retries = file.get_int("http.max_retries", config.endpoint.max_retries);
  config.endpoint.backoff_base_ms =
      file.get_int("http.backoff_ms", config.endpoint.backoff_base_ms);
  config.endpoint.temperature = file.get_double("http.temperature", config.endpoint.temperature);
  config.endpoint.max_concurrency =
      file.get_int("http.concurrency", config.endpoint.max_concurrency);
  return config;
}

}  // namespace vln
