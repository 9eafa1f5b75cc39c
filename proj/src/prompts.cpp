#include "vln/prompts.hpp"

#include <fstream>
#include <sstream>

#include "vln/errors.hpp"
#include "vln/prompts_data.hpp"

namespace vln {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot read prompt template '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

PromptSet default_prompts() {
  PromptSet prompts;
  prompts.orchestration_query = embedded::kOrchestrationQuery;
  prompts.orchestration_sufficiency = embedded::kOrchestrationSufficiency;
  prompts.orchestration_values = embedded::kOrchestrationValues;
  prompts.perception_answer = embedded::kPerceptionAnswer;
  prompts.decision_choose = embedded::kDecisionChoose;
  return prompts;
}

PromptSet load_prompts(const std::string& directory) {
  PromptSet prompts;
  prompts.orchestration_query = read_file(directory + "/orchestration_query_v1.txt");
  prompts.orchestration_sufficiency = read_file(directory + "/orchestration_sufficiency_v1.txt");
  prompts.orchestration_values = read_file(directory + "/orchestration_values_v1.txt");
  prompts.perception_answer = read_file(directory + "/perception_answer_v1.txt");
  prompts.decision_choose = read_file(directory + "/decision_choose_v1.txt");
  return prompts;
}

std::string render_template(std::string text,
                            const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values) {
    const std::string token = "{" + key + "}";
    std::size_t pos = 0;
    while ((pos = text.find(token, pos)) != std::string::npos) {
      text.replace(pos, token.size(), value);
      pos += value.size();
    }
  }
  return text;
}

}  // namespace vln
