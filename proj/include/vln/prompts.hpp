#pragma once

#include <map>
#include <string>

namespace vln {

// Prompt templates for the three agent roles, with named placeholders
// ({instruction}, {semantic_map}, {trajectory}, {query_history},
// {candidates}, ...). The default set is embedded from
// assets/prompts/*_v1.txt; load_prompts reads an override directory with the
// same file names.
struct PromptSet {
  std::string orchestration_query;
  std::string orchestration_sufficiency;
  std::string orchestration_values;
  std::string perception_answer;
  std::string decision_choose;
};

[[nodiscard]] PromptSet default_prompts();

// Throws ConfigError when a template file is missing or unreadable.
[[nodiscard]] PromptSet load_prompts(const std::string& directory);

// Replaces every "{key}" occurrence for each entry of `values`; unknown
// braces are left untouched.
[[nodiscard]] std::string render_template(std::string text,
                                          const std::map<std::string, std::string>& values);

}  // namespace vln
