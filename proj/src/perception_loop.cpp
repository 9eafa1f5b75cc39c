#include "vln/perception_loop.hpp"

#include <algorithm>
#include <set>

#include "vln/errors.hpp"

namespace vln {

namespace {

constexpr double kNeutralValue = 0.5;

bool question_seen(const QueryHistory& history, const std::string& question) {
  return std::any_of(history.begin(), history.end(), [&](const QueryRecord& record) {
    return record.query.question == question;
  });
}

// Clamps backend values to [0, 1] and fills gaps with the neutral prior.
SemanticValueMap normalize_values(const SemanticValueMap& raw,
                                  const std::vector<std::string>& candidates,
                                  std::vector<std::string>& warnings) {
  SemanticValueMap out;
  for (const auto& candidate : candidates) {
    auto it = raw.find(candidate);
    if (it == raw.end()) {
      warnings.push_back("no value emitted for candidate '" + candidate +
                         "', defaulting to 0.5");
      out[candidate] = kNeutralValue;
      continue;
    }
    out[candidate] = std::clamp(it->second, 0.0, 1.0);
  }
  return out;
}

}  // namespace

PerceptionLoopResult run_perception_loop(const AgentBackends& backends,
                                         const Observation& observation, const SemanticMap& map,
                                         const std::string& trajectory,
                                         const std::string& instruction,
                                         const std::vector<std::string>& new_candidates,
                                         const LoopConfig& config) {
  if (config.n_max < 1) {
    throw ConfigError("perception loop requires n_max >= 1");
  }

  PerceptionLoopResult result;
  const std::string map_text = render_map_text(map);

  if (config.enable_pp) {
    for (int iteration = 0; iteration < config.n_max; ++iteration) {
      VisualQuery query;
      try {
        query = backends.orchestration->generate_query(map_text, trajectory, instruction,
                                                       result.history, map.panorama_width,
                                                       map.panorama_height);
        if (question_seen(result.history, query.question)) {
          // One more chance before declaring the query stream degenerate.
          query = backends.orchestration->generate_query(map_text, trajectory, instruction,
                                                         result.history, map.panorama_width,
                                                         map.panorama_height);
        }
      } catch (const AgentError& e) {
        result.warnings.push_back(std::string("query generation failed: ") + e.what());
        break;
      }
      if (question_seen(result.history, query.question)) {
        result.warnings.push_back("degenerate repeated query '" + query.question +
                                  "', ending loop as sufficient");
        break;
      }

      std::string answer;
      try {
        answer = backends.perception->answer_query(observation, query);
      } catch (const AgentError& e) {
        result.warnings.push_back(std::string("perception failed: ") + e.what());
        answer = "no answer available";
      }
      result.history.push_back(QueryRecord{query, answer});
      result.answers.push_back(answer);

      Sufficiency verdict = Sufficiency::kSufficient;
      if (static_cast<int>(result.history.size()) >= config.n_max) {
        // Budget cap: forced sufficient regardless of the backend.
        verdict = Sufficiency::kSufficient;
      } else {
        try {
          verdict =
              backends.orchestration->check_sufficiency(map_text, result.history, instruction);
        } catch (const AgentError& e) {
          result.warnings.push_back(std::string("sufficiency check failed, assuming sufficient: ") +
                                    e.what());
          verdict = Sufficiency::kSufficient;
        }
      }
      result.verdicts.push_back(verdict);
      if (verdict == Sufficiency::kSufficient) {
        break;
      }
    }
  }

  if (!new_candidates.empty()) {
    SemanticValueMap raw;
    try {
      raw = backends.orchestration->evaluate_values(instruction, trajectory, result.answers,
                                                    new_candidates);
    } catch (const AgentError& e) {
      result.warnings.push_back(std::string("value estimation failed, using neutral prior: ") +
                                e.what());
      raw.clear();
    }
    result.values = normalize_values(raw, new_candidates, result.warnings);
  }
  return result;
}

MultimodalContext build_context(const std::string& instruction, const std::string& trajectory,
                                const SemanticMap& map, const std::vector<std::string>& answers) {
  MultimodalContext context;
  context.instruction = instruction;
  context.trajectory_caption = trajectory;
  context.semantic_map_text = render_map_text(map);
  context.answers = answers;

  // Nearest categories by depth, deduplicated, at most three.
  std::vector<const SemanticEntry*> sorted;
  sorted.reserve(map.entries.size());
  for (const auto& entry : map.entries) {
    sorted.push_back(&entry);
  }
  std::sort(sorted.begin(), sorted.end(), [](const SemanticEntry* a, const SemanticEntry* b) {
    if (a->depth != b->depth) return a->depth < b->depth;
    if (a->category != b->category) return a->category < b->category;
    return a->heading < b->heading;
  });
  std::set<std::string> seen;
  for (const auto* entry : sorted) {
    if (context.nearest_objects.size() == 3) {
      break;
    }
    if (seen.insert(entry->category).second) {
      context.nearest_objects.push_back(entry->category);
    }
  }
  return context;
}

}  // namespace vln
