#include "vln/memory_bank.hpp"

#include <sstream>

#include "vln/errors.hpp"

namespace vln {

namespace {

constexpr std::size_t kAnswerExcerptChars = 120;

}  // namespace

void MemoryBank::store(MultimodalContext context) {
  if (!contexts_.empty() && context.timestep <= contexts_.back().timestep) {
    throw ValidationError("out-of-order timestep " + std::to_string(context.timestep) +
                          " stored after " + std::to_string(contexts_.back().timestep));
  }
  index_[context.waypoint_id].push_back(context.timestep);
  contexts_.push_back(std::move(context));
}

std::vector<int> MemoryBank::visits(const std::string& waypoint_id) const {
  auto it = index_.find(waypoint_id);
  return it == index_.end() ? std::vector<int>{} : it->second;
}

const MultimodalContext* MemoryBank::latest_context(const std::string& waypoint_id) const {
  for (auto it = contexts_.rbegin(); it != contexts_.rend(); ++it) {
    if (it->waypoint_id == waypoint_id) {
      return &*it;
    }
  }
  return nullptr;
}

std::optional<double> MemoryBank::latest_value(const std::string& waypoint_id) const {
  for (auto it = contexts_.rbegin(); it != contexts_.rend(); ++it) {
    auto vit = it->semantic_values.find(waypoint_id);
    if (vit != it->semantic_values.end()) {
      return vit->second;
    }
  }
  return std::nullopt;
}

std::vector<MemoryBank::PathEntry> MemoryBank::contexts_for_path(
    const std::vector<std::string>& path) const {
  std::vector<PathEntry> entries;
  entries.reserve(path.size());
  for (const auto& id : path) {
    PathEntry entry;
    entry.waypoint_id = id;
    entry.context = latest_context(id);
    entry.semantic_value = latest_value(id);
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::string reconstruct_trajectory(const MemoryBank& bank,
                                   const std::vector<std::string>& visited) {
  std::ostringstream out;
  for (std::size_t t = 0; t < visited.size(); ++t) {
    const MultimodalContext* context = bank.latest_context(visited[t]);
    if (context == nullptr) {
      throw ValidationError("no stored context for visited waypoint '" + visited[t] + "'");
    }
    if (t > 0) {
      out << "; ";
    }
    out << "Step " << t << ": " << (t == 0 ? "started at " : "moved to ") << visited[t];

    out << "; saw ";
    if (context->nearest_objects.empty()) {
      out << "nothing notable";
    } else {
      for (std::size_t i = 0; i < context->nearest_objects.size(); ++i) {
        if (i > 0) {
          out << ", ";
        }
        out << context->nearest_objects[i];
      }
    }

    if (!context->answers.empty()) {
      out << "; learned " << context->answers.front().substr(0, kAnswerExcerptChars);
    }
  }
  return out.str();
}

}  // namespace vln
