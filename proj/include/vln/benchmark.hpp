#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vln/episode_runner.hpp"
#include "vln/metrics.hpp"
#include "vln/world.hpp"

namespace vln {

struct BenchmarkConfig {
  std::vector<WorldProfile> profiles;
  std::uint64_t seed_begin = 0;
  std::uint64_t seed_end = 99;            // inclusive
  std::vector<std::string> matrix = {"full", "no-bd-mcts", "no-pp"};
  RunConfig base;
  int workers = 1;
};

struct BenchmarkCell {
  std::string config_name;
  MetricsReport report;
};

struct BenchmarkRow {
  WorldProfile profile = WorldProfile::kCorridor;
  std::vector<BenchmarkCell> cells;
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;

  [[nodiscard]] const MetricsReport* find(WorldProfile profile,
                                          const std::string& config_name) const;
};

// Applies an ablation name ("full", "no-bd-mcts", "no-pp") to a base config.
[[nodiscard]] RunConfig apply_ablation(RunConfig base, const std::string& name);

// Oracle-backed sweep over profiles x seeds x config matrix. Episodes are
// independent; with workers > 1 they run in parallel and results are
// aggregated in seed order, so reports stay deterministic.
[[nodiscard]] BenchmarkReport run_benchmark(const BenchmarkConfig& config);

[[nodiscard]] std::string benchmark_to_json(const BenchmarkReport& report);
[[nodiscard]] std::string render_benchmark_table(const BenchmarkReport& report);

}  // namespace vln
