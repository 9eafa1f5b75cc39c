#include "vln/benchmark.hpp"

#include <cstdio>
#include <future>
#include <memory>
#include <sstream>

#include "json.hpp"

#include "vln/errors.hpp"
#include "vln/oracle_agents.hpp"

namespace vln {

const MetricsReport* BenchmarkReport::find(WorldProfile profile,
                                           const std::string& config_name) const {
  for (const auto& row : rows) {
    if (row.profile != profile) {
      continue;
    }
    for (const auto& cell : row.cells) {
      if (cell.config_name == config_name) {
        return &cell.report;
      }
    }
  }
  return nullptr;
}

RunConfig apply_ablation(RunConfig base, const std::string& name) {
  if (name == "full") {
    return base;
  }
  if (name == "no-bd-mcts" || name == "no_bd_mcts") {
    base.enable_bd_mcts = false;
    return base;
  }
  if (name == "no-pp" || name == "no_pp") {
    base.enable_pp = false;
    return base;
  }
  throw ConfigError("unknown ablation '" + name + "'");
}

namespace {

struct Job {
  WorldProfile profile;
  std::uint64_t seed;
  RunConfig config;
};

struct JobResult {
  EpisodeTrace trace;
  Episode episode;
};

JobResult run_job(const Job& job) {
  auto world = std::make_shared<const WorldSpec>(generate_world(job.seed, job.profile));
  JobResult result;
  result.episode = episode_from_world(*world);
  const AgentBackends backends = make_oracle_backends(world, job.config.panorama);
  result.trace = run_episode(result.episode, backends, job.config);
  return result;
}

}  // namespace

BenchmarkReport run_benchmark(const BenchmarkConfig& config) {
  BenchmarkReport report;
  if (config.seed_end < config.seed_begin) {
    return report;
  }

  for (const auto profile : config.profiles) {
    BenchmarkRow row;
    row.profile = profile;
    for (const auto& name : config.matrix) {
      const RunConfig run_config = apply_ablation(config.base, name);
      std::vector<Job> jobs;
      for (std::uint64_t seed = config.seed_begin; seed <= config.seed_end; ++seed) {
        jobs.push_back(Job{profile, seed, run_config});
      }

      std::vector<JobResult> results(jobs.size());
      if (config.workers > 1) {
        std::vector<std::future<JobResult>> futures;
        futures.reserve(jobs.size());
        for (const auto& job : jobs) {
          futures.push_back(std::async(std::launch::async, run_job, job));
        }
        for (std::size_t i = 0; i < futures.size(); ++i) {
          results[i] = futures[i].get();
        }
      } else {
        for (std::size_t i = 0; i < jobs.size(); ++i) {
          results[i] = run_job(jobs[i]);
        }
      }

      std::vector<EpisodeTrace> traces;
      std::vector<Episode> episodes;
      traces.reserve(results.size());
      episodes.reserve(results.size());
      for (auto& r : results) {
        traces.push_back(std::move(r.trace));
        episodes.push_back(std::move(r.episode));
      }
      row.cells.push_back(BenchmarkCell{name, compute_metrics(traces, episodes)});
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string benchmark_to_json(const BenchmarkReport& report) {
  nlohmann::ordered_json out;
  out["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json r;
    r["profile"] = profile_name(row.profile);
    r["configs"] = nlohmann::ordered_json::array();
    const MetricsReport* full = nullptr;
    for (const auto& cell : row.cells) {
      if (cell.config_name == "full") {
        full = &cell.report;
      }
    }
    for (const auto& cell : row.cells) {
      nlohmann::ordered_json c;
      c["name"] = cell.config_name;
      c["episodes"] = cell.report.episodes.size();
      c["NE"] = cell.report.ne_mean;
      c["SR"] = cell.report.sr_percent;
      c["OSR"] = cell.report.osr_percent;
      c["SPL"] = cell.report.spl_percent;
      if (full != nullptr && cell.config_name != "full") {
        c["delta_SR"] = full->sr_percent - cell.report.sr_percent;
        c["delta_OSR"] = full->osr_percent - cell.report.osr_percent;
        c["delta_SPL"] = full->spl_percent - cell.report.spl_percent;
      }
      r["configs"].push_back(std::move(c));
    }
    out["rows"].push_back(std::move(r));
  }
  return out.dump(2) + "\n";
}

std::string render_benchmark_table(const BenchmarkReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-16s %-12s %8s %8s %8s %8s\n", "profile", "config", "NE",
                "OSR", "SR", "SPL");
  out << line;
  out << std::string(64, '-') << "\n";
  for (const auto& row : report.rows) {
    for (const auto& cell : row.cells) {
      std::snprintf(line, sizeof(line), "%-16s %-12s %8.2f %8.1f %8.1f %8.1f\n",
                    profile_name(row.profile).c_str(), cell.config_name.c_str(),
                    cell.report.ne_mean, cell.report.osr_percent, cell.report.sr_percent,
                    cell.report.spl_percent);
      out << line;
    }
  }
  return out.str();
}

}  // namespace vln
