#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "vln/benchmark.hpp"
#include "vln/config.hpp"
#include "vln/errors.hpp"
#include "vln/http_agents.hpp"
#include "vln/json_io.hpp"
#include "vln/metrics.hpp"
#include "vln/oracle_agents.hpp"
#include "vln/prompts.hpp"
#include "vln/world.hpp"

namespace {

namespace fs = std::filesystem;

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    const auto comma = text.find(',', begin);
    const auto end = (comma == std::string::npos) ? text.size() : comma;
    if (end > begin) {
      out.push_back(text.substr(begin, end - begin));
    }
    if (comma == std::string::npos) {
      break;
    }
    begin = comma + 1;
  }
  return out;
}

// Accepts "A..B" (inclusive) or a single "N".
std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    const std::uint64_t v = std::stoull(text);
    return {v, v};
  }
  return {std::stoull(text.substr(0, dots)), std::stoull(text.substr(dots + 2))};
}

// "--world" accepts a JSON file path, "seed:profile", or a bare profile name.
vln::WorldSpec resolve_world(const std::string& spec, std::uint64_t fallback_seed,
                             const std::string& connectivity) {
  if (fs::exists(spec)) {
    const std::string text = vln::read_text_file(spec);
    if (text.find("\"scan\"") != std::string::npos &&
        text.find("\"path\"") != std::string::npos) {
      if (connectivity.empty()) {
        throw vln::ConfigError("R2R record requires --connectivity <graph.json>");
      }
      const vln::Episode episode =
          vln::episode_from_r2r(text, vln::read_text_file(connectivity));
      vln::WorldSpec world;
      world.graph = episode.graph;
      world.start_id = episode.start_id;
      world.goal_id = episode.goal_id;
      world.instruction = episode.instruction;
      world.success_radius = episode.success_radius;
      world.max_steps = episode.max_steps;
      world.diameter = vln::graph_diameter(world.graph);
      return world;
    }
    return vln::load_world_file(spec);
  }
  const auto colon = spec.find(':');
  if (colon != std::string::npos) {
    return vln::generate_world(std::stoull(spec.substr(0, colon)),
                               vln::parse_profile(spec.substr(colon + 1)));
  }
  return vln::generate_world(fallback_seed, vln::parse_profile(spec));
}

int cmd_run(const std::string& world_spec, const std::string& backend_name,
            const std::string& config_path, bool no_bd_mcts, bool no_pp, double lambda_override,
            int topk_override, std::uint64_t seed, const std::string& out_path,
            const std::string& connectivity, const std::string& export_world) {
  vln::AppConfig app;
  if (!config_path.empty()) {
    app = vln::app_config_from(vln::KeyValueConfig::load(config_path));
  }
  if (!backend_name.empty()) {
    app.backend = backend_name;
  }
  if (no_bd_mcts) {
    app.run.enable_bd_mcts = false;
  }
  if (no_pp) {
    app.run.enable_pp = false;
  }
  if (lambda_override >= 0.0) {
    app.run.lambda = lambda_override;
  }
  if (topk_override > 0) {
    app.run.top_k = topk_override;
  }

  auto world = std::make_shared<const vln::WorldSpec>(
      resolve_world(world_spec, seed, connectivity));
  if (!export_world.empty()) {
    vln::write_text_file(export_world, vln::world_to_json(*world));
  }
  const vln::Episode episode = vln::episode_from_world(*world);

  vln::CallLog log;
  vln::AgentBackends backends;
  if (app.backend == "oracle") {
    backends = vln::make_oracle_backends(world, app.run.panorama);
  } else if (app.backend == "http") {
    const vln::PromptSet prompts =
        app.prompts_dir.empty() ? vln::default_prompts() : vln::load_prompts(app.prompts_dir);
    auto scan = std::make_shared<vln::OracleScanBackend>(world, app.run.panorama);
    backends = vln::make_http_backends(app.endpoint, prompts, scan, &log);
  } else {
    throw vln::ConfigError("unknown backend '" + app.backend + "'");
  }

  const vln::EpisodeTrace trace = vln::run_episode(episode, backends, app.run, &log);
  if (!out_path.empty()) {
    vln::write_text_file(out_path, vln::trace_to_jsonl(trace));
  }

  const vln::MetricsReport report = vln::compute_metrics({trace}, {episode});
  std::printf("final=%s steps=%d path=%.2fm termination=%s\n",
              trace.summary.final_waypoint.c_str(), trace.summary.steps,
              trace.summary.path_length, trace.summary.termination.c_str());
  std::printf("NE=%.2fm SR=%.0f%% OSR=%.0f%% SPL=%.1f%%\n", report.ne_mean, report.sr_percent,
              report.osr_percent, report.spl_percent);
  return 0;
}

int cmd_bench(const std::string& profiles_csv, const std::string& seeds_range,
              const std::string& matrix_csv, const std::string& report_path,
              const std::string& config_path, int workers) {
  vln::AppConfig app;
  if (!config_path.empty()) {
    app = vln::app_config_from(vln::KeyValueConfig::load(config_path));
  }
  vln::BenchmarkConfig bench;
  for (const auto& name : split_csv(profiles_csv)) {
    bench.profiles.push_back(vln::parse_profile(name));
  }
  std::tie(bench.seed_begin, bench.seed_end) = parse_seed_range(seeds_range);
  if (!matrix_csv.empty()) {
    bench.matrix = split_csv(matrix_csv);
  }
  bench.base = app.run;
  bench.workers = (workers > 0) ? workers : app.workers;

  const vln::BenchmarkReport report = vln::run_benchmark(bench);
  std::cout << vln::render_benchmark_table(report);
  if (!report_path.empty()) {
    vln::write_text_file(report_path, vln::benchmark_to_json(report));
    std::cout << "report written to " << report_path << "\n";
  }
  return 0;
}

int cmd_metrics(const std::string& traces_dir, const std::string& episodes_dir) {
  std::vector<fs::path> trace_files;
  for (const auto& entry : fs::directory_iterator(traces_dir)) {
    if (entry.path().extension() == ".jsonl") {
      trace_files.push_back(entry.path());
    }
  }
  std::sort(trace_files.begin(), trace_files.end());
  if (trace_files.empty()) {
    throw vln::ValidationError("no .jsonl traces found in '" + traces_dir + "'");
  }

  std::vector<vln::EpisodeTrace> traces;
  std::vector<vln::Episode> episodes;
  for (const auto& trace_path : trace_files) {
    const fs::path episode_path =
        fs::path(episodes_dir) / (trace_path.stem().string() + ".json");
    if (!fs::exists(episode_path)) {
      throw vln::ValidationError("no episode file for trace '" + trace_path.string() + "'");
    }
    traces.push_back(vln::trace_from_jsonl(vln::read_text_file(trace_path.string())));
    const std::string text = vln::read_text_file(episode_path.string());
    if (text.find("\"objects\"") != std::string::npos) {
      episodes.push_back(vln::episode_from_world(vln::world_from_json(text)));
    } else {
      episodes.push_back(vln::episode_from_json(text));
    }
  }
  std::cout << vln::metrics_to_json(vln::compute_metrics(traces, episodes));
  return 0;
}

int cmd_gen(std::uint64_t seed, const std::string& profile, const std::string& out_path) {
  const vln::WorldSpec world = vln::generate_world(seed, vln::parse_profile(profile));
  const std::string json = vln::world_to_json(world);
  if (out_path.empty()) {
    std::cout << json;
  } else {
    vln::write_text_file(out_path, json);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Waypoint navigation pipeline: semantic mapping, a closed "
               "perception-reasoning loop, and branch-diverse tree search"};
  app.require_subcommand(1);

  // run
  std::string world_spec;
  std::string backend;
  std::string config_path;
  bool no_bd_mcts = false;
  bool no_pp = false;
  double lambda_override = -1.0;
  int topk_override = 0;
  std::uint64_t seed = 0;
  std::string out_path;
  std::string connectivity;
  std::string export_world;
  auto* run = app.add_subcommand("run", "Run one episode");
  run->add_option("--world", world_spec, "World JSON file, 'seed:profile', or profile name")
      ->required();
  run->add_option("--backend", backend, "oracle | http");
  run->add_option("--config", config_path, "Key/value config file");
  run->add_flag("--no-bd-mcts", no_bd_mcts, "Disable focused top-k reasoning");
  run->add_flag("--no-pp", no_pp, "Disable the proactive perception loop");
  run->add_option("--lambda", lambda_override, "Distance penalty strength");
  run->add_option("--topk", topk_override, "Top-k candidate count");
  run->add_option("--seed", seed, "World seed when --world names a profile");
  run->add_option("--out", out_path, "Trace JSONL output path");
  run->add_option("--connectivity", connectivity, "Sidecar graph for R2R records");
  run->add_option("--export-world", export_world, "Write the resolved world JSON");

  // bench
  std::string profiles_csv = "corridor,trap";
  std::string seeds_range = "0..99";
  std::string matrix_csv = "full,no-bd-mcts,no-pp";
  std::string report_path;
  int workers = 0;
  auto* bench = app.add_subcommand("bench", "Sweep profiles x seeds x config matrix");
  bench->add_option("--profiles", profiles_csv, "Comma-separated profiles");
  bench->add_option("--seeds", seeds_range, "Seed range A..B (inclusive)");
  bench->add_option("--matrix", matrix_csv, "Comma-separated configs");
  bench->add_option("--report", report_path, "Write machine-readable report JSON");
  bench->add_option("--config", config_path, "Key/value config file");
  bench->add_option("--workers", workers, "Parallel episode workers");

  // metrics
  std::string traces_dir;
  std::string episodes_dir;
  auto* metrics = app.add_subcommand("metrics", "Recompute metrics from trace files");
  metrics->add_option("--traces", traces_dir, "Directory of *.jsonl traces")->required();
  metrics->add_option("--episodes", episodes_dir, "Directory of matching episode JSON files")
      ->required();

  // gen
  std::uint64_t gen_seed = 0;
  std::string gen_profile = "corridor";
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Generate a world JSON");
  gen->add_option("--seed", gen_seed, "World seed");
  gen->add_option("--profile", gen_profile, "World profile");
  gen->add_option("--out", gen_out, "Output path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(world_spec, backend, config_path, no_bd_mcts, no_pp, lambda_override,
                     topk_override, seed, out_path, connectivity, export_world);
    }
    if (bench->parsed()) {
      return cmd_bench(profiles_csv, seeds_range, matrix_csv, report_path, config_path, workers);
    }
    if (metrics->parsed()) {
      return cmd_metrics(traces_dir, episodes_dir);
    }
    if (gen->parsed()) {
      return cmd_gen(gen_seed, gen_profile, gen_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
