// savrl command line: train/evaluate fleet-relocation agents, re-emit
// reports from stored series, and run the verification suites.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "savrl/experiment.hpp"
#include "savrl/verify.hpp"

namespace fs = std::filesystem;
using namespace savrl;

namespace {

struct RunArgs {
  std::string agent = "dqn";
  std::string action_space = "four_nearest";
  std::string preset = "desk";
  std::string config_path;
  std::string scenario;
  std::string out_dir = "results";
  std::string aggregate = "mean";
  int iterations = -1;
  int runs = -1;
  std::vector<std::uint64_t> seeds;
  bool trace = false;
};

ExperimentConfig build_config(const RunArgs& args) {
  ExperimentConfig cfg = args.preset == "full" ? full_preset() : desk_preset();
  if (!args.config_path.empty()) cfg = load_experiment_config(args.config_path, cfg);
  if (args.agent != "all") cfg.agent = agent_kind_from_string(args.agent);
  cfg.mode = action_space_from_string(args.action_space);
  if (args.iterations > 0) cfg.iterations = args.iterations;
  if (args.runs > 0) cfg.runs = args.runs;
  if (!args.seeds.empty()) cfg.seeds = args.seeds;
  if (!args.scenario.empty()) cfg.scenario_path = args.scenario;
  cfg.out_dir = args.out_dir;
  cfg.trace = args.trace;
  cfg.aggregate = args.aggregate == "sum" ? Aggregate::kSum : Aggregate::kMean;
  // one seed per run: extend a short list deterministically
  while (cfg.seeds.size() < static_cast<std::size_t>(cfg.runs)) {
    cfg.seeds.push_back(cfg.seeds.empty() ? 101 : cfg.seeds.back() + 101);
  }
  cfg.seeds.resize(static_cast<std::size_t>(cfg.runs));
  return cfg;
}

ReportEntry run_one(ExperimentConfig cfg) {
  const auto runs = run_experiment(cfg);
  std::vector<std::vector<double>> rewards;
  for (const auto& series : runs) rewards.push_back(rewards_of(series));
  ReportEntry entry;
  entry.agent = to_string(cfg.agent);
  entry.action_space = cfg.label().substr(entry.agent.size() + 1);
  entry.rewards = max_of_runs(rewards);
  write_series_csv(cfg.out_dir + "/" + cfg.label() + "_final.csv", entry.rewards);
  std::printf("%-24s final reward %10.3f  (%d iterations, max of %d runs)\n",
              cfg.label().c_str(), entry.final_reward(), cfg.iterations, cfg.runs);
  return entry;
}

int cmd_run(const RunArgs& args) {
  const ExperimentConfig base = build_config(args);
  std::vector<ReportEntry> entries;
  if (args.agent == "all") {
    // the full comparison: every learned agent in both encodings, plus the
    // two baselines
    for (AgentKind kind : {AgentKind::kDqn, AgentKind::kDdqn, AgentKind::kReinforce}) {
      for (ActionSpaceMode mode : {ActionSpaceMode::kFourNearest, ActionSpaceMode::kNZone}) {
        ExperimentConfig cfg = base;
        cfg.agent = kind;
        cfg.mode = mode;
        entries.push_back(run_one(cfg));
      }
    }
    for (AgentKind kind : {AgentKind::kImbalance, AgentKind::kRandom}) {
      ExperimentConfig cfg = base;
      cfg.agent = kind;
      entries.push_back(run_one(cfg));
    }
  } else {
    entries.push_back(run_one(base));
  }
  const auto written = emit_report(entries, base.out_dir, base.aggregate);
  std::printf("report: %zu files under %s\n", written.size(), base.out_dir.c_str());
  return 0;
}

int cmd_report(const std::string& dir) {
  std::vector<ReportEntry> entries;
  const std::string suffix = "_final.csv";
  std::vector<std::string> paths;
  for (const auto& item : fs::directory_iterator(dir)) {
    const std::string name = item.path().filename().string();
    if (name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      paths.push_back(item.path().string());
    }
  }
  std::sort(paths.begin(), paths.end());
  for (const auto& path : paths) {
    std::string label = fs::path(path).filename().string();
    label.resize(label.size() - suffix.size());
    std::string agent = label, space = "n_zone";
    for (const char* mode : {"_four_nearest", "_n_zone"}) {
      const std::string m(mode);
      if (label.size() > m.size() &&
          label.compare(label.size() - m.size(), m.size(), m) == 0) {
        agent = label.substr(0, label.size() - m.size());
        space = m.substr(1);
      }
    }
    entries.push_back({agent, space, read_series_csv(path)});
  }
  if (entries.empty()) {
    std::fprintf(stderr, "no *_final.csv series found under %s\n", dir.c_str());
    return 1;
  }
  const auto written = emit_report(entries, dir);
  for (const auto& w : written) std::printf("wrote %s\n", w.c_str());
  return 0;
}

int cmd_verify(bool full, const std::string& out_dir) {
  verify::AcceptOptions options;
  options.include_slow = full;
  options.work_dir = out_dir;
  const auto results = verify::run_acceptance(options);
  const int failures = verify::print_results(results);
  if (failures > 0) std::printf("%d check(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SAV fleet relocation workbench"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "train or evaluate agents on the fleet simulator");
  run->add_option("--agent", run_args.agent,
                  "dqn | ddqn | reinforce | imbalance | random | all");
  run->add_option("--action-space", run_args.action_space, "four_nearest | n_zone");
  run->add_option("--preset", run_args.preset, "desk (30 iterations) | full (100 iterations)");
  run->add_option("--config", run_args.config_path, "key=value config file");
  run->add_option("--iterations", run_args.iterations, "training iterations (weeks)");
  run->add_option("--runs", run_args.runs, "independent runs (report takes the max)");
  run->add_option("--seed", run_args.seeds, "one seed per run (repeatable)");
  run->add_option("--scenario", run_args.scenario, "scenario file (default: built-in city)");
  run->add_option("--out", run_args.out_dir, "output directory");
  run->add_flag("--trace", run_args.trace, "write per-hour trace CSVs");
  run->add_option("--aggregate", run_args.aggregate, "iteration reward: mean | sum");

  std::string report_dir = "results";
  auto* report = app.add_subcommand("report", "re-emit summary and plots from stored series");
  report->add_option("--out", report_dir, "directory holding *_final.csv series");

  bool verify_full = false;
  std::string verify_dir = "acceptance_out";
  auto* verify_cmd = app.add_subcommand("verify", "run the oracle and property suites");
  verify_cmd->add_flag("--full", verify_full, "include the slow checks (bias batch, desk runs)");
  verify_cmd->add_option("--out", verify_dir, "work directory for artifacts");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (report->parsed()) return cmd_report(report_dir);
    if (verify_cmd->parsed()) return cmd_verify(verify_full, verify_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
