#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "savrl/agents.hpp"
#include "savrl/sim.hpp"

namespace savrl {

enum class AgentKind { kDqn, kDdqn, kReinforce, kImbalance, kRandom };

const char* to_string(AgentKind kind);
AgentKind agent_kind_from_string(const std::string& s);

enum class Aggregate { kMean, kSum };

struct ExperimentConfig {
  AgentKind agent = AgentKind::kDqn;
  ActionSpaceMode mode = ActionSpaceMode::kFourNearest;
  int iterations = 100;
  int runs = 2;
  std::vector<std::uint64_t> seeds;  // one per run
  SimConfig sim;
  AgentConfig agent_cfg;
  std::string scenario_path;  // empty: the built-in city
  std::string out_dir;
  bool trace = false;
  Aggregate aggregate = Aggregate::kMean;

  // e.g. "dqn_four_nearest"; used for output file names and report rows.
  std::string label() const;
};

// Throws std::invalid_argument on broken fields (runs >= 1, one seed per run).
void validate_experiment_config(const ExperimentConfig& cfg);

// Desk-scale: 30 iterations, everything else at defaults; finishes all five
// agents in minutes. Full mirrors the reported protocol (100 iterations,
// max of two runs).
ExperimentConfig desk_preset();
ExperimentConfig full_preset();

struct IterationRecord {
  int iteration = 0;
  std::vector<double> hourly;      // one reward per hour
  double iteration_reward = 0.0;   // mean (default) or sum of hourly
  double loss_mean = 0.0;
  double epsilon = 0.0;
  std::vector<InfoMap> infos;      // per-hour diagnostics, kept for --trace
};

using RunSeries = std::vector<IterationRecord>;

std::unique_ptr<FleetAgent> make_agent(AgentKind kind, const AgentConfig& cfg, int n_zones,
                                       ActionSpaceMode mode, std::uint64_t seed);

// One full episode; the agent trains in place when train is set.
IterationRecord run_iteration(FleetAgent& agent, SavEnv& env, bool train, RngEngine& rng,
                              Aggregate aggregate = Aggregate::kMean);

// One fresh (agent, env) pair per seed, `iterations` sequential training
// episodes each. Runs execute in parallel worker slots; per-run CSVs, traces
// and the resolved config land in cfg.out_dir when it is set.
std::vector<RunSeries> run_experiment(const ExperimentConfig& cfg);

// Elementwise max of iteration rewards across runs.
std::vector<double> max_of_runs(const std::vector<std::vector<double>>& series_list);
std::vector<double> rewards_of(const RunSeries& series);

// Cost reduction of b relative to a, in percent: (|a| - |b|) / |a| * 100.
double improvement_percent(double reward_a, double reward_b);

// A labeled final series for reporting.
struct ReportEntry {
  std::string agent;
  std::string action_space;
  std::vector<double> rewards;

  double final_reward() const { return rewards.empty() ? 0.0 : rewards.back(); }
};

// Writes one (iteration, reward) CSV per entry, a summary CSV with a final
// reward row per entry plus an improvement row per comparable pair (same
// agent across the two action spaces; each learned agent against the
// imbalance baseline), and one reward-vs-iteration SVG per comparison.
// Returns the paths written.
std::vector<std::string> emit_report(const std::vector<ReportEntry>& entries,
                                     const std::string& out_dir,
                                     Aggregate aggregate = Aggregate::kMean);

// (iteration, reward) round-trip helpers. Doubles are printed with 17
// significant digits so parsing reproduces the values exactly.
void write_series_csv(const std::string& path, const std::vector<double>& rewards);
std::vector<double> read_series_csv(const std::string& path);

// Flat key=value config file with CLI overrides; unknown keys are an error.
ExperimentConfig load_experiment_config(const std::string& path, ExperimentConfig base);
void write_resolved_config(const std::string& path, const ExperimentConfig& cfg);

std::string fmt_double(double v);  // shortest round-trip decimal form

}  // namespace savrl
