#include "savrl/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "savrl/parallel.hpp"

namespace savrl {

namespace fs = std::filesystem;

const char* to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::kDqn: return "dqn";
    case AgentKind::kDdqn: return "ddqn";
    case AgentKind::kReinforce: return "reinforce";
    case AgentKind::kImbalance: return "imbalance";
    case AgentKind::kRandom: return "random";
  }
  return "?";
}

AgentKind agent_kind_from_string(const std::string& s) {
  if (s == "dqn") return AgentKind::kDqn;
  if (s == "ddqn") return AgentKind::kDdqn;
  if (s == "reinforce") return AgentKind::kReinforce;
  if (s == "imbalance") return AgentKind::kImbalance;
  if (s == "random") return AgentKind::kRandom;
  throw std::invalid_argument("unknown agent kind: " + s);
}

namespace {

ActionSpaceMode effective_mode(const ExperimentConfig& cfg) {
  // The imbalance baseline emits n-zone directives by construction.
  return cfg.agent == AgentKind::kImbalance ? ActionSpaceMode::kNZone : cfg.mode;
}

}  // namespace

std::string ExperimentConfig::label() const {
  return std::string(to_string(agent)) + "_" + to_string(effective_mode(*this));
}

void validate_experiment_config(const ExperimentConfig& cfg) {
  if (cfg.runs < 1) throw std::invalid_argument("experiment: runs must be >= 1");
  if (cfg.iterations < 1) throw std::invalid_argument("experiment: iterations must be >= 1");
  if (cfg.seeds.size() != static_cast<std::size_t>(cfg.runs)) {
    throw std::invalid_argument("experiment: need exactly one seed per run");
  }
  validate_config(cfg.sim);
  validate_agent_config(cfg.agent_cfg);
}

ExperimentConfig desk_preset() {
  ExperimentConfig cfg;
  cfg.iterations = 30;
  cfg.runs = 2;
  cfg.seeds = {101, 202};
  return cfg;
}

ExperimentConfig full_preset() {
  ExperimentConfig cfg;
  cfg.iterations = 100;
  cfg.runs = 2;
  cfg.seeds = {101, 202};
  return cfg;
}

std::unique_ptr<FleetAgent> make_agent(AgentKind kind, const AgentConfig& cfg, int n_zones,
                                       ActionSpaceMode mode, std::uint64_t seed) {
  switch (kind) {
    case AgentKind::kDqn:
      return std::make_unique<DqnAgent>(cfg, n_zones, mode, seed, TdTargetKind::kDqn);
    case AgentKind::kDdqn:
      return std::make_unique<DqnAgent>(cfg, n_zones, mode, seed, TdTargetKind::kDdqn);
    case AgentKind::kReinforce:
      return std::make_unique<ReinforceAgent>(cfg, n_zones, mode, seed);
    case AgentKind::kImbalance:
      return std::make_unique<ImbalanceAgent>();
    case AgentKind::kRandom:
      return std::make_unique<RandomAgent>(n_zones, mode);
  }
  throw std::logic_error("make_agent: unreachable");
}

IterationRecord run_iteration(FleetAgent& agent, SavEnv& env, bool train, RngEngine& rng,
                              Aggregate aggregate) {
  EpisodeResult ep = run_episode(agent, env, train, rng);
  IterationRecord rec;
  rec.hourly.reserve(ep.trajectory.steps.size());
  for (const auto& step : ep.trajectory.steps) rec.hourly.push_back(step.reward);
  if (!rec.hourly.empty()) {
    double sum = 0.0;
    for (double r : rec.hourly) sum += r;
    rec.iteration_reward =
        aggregate == Aggregate::kMean ? sum / static_cast<double>(rec.hourly.size()) : sum;
  }
  rec.loss_mean = agent.mean_loss_last_episode();
  rec.epsilon = agent.current_epsilon();
  rec.infos = std::move(ep.infos);
  return rec;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void write_run_csv(const std::string& path, const RunSeries& series, int episode_steps) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write run CSV: " + path);
  out << "iteration,step,loss,epsilon,reward\n";
  for (const auto& rec : series) {
    out << rec.iteration << "," << (static_cast<long>(rec.iteration + 1) * episode_steps) << ","
        << fmt_double(rec.loss_mean) << "," << fmt_double(rec.epsilon) << ","
        << fmt_double(rec.iteration_reward) << "\n";
  }
}

void write_trace_csv(const std::string& path, const RunSeries& series) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace CSV: " + path);
  out << "iteration,step,cost_waiting,cost_gas,cost_parking,reward,queue_len,"
         "n_idle,n_parked,n_serving,n_relocating,served,abandoned,spawned\n";
  for (const auto& rec : series) {
    for (std::size_t h = 0; h < rec.hourly.size(); ++h) {
      const InfoMap& info = rec.infos[h];
      auto get = [&](const char* key) {
        auto it = info.find(key);
        return it == info.end() ? 0.0 : it->second;
      };
      out << rec.iteration << "," << h << "," << fmt_double(get("cost_waiting")) << ","
          << fmt_double(get("cost_gas")) << "," << fmt_double(get("cost_parking")) << ","
          << fmt_double(rec.hourly[h]) << "," << get("queue_len") << "," << get("n_idle") << ","
          << get("n_parked") << "," << get("n_serving") << "," << get("n_relocating") << ","
          << get("served") << "," << get("abandoned") << "," << get("spawned") << "\n";
    }
  }
}

}  // namespace

std::vector<RunSeries> run_experiment(const ExperimentConfig& cfg) {
  validate_experiment_config(cfg);
  const ZoneGrid grid = cfg.scenario_path.empty() ? default_city() : load_scenario(cfg.scenario_path);
  const ActionSpaceMode mode = effective_mode(cfg);
  const int n = grid.n_zones();

  if (!cfg.out_dir.empty()) fs::create_directories(cfg.out_dir);

  std::vector<RunSeries> results(static_cast<std::size_t>(cfg.runs));
  std::vector<std::string> errors(static_cast<std::size_t>(cfg.runs));
  parallel_for(cfg.runs, [&](std::int64_t r) {
    try {
      const std::uint64_t seed = cfg.seeds[static_cast<std::size_t>(r)];
      SimConfig sim = cfg.sim;
      sim.seed = derive_seed(seed, 1);
      sim.mode = mode;
      SavEnv env(grid, sim);
      auto agent = make_agent(cfg.agent, cfg.agent_cfg, n, mode, derive_seed(seed, 0));
      RngEngine explore_rng = make_rng(derive_seed(seed, 2));
      RunSeries series;
      series.reserve(static_cast<std::size_t>(cfg.iterations));
      for (int it = 0; it < cfg.iterations; ++it) {
        IterationRecord rec =
            run_iteration(*agent, env, agent->learns(), explore_rng, cfg.aggregate);
        rec.iteration = it;
        series.push_back(std::move(rec));
      }
      if (!cfg.out_dir.empty()) {
        const std::string base = cfg.out_dir + "/" + cfg.label() + "_run" + std::to_string(r);
        write_run_csv(base + ".csv", series, cfg.sim.episode_length);
        if (cfg.trace) write_trace_csv(base + "_trace.csv", series);
        if (agent->learns()) agent->save_checkpoint_to(base + ".ckpt");
      }
      results[static_cast<std::size_t>(r)] = std::move(series);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(r)] = e.what();
    }
  });
  for (std::size_t r = 0; r < errors.size(); ++r) {
    if (!errors[r].empty()) {
      throw std::runtime_error("run " + std::to_string(r) + " failed: " + errors[r]);
    }
  }
  if (!cfg.out_dir.empty()) {
    write_resolved_config(cfg.out_dir + "/" + cfg.label() + "_config.txt", cfg);
  }
  return results;
}

std::vector<double> rewards_of(const RunSeries& series) {
  std::vector<double> out;
  out.reserve(series.size());
  for (const auto& rec : series) out.push_back(rec.iteration_reward);
  return out;
}

std::vector<double> max_of_runs(const std::vector<std::vector<double>>& series_list) {
  if (series_list.empty()) throw std::invalid_argument("max_of_runs: no series");
  const std::size_t len = series_list.front().size();
  for (const auto& s : series_list) {
    if (s.size() != len) throw std::invalid_argument("max_of_runs: series length mismatch");
  }
  std::vector<double> out(series_list.front());
  for (std::size_t k = 1; k < series_list.size(); ++k) {
    for (std::size_t i = 0; i < len; ++i) out[i] = std::max(out[i], series_list[k][i]);
  }
  return out;
}

double improvement_percent(double reward_a, double reward_b) {
  if (reward_a == 0.0) throw std::invalid_argument("improvement_percent: zero reference");
  return (std::abs(reward_a) - std::abs(reward_b)) / std::abs(reward_a) * 100.0;
}

void write_series_csv(const std::string& path, const std::vector<double>& rewards) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write series CSV: " + path);
  out << "iteration,reward\n";
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    out << i << "," << fmt_double(rewards[i]) << "\n";
  }
}

std::vector<double> read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open series CSV: " + path);
  std::vector<double> out;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("malformed series CSV: " + path);
    out.push_back(std::stod(line.substr(comma + 1)));
  }
  return out;
}

namespace {

std::string two_decimals(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#8c564b"};

std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

void write_line_plot(const std::string& path, const std::string& title,
                     const std::vector<std::pair<std::string, std::vector<double>>>& series,
                     const std::string& y_label) {
  const double width = 720, height = 440;
  const double ml = 70, mr = 180, mt = 40, mb = 50;
  double lo = 0.0, hi = 1.0;
  std::size_t max_len = 1;
  bool first = true;
  for (const auto& [label, ys] : series) {
    for (double y : ys) {
      if (first) {
        lo = hi = y;
        first = false;
      }
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
    max_len = std::max(max_len, ys.size());
  }
  if (hi - lo < 1e-12) {
    hi += 1.0;
    lo -= 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  const double plot_w = width - ml - mr;
  const double plot_h = height - mt - mb;
  auto sx = [&](double i) {
    return ml + (max_len > 1 ? i / static_cast<double>(max_len - 1) : 0.5) * plot_w;
  };
  auto sy = [&](double y) { return mt + (hi - y) / (hi - lo) * plot_h; };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write plot: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << width << " " << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << ml << "\" y=\"22\" font-size=\"15\">" << title << "</text>\n";
  // axes
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << (mt + plot_h) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << (mt + plot_h) << "\" x2=\"" << (ml + plot_w)
      << "\" y2=\"" << (mt + plot_h) << "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double y = lo + (hi - lo) * tick / 4.0;
    out << "<text x=\"" << (ml - 6) << "\" y=\"" << svg_num(sy(y) + 4)
        << "\" text-anchor=\"end\">" << two_decimals(y) << "</text>\n";
    out << "<line x1=\"" << (ml - 4) << "\" y1=\"" << svg_num(sy(y)) << "\" x2=\"" << ml
        << "\" y2=\"" << svg_num(sy(y)) << "\" stroke=\"black\"/>\n";
  }
  for (int tick = 0; tick <= 4; ++tick) {
    const double i = (max_len - 1) * tick / 4.0;
    out << "<text x=\"" << svg_num(sx(i)) << "\" y=\"" << (mt + plot_h + 18)
        << "\" text-anchor=\"middle\">" << static_cast<int>(i) << "</text>\n";
  }
  out << "<text x=\"" << (ml + plot_w / 2) << "\" y=\"" << (height - 12)
      << "\" text-anchor=\"middle\">iteration</text>\n";
  out << "<text x=\"18\" y=\"" << (mt + plot_h / 2) << "\" transform=\"rotate(-90 18 "
      << (mt + plot_h / 2) << ")\" text-anchor=\"middle\">" << y_label << "</text>\n";
  int color_idx = 0;
  for (const auto& [label, ys] : series) {
    const char* color = kPalette[color_idx % 6];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < ys.size(); ++i) {
      out << svg_num(sx(static_cast<double>(i))) << "," << svg_num(sy(ys[i]));
      if (i + 1 < ys.size()) out << " ";
    }
    out << "\"/>\n";
    const double ly = mt + 14 + 18 * color_idx;
    out << "<line x1=\"" << (ml + plot_w + 10) << "\" y1=\"" << ly << "\" x2=\""
        << (ml + plot_w + 34) << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"/>\n";
    out << "<text x=\"" << (ml + plot_w + 40) << "\" y=\"" << (ly + 4) << "\">" << label
        << "</text>\n";
    ++color_idx;
  }
  out << "</svg>\n";
}

}  // namespace

std::vector<std::string> emit_report(const std::vector<ReportEntry>& entries,
                                     const std::string& out_dir, Aggregate aggregate) {
  if (entries.empty()) throw std::invalid_argument("emit_report: no series");
  fs::create_directories(out_dir);
  std::vector<std::string> written;

  for (const auto& e : entries) {
    const std::string path = out_dir + "/" + e.agent + "_" + e.action_space + ".csv";
    write_series_csv(path, e.rewards);
    written.push_back(path);
  }

  auto find_entry = [&](const std::string& agent, const std::string& space) -> const ReportEntry* {
    for (const auto& e : entries) {
      if (e.agent == agent && e.action_space == space) return &e;
    }
    return nullptr;
  };

  const std::string summary_path = out_dir + "/summary.csv";
  std::ofstream summary(summary_path);
  if (!summary) throw std::runtime_error("cannot write summary: " + summary_path);
  summary << "# final iteration reward per agent; aggregation="
          << (aggregate == Aggregate::kMean ? "mean" : "sum") << " of hourly rewards\n";
  summary << "agent,action_space,final_reward\n";
  for (const auto& e : entries) {
    summary << e.agent << "," << e.action_space << "," << fmt_double(e.final_reward()) << "\n";
  }
  // one improvement row per comparable pair
  std::vector<std::string> seen;
  for (const auto& e : entries) {
    if (std::find(seen.begin(), seen.end(), e.agent) != seen.end()) continue;
    seen.push_back(e.agent);
    const ReportEntry* nz = find_entry(e.agent, "n_zone");
    const ReportEntry* fn = find_entry(e.agent, "four_nearest");
    if (nz && fn) {
      summary << e.agent << ",improvement_percent,"
              << two_decimals(improvement_percent(nz->final_reward(), fn->final_reward()))
              << "\n";
    }
  }
  const ReportEntry* imbalance = find_entry("imbalance", "n_zone");
  if (imbalance) {
    for (const auto& e : entries) {
      if (e.agent == "imbalance" || e.agent == "random") continue;
      if (e.action_space != "four_nearest") continue;
      summary << e.agent << "_vs_imbalance,improvement_percent,"
              << two_decimals(improvement_percent(imbalance->final_reward(), e.final_reward()))
              << "\n";
    }
  }
  summary.close();
  written.push_back(summary_path);

  // one plot per action-space comparison, one against the baseline
  for (const auto& agent : seen) {
    const ReportEntry* nz = find_entry(agent, "n_zone");
    const ReportEntry* fn = find_entry(agent, "four_nearest");
    if (nz && fn) {
      const std::string path = out_dir + "/plot_" + agent + "_action_spaces.svg";
      write_line_plot(path, agent + ": n-zone vs 4-nearest",
                      {{agent + " n-zone", nz->rewards}, {agent + " 4-nearest", fn->rewards}},
                      "iteration reward");
      written.push_back(path);
    }
  }
  if (imbalance) {
    std::vector<std::pair<std::string, std::vector<double>>> series;
    series.push_back({"imbalance", imbalance->rewards});
    for (const auto& e : entries) {
      if (e.agent == "imbalance" || e.agent == "random") continue;
      if (e.action_space != "four_nearest") continue;
      series.push_back({e.agent, e.rewards});
    }
    if (series.size() > 1) {
      const std::string path = out_dir + "/plot_vs_imbalance.svg";
      write_line_plot(path, "imbalance baseline vs learned agents", series, "iteration reward");
      written.push_back(path);
    }
  }
  return written;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key == "agent") base.agent = agent_kind_from_string(value);
    else if (key == "action_space") base.mode = action_space_from_string(value);
    else if (key == "iterations") base.iterations = std::stoi(value);
    else if (key == "runs") base.runs = std::stoi(value);
    else if (key == "seeds") {
      base.seeds.clear();
      std::istringstream ss(value);
      std::string tok;
      while (std::getline(ss, tok, ',')) base.seeds.push_back(std::stoull(trim(tok)));
    } else if (key == "fleet_size") base.sim.fleet_size = std::stoi(value);
    else if (key == "gas_price") base.sim.gas_price = std::stod(value);
    else if (key == "demand_scale") base.sim.demand_scale = std::stod(value);
    else if (key == "episode_length") base.sim.episode_length = std::stoi(value);
    else if (key == "matching_radius_hops") base.sim.matching_radius_hops = std::stod(value);
    else if (key == "gamma") base.agent_cfg.gamma = std::stod(value);
    else if (key == "eta") base.agent_cfg.eta = std::stod(value);
    else if (key == "alpha") base.agent_cfg.alpha = std::stod(value);
    else if (key == "epsilon_start") base.agent_cfg.epsilon_start = std::stod(value);
    else if (key == "epsilon_floor") base.agent_cfg.epsilon_floor = std::stod(value);
    else if (key == "epsilon_decay_steps") base.agent_cfg.epsilon_decay_steps = std::stol(value);
    else if (key == "buffer_capacity") base.agent_cfg.buffer_capacity = std::stoul(value);
    else if (key == "batch_size") base.agent_cfg.batch_size = std::stoul(value);
    else if (key == "target_sync_interval") base.agent_cfg.target_sync_interval = std::stol(value);
    else if (key == "hidden_size") base.agent_cfg.hidden_size = std::stoi(value);
    else if (key == "return_from_current") base.agent_cfg.return_from_current = value == "1" || value == "true";
    else if (key == "reinforce_baseline") base.agent_cfg.reinforce_baseline = value == "1" || value == "true";
    else if (key == "normalize_rewards") base.agent_cfg.normalize_rewards = value == "1" || value == "true";
    else if (key == "scenario") base.scenario_path = value;
    else if (key == "out_dir") base.out_dir = value;
    else if (key == "trace") base.trace = value == "1" || value == "true";
    else if (key == "aggregate") base.aggregate = value == "sum" ? Aggregate::kSum : Aggregate::kMean;
    else throw std::runtime_error(path + ":" + std::to_string(line_no) + ": unknown key " + key);
  }
  return base;
}

void write_resolved_config(const std::string& path, const ExperimentConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config: " + path);
  out << "# resolved experiment configuration\n";
  out << "agent=" << to_string(cfg.agent) << "\n";
  out << "action_space=" << to_string(effective_mode(cfg)) << "\n";
  out << "iterations=" << cfg.iterations << "\n";
  out << "runs=" << cfg.runs << "\n";
  out << "seeds=";
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
    out << cfg.seeds[i] << (i + 1 < cfg.seeds.size() ? "," : "");
  }
  out << "\n";
  out << "fleet_size=" << cfg.sim.fleet_size << "\n";
  out << "gas_price=" << fmt_double(cfg.sim.gas_price) << "\n";
  out << "demand_scale=" << fmt_double(cfg.sim.demand_scale) << "\n";
  out << "episode_length=" << cfg.sim.episode_length << "\n";
  out << "matching_radius_hops=" << fmt_double(cfg.sim.matching_radius_hops) << "\n";
  out << "gamma=" << fmt_double(cfg.agent_cfg.gamma) << "\n";
  out << "eta=" << fmt_double(cfg.agent_cfg.eta) << "\n";
  out << "alpha=" << fmt_double(cfg.agent_cfg.alpha) << "\n";
  out << "epsilon_start=" << fmt_double(cfg.agent_cfg.epsilon_start) << "\n";
  out << "epsilon_floor=" << fmt_double(cfg.agent_cfg.epsilon_floor) << "\n";
  out << "epsilon_decay_steps=" << cfg.agent_cfg.epsilon_decay_steps << "\n";
  out << "buffer_capacity=" << cfg.agent_cfg.buffer_capacity << "\n";
  out << "batch_size=" << cfg.agent_cfg.batch_size << "\n";
  out << "target_sync_interval=" << cfg.agent_cfg.target_sync_interval << "\n";
  out << "hidden_size=" << cfg.agent_cfg.hidden_size << "\n";
  out << "return_from_current=" << (cfg.agent_cfg.return_from_current ? 1 : 0) << "\n";
  out << "reinforce_baseline=" << (cfg.agent_cfg.reinforce_baseline ? 1 : 0) << "\n";
  out << "normalize_rewards=" << (cfg.agent_cfg.normalize_rewards ? 1 : 0) << "\n";
  out << "scenario=" << cfg.scenario_path << "\n";
  out << "out_dir=" << cfg.out_dir << "\n";
  out << "trace=" << (cfg.trace ? 1 : 0) << "\n";
  out << "aggregate=" << (cfg.aggregate == Aggregate::kMean ? "mean" : "sum") << "\n";
}

}  // namespace savrl
