#pragma once

#include <string>
#include <vector>

#include "savrl/mdp.hpp"

namespace savrl {

struct ValueTable {
  std::vector<double> v;
};

struct QTable {
  int n_states = 0;
  int n_actions = 0;
  std::vector<double> q;

  QTable() = default;
  QTable(int ns, int na)
      : n_states(ns), n_actions(na), q(static_cast<std::size_t>(ns) * na, 0.0) {}
  double& at(int s, int a) { return q[static_cast<std::size_t>(s) * n_actions + a]; }
  double at(int s, int a) const { return q[static_cast<std::size_t>(s) * n_actions + a]; }
};

using Policy = std::vector<int>;  // one action per state

// R(s,a) = sum_{s'} P(s'|s,a) * reward(s,a,s').
double expected_reward(const TabularMDP& mdp, int s, int a);

// One synchronous Bellman optimality sweep: v_out[s] = max_a backup(s,a).
// Each state's backup reads only v_in, so the parallel sweep is bit-identical
// to the serial reference.
void bellman_sweep_serial(const TabularMDP& mdp, const std::vector<double>& v_in,
                          std::vector<double>& v_out);
void bellman_sweep(const TabularMDP& mdp, const std::vector<double>& v_in,
                   std::vector<double>& v_out);

// max_s |v[s] - max_a backup(s,a)|.
double bellman_residual(const TabularMDP& mdp, const std::vector<double>& v);

// Greedy one-step-lookahead policy; ties break to the lowest action index.
Policy greedy_from_values(const TabularMDP& mdp, const std::vector<double>& v);
QTable q_from_values(const TabularMDP& mdp, const std::vector<double>& v);

struct ViResult {
  ValueTable values;
  Policy policy;
  int sweeps = 0;
};

// Sweeps until the sup-norm change drops below epsilon.
ViResult value_iteration(const TabularMDP& mdp, double epsilon = 1e-3);

// Alternates policy evaluation (to epsilon) with greedy improvement until
// the policy is stable.
ViResult policy_iteration(const TabularMDP& mdp, double epsilon = 1e-3);

struct McResult {
  ValueTable values;
  std::vector<long> visit_counts;  // zero marks a state never visited
  long truncated_episodes = 0;
};

// Monte Carlo policy evaluation over episodes sampled from env under a fixed
// policy. step_cap <= 0 defaults to 10 * n_states per episode; episodes that
// hit the cap are truncated and counted, not fatal.
McResult mc_first_visit(Env<int, int>& env, int n_states, const Policy& policy,
                        long episodes, double gamma, RngEngine& rng, long step_cap = 0);
McResult mc_every_visit(Env<int, int>& env, int n_states, const Policy& policy,
                        long episodes, double gamma, RngEngine& rng, long step_cap = 0);

// Linear decay from start to floor across decay_span episodes, then flat.
struct EpsilonSchedule {
  double start = 1.0;
  double floor = 0.05;
  long decay_span = 1;

  double at(long episode) const {
    if (decay_span <= 0 || episode >= decay_span) return floor;
    return start + (floor - start) * static_cast<double>(episode) / static_cast<double>(decay_span);
  }
  // The default schedule: decay over the first half of the episode budget.
  static EpsilonSchedule for_episodes(long episodes, double start = 1.0, double floor = 0.05) {
    return {start, floor, episodes / 2};
  }
};

struct QLearnConfig {
  double eta = 0.1;
  double gamma = 0.9;
  EpsilonSchedule epsilon;
  long episodes = 1000;
  long step_cap = 0;  // <= 0: 10 * n_states
  // Double Q only. false follows the printed listing (each table bootstraps
  // from its own max); true uses the standard cross-estimator form
  // (evaluate the other table at this table's argmax).
  bool cross_bootstrap = false;
};

struct EpisodeDiag {
  long episode = 0;
  double total_reward = 0.0;
  double epsilon = 0.0;
  bool truncated = false;
};

struct QLearnResult {
  QTable q;
  std::vector<EpisodeDiag> diagnostics;
};

QLearnResult q_learning(Env<int, int>& env, int n_states, int n_actions,
                        const QLearnConfig& cfg, RngEngine& rng);

struct DoubleQResult {
  QTable q1;
  QTable q2;
  std::vector<EpisodeDiag> diagnostics;

  // Acting policy = argmax of Q1 + Q2.
  QTable combined() const;
};

DoubleQResult double_q_learning(Env<int, int>& env, int n_states, int n_actions,
                                const QLearnConfig& cfg, RngEngine& rng);

// Per-state argmax, ties to the lowest action index.
Policy greedy_policy(const QTable& q);

// (episode, return, epsilon, truncated) rows.
void write_diagnostics_csv(const std::string& path, const std::vector<EpisodeDiag>& diags);

// Epsilon-greedy pick over the Q row of state s; greedy ties break low.
int epsilon_greedy(const QTable& q, int s, double epsilon, RngEngine& rng);

}  // namespace savrl
