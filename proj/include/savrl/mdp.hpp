#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "savrl/rng.hpp"

namespace savrl {

using Obs = std::vector<double>;
// step() diagnostics: string keys, numeric values only (CSV-friendly).
using InfoMap = std::map<std::string, double>;

// Explicit finite MDP: transition and reward tensors indexed (s, a, s'),
// discount gamma, and a set of terminal states that self-loop with reward 0.
struct TabularMDP {
  int n_states = 0;
  int n_actions = 0;
  double gamma = 0.0;
  std::vector<double> transition;  // row-major (s, a, s')
  std::vector<double> reward;      // row-major (s, a, s')
  std::set<int> terminal;

  TabularMDP() = default;
  TabularMDP(int ns, int na, double g)
      : n_states(ns),
        n_actions(na),
        gamma(g),
        transition(static_cast<std::size_t>(ns) * na * ns, 0.0),
        reward(static_cast<std::size_t>(ns) * na * ns, 0.0) {}

  std::size_t idx(int s, int a, int s2) const {
    return (static_cast<std::size_t>(s) * n_actions + a) * n_states + s2;
  }
  double& p(int s, int a, int s2) { return transition[idx(s, a, s2)]; }
  double p(int s, int a, int s2) const { return transition[idx(s, a, s2)]; }
  double& r(int s, int a, int s2) { return reward[idx(s, a, s2)]; }
  double r(int s, int a, int s2) const { return reward[idx(s, a, s2)]; }
  bool is_terminal(int s) const { return terminal.count(s) > 0; }

  // Marks s terminal and installs the self-loop-with-zero-reward rows.
  void make_terminal(int s);
};

struct MdpViolation {
  int state = -1;
  int action = -1;
  std::string rule;
};

// Empty result iff all TabularMDP invariants hold; violations are data, not
// failures.
std::vector<MdpViolation> validate_mdp(const TabularMDP& mdp);

// Draws s' from transition[s,a,.] and returns (s', reward[s,a,s']).
std::pair<int, double> sample_step(const TabularMDP& mdp, int s, int a, RngEngine& rng);

// out[t] = sum_{j>=t} gamma^{j-t} * rewards[j], one backward pass.
std::vector<double> discounted_return(std::span<const double> rewards, double gamma);

// One environment interaction with index states (tabular form).
struct Transition {
  int state = 0;
  int action = 0;
  double reward = 0.0;
  int next_state = 0;
  bool done = false;
};

struct Trajectory {
  std::vector<Transition> steps;
  std::size_t total_steps() const { return steps.size(); }
};

// Consecutive steps chain: next_state of step i equals state of step i+1
// unless step i ended the episode.
bool trajectory_chains(const Trajectory& t);

// Observation-form transition. One simulator step carries one decision per
// zone, hence a vector of head action indices; single-decision envs use a
// one-element vector.
struct ObsTransition {
  Obs state;
  std::vector<int> actions;
  double reward = 0.0;
  Obs next_state;
  bool done = false;
};

struct ObsTrajectory {
  std::vector<ObsTransition> steps;
  std::size_t total_steps() const { return steps.size(); }
};

bool trajectory_chains(const ObsTrajectory& t);

template <class StateT>
struct StepResult {
  StateT observation;
  double reward = 0.0;
  bool done = false;
  InfoMap info;
};

// Environment interaction contract. step() before reset() is an error, as is
// step() after done without an intervening reset(); close() releases the
// instance for good. One instance is driven by one logical thread.
template <class StateT, class ActionT>
class Env {
 public:
  virtual ~Env() = default;
  virtual StateT reset() = 0;
  virtual StepResult<StateT> step(const ActionT& action) = 0;
  virtual void close() = 0;
};

// Lifecycle bookkeeping shared by env implementations.
struct EnvGuard {
  bool closed = false;
  bool started = false;
  bool episode_done = false;

  void require_open(const char* op) const;
  void require_steppable() const;
  void on_reset();
  void on_step(bool done);
  void on_close() { closed = true; }
};

// EnvContract over a TabularMDP. start_state < 0 selects a uniform random
// non-terminal start on each reset.
class TabularEnv : public Env<int, int> {
 public:
  TabularEnv(TabularMDP mdp, std::uint64_t seed, int start_state = 0);

  int reset() override;
  StepResult<int> step(const int& action) override;
  void close() override;

  const TabularMDP& mdp() const { return mdp_; }

 private:
  TabularMDP mdp_;
  RngEngine rng_;
  int start_state_;
  int state_ = 0;
  EnvGuard guard_;
};

// Plain-text fixture format (see load_mdp in mdp.cpp for the layout).
TabularMDP load_mdp(const std::string& path);
void save_mdp(const std::string& path, const TabularMDP& mdp);

}  // namespace savrl
