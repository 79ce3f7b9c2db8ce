#pragma once

#include <memory>
#include <string>
#include <vector>

#include "savrl/mlp.hpp"
#include "savrl/policies.hpp"
#include "savrl/replay.hpp"
#include "savrl/sim.hpp"

namespace savrl {

struct AgentConfig {
  double gamma = 0.99;
  double eta = 1e-3;    // TD learning rate (DQN / DDQN)
  double alpha = 1e-3;  // policy-gradient learning rate (REINFORCE)
  double epsilon_start = 1.0;
  double epsilon_floor = 0.05;
  long epsilon_decay_steps = 30L * 168;  // env steps until the floor
  std::size_t buffer_capacity = 20000;
  std::size_t batch_size = 32;
  long target_sync_interval = 500;  // env steps between hard target copies
  int train_steps_per_env_step = 1;
  int hidden_size = 120;
  // REINFORCE return form: false follows the printed update (tail return
  // from the next step with absolute discount exponents), true uses the
  // conventional suffix return from the current step.
  bool return_from_current = false;
  bool reinforce_baseline = false;  // moving-average baseline, default off
  bool normalize_rewards = false;   // divide by running absolute mean
};

// Throws std::invalid_argument on a broken field.
void validate_agent_config(const AgentConfig& cfg);

// The network output is n_slices slices of width local actions each; a zone
// decision reads its own slice.
struct HeadLayout {
  int n_slices = 1;
  int width = 1;

  int output_size() const { return n_slices * width; }
  int offset(int slice) const { return slice * width; }
  int global(int slice, int local) const { return slice * width + local; }
  int slice_of(int global_action) const { return global_action / width; }
  int local_of(int global_action) const { return global_action % width; }
};

struct ActionMask {
  std::vector<bool> allowed;

  static ActionMask all(int width) { return {std::vector<bool>(static_cast<std::size_t>(width), true)}; }
  int width() const { return static_cast<int>(allowed.size()); }
  int allowed_count() const;
};

// Slice-level picks; the agents forward once per step and reuse the output
// across all zone slices.
int masked_argmax(std::span<const double> slice, const ActionMask& mask);
int epsilon_greedy_slice(std::span<const double> slice, double epsilon, const ActionMask& mask,
                         RngEngine& rng);
int sample_softmax_slice(std::span<const double> slice, const ActionMask& mask, RngEngine& rng,
                         bool greedy = false);
// Softmax over the unmasked slice logits (masked entries get probability 0).
std::vector<double> softmax_distribution(std::span<const double> slice, const ActionMask& mask);

// Epsilon-greedy pick over the zone's Q slice, restricted to unmasked
// actions; greedy ties break to the lowest local index. Returns the local
// action index.
int select_action_q(const MLPParams& params, const Obs& observation, int zone,
                    double epsilon, const ActionMask& mask, const HeadLayout& layout,
                    RngEngine& rng);

// Sample a local action from the softmax over the zone's unmasked slice
// logits. greedy = true takes the argmax instead.
int select_action_softmax(const MLPParams& params, const Obs& observation, int zone,
                          const ActionMask& mask, const HeadLayout& layout, RngEngine& rng,
                          bool greedy = false);

// r + gamma * max over the target net's unmasked slice at the next state;
// just r on terminal transitions.
double dqn_td_target(const MLPParams& target_params, const HeadLayout& layout,
                     const DecisionTransition& t, double gamma,
                     const ActionMask& mask);

// r + gamma * Q_target(s', argmax_a Q_online(s', a)) over the slice.
double ddqn_td_target(const MLPParams& online_params, const MLPParams& target_params,
                      const HeadLayout& layout, const DecisionTransition& t, double gamma,
                      const ActionMask& mask);

enum class TdTargetKind { kDqn, kDdqn };

// One descent step on the mean squared TD error of a uniform minibatch.
// Gradients flow only through the online net's predicted Q(s,a). Returns the
// pre-step loss. Per-sample gradients are computed in parallel and reduced
// in index order, so results do not depend on the thread count.
double dqn_train_step(MLPParams& params, const MLPParams& target_params, ReplayBuffer& buffer,
                      const AgentConfig& cfg, const HeadLayout& layout, TdTargetKind kind,
                      RngEngine& rng);

// Hard copy of the online parameters into the target.
void sync_target(const MLPParams& params, MLPParams& target_params);

// One policy-gradient pass over a finished episode: for each step, ascend
// alpha * grad log pi(a|s) * G_t, walking the trajectory in order and
// re-evaluating the network after each update. Multi-zone steps contribute
// the sum of their decisions' log-prob gradients.
void reinforce_update(MLPParams& params, const ObsTrajectory& trajectory, double gamma,
                      double alpha, const HeadLayout& layout,
                      bool return_from_current = false, double baseline = 0.0);

// Fleet-level agent interface: one directive per hour.
class FleetAgent {
 public:
  struct Decision {
    RelocationDirective directive;
    std::vector<int> head_actions;  // global indices per zone; empty for baselines
  };

  virtual ~FleetAgent() = default;
  virtual const char* name() const = 0;
  virtual Decision decide(const Obs& obs, bool explore, RngEngine& rng) = 0;
  virtual void begin_episode() {}
  virtual void observe_step(const ObsTransition&) {}
  virtual void end_episode(const ObsTrajectory&) {}
  virtual double mean_loss_last_episode() const { return 0.0; }
  virtual double current_epsilon() const { return 0.0; }
  virtual bool learns() const { return false; }
  virtual void save_checkpoint_to(const std::string&) const {}
};

class DqnAgent : public FleetAgent {
 public:
  DqnAgent(const AgentConfig& cfg, int n_zones, ActionSpaceMode mode, std::uint64_t seed,
           TdTargetKind kind = TdTargetKind::kDqn);

  const char* name() const override;
  Decision decide(const Obs& obs, bool explore, RngEngine& rng) override;
  void begin_episode() override;
  void observe_step(const ObsTransition& t) override;
  double mean_loss_last_episode() const override;
  double current_epsilon() const override;
  bool learns() const override { return true; }
  void save_checkpoint_to(const std::string& path) const override;

  const MLPParams& online() const { return online_; }
  const MLPParams& target() const { return target_; }

 private:
  double scaled(double reward);

  AgentConfig cfg_;
  int n_zones_;
  ActionSpaceMode mode_;
  TdTargetKind kind_;
  HeadLayout layout_;
  ActionMask mask_;
  MLPParams online_;
  MLPParams target_;
  ReplayBuffer buffer_;
  RngEngine train_rng_;
  long env_steps_ = 0;
  double loss_sum_ = 0.0;
  long loss_count_ = 0;
  double abs_reward_mean_ = 0.0;
  long reward_count_ = 0;
};

class ReinforceAgent : public FleetAgent {
 public:
  ReinforceAgent(const AgentConfig& cfg, int n_zones, ActionSpaceMode mode, std::uint64_t seed);

  const char* name() const override { return "reinforce"; }
  Decision decide(const Obs& obs, bool explore, RngEngine& rng) override;
  void end_episode(const ObsTrajectory& traj) override;
  bool learns() const override { return true; }
  void save_checkpoint_to(const std::string& path) const override;

  const MLPParams& params() const { return params_; }

 private:
  AgentConfig cfg_;
  int n_zones_;
  ActionSpaceMode mode_;
  HeadLayout layout_;
  ActionMask mask_;
  MLPParams params_;
  double return_baseline_ = 0.0;
  long episodes_seen_ = 0;
  double abs_reward_mean_ = 0.0;
  long reward_count_ = 0;
};

// The reactive baseline. Emits n-zone directives regardless of the learned
// agents' encoding, so its env must run in n-zone mode.
class ImbalanceAgent : public FleetAgent {
 public:
  explicit ImbalanceAgent(double threshold = 0.10) : threshold_(threshold) {}
  const char* name() const override { return "imbalance"; }
  Decision decide(const Obs& obs, bool, RngEngine& rng) override {
    return {imbalance_directive(obs, rng, threshold_), {}};
  }

 private:
  double threshold_;
};

// Uniform directive over the configured action space every hour.
class RandomAgent : public FleetAgent {
 public:
  RandomAgent(int n_zones, ActionSpaceMode mode) : n_zones_(n_zones), mode_(mode) {}
  const char* name() const override { return "random"; }
  Decision decide(const Obs&, bool, RngEngine&) override {
    return {RelocationDirective::uniform(mode_, n_zones_), {}};
  }

 private:
  int n_zones_;
  ActionSpaceMode mode_;
};

struct EpisodeResult {
  ObsTrajectory trajectory;
  double total_reward = 0.0;
  std::vector<InfoMap> infos;
};

// Runs one episode to completion. When training, DQN-family agents learn
// per step and REINFORCE learns at the episode end.
EpisodeResult run_episode(FleetAgent& agent, SavEnv& env, bool train, RngEngine& rng);

}  // namespace savrl
