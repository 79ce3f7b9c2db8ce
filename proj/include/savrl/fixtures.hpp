#pragma once

#include <stdexcept>

#include "savrl/mdp.hpp"

namespace savrl::fixtures {

// Three-state chain: action 0 advances with reward 1, action 1 stays with
// reward 0; state 2 is terminal. gamma = 0.9, so V* = [1.9, 1.0, 0.0].
TabularMDP chain();

// Deterministic 4x4 gridworld: actions N,E,S,W, off-grid moves stay put,
// every move costs 1, bottom-right corner is terminal. gamma = 0.9.
TabularMDP gridworld4();

// One-shot bandit: action 0 pays 1, action 1 pays 0, both end the episode.
TabularMDP two_arm_bandit();

// Self-loop: from s0, any action loops back with reward 1 (p = 0.5) or ends
// with reward 0. gamma = 0.9 gives V(s0) = 0.5 / (1 - 0.45).
TabularMDP self_loop();

// Fixed-policy evaluation fixture: from s0 the single action ends with
// reward 4 (p = 0.5) or moves to s1 with reward 0; s1 always ends with
// reward 2. gamma = 1, so V = [3, 2] with per-episode return variance 1.
TabularMDP stochastic_two_outcome();

// Complete binary tree of the given depth, gamma-free rewards on leaf edges
// chosen so every root-to-leaf path has the same length (fixed horizon).
// Non-leaf edges carry reward 0; the leftmost leaf edge pays `best_leaf`,
// all others pay 0. Two actions everywhere.
TabularMDP fixed_horizon_tree(int depth, double best_leaf);

// Maximization-bias episode (start state A): action 0 at A is LEFT into B
// with reward 0, every other action is RIGHT straight to terminal with
// reward 0; all 8 actions at B terminate with reward drawn from
// Normal(-0.1, 1). The noisy rewards live outside the tensor form, hence a
// dedicated env rather than a TabularMDP.
class MaximizationBiasEnv : public Env<int, int> {
 public:
  static constexpr int kStart = 0;
  static constexpr int kNoisy = 1;
  static constexpr int kTerminal = 2;
  static constexpr int kNumStates = 3;
  static constexpr int kNumActions = 8;
  static constexpr int kLeft = 0;

  explicit MaximizationBiasEnv(std::uint64_t seed) : rng_(make_rng(seed)) {}

  int reset() override {
    state_ = kStart;
    guard_.on_reset();
    return state_;
  }

  StepResult<int> step(const int& action) override {
    guard_.require_steppable();
    if (action < 0 || action >= kNumActions) throw std::out_of_range("bias env: action");
    StepResult<int> out;
    if (state_ == kStart) {
      if (action == kLeft) {
        state_ = kNoisy;
        out = {kNoisy, 0.0, false, {}};
      } else {
        state_ = kTerminal;
        out = {kTerminal, 0.0, true, {}};
      }
    } else {
      std::normal_distribution<double> noise(-0.1, 1.0);
      state_ = kTerminal;
      out = {kTerminal, noise(rng_), true, {}};
    }
    guard_.on_step(out.done);
    return out;
  }

  void close() override { guard_.on_close(); }

 private:
  RngEngine rng_;
  int state_ = kStart;
  EnvGuard guard_;
};

}  // namespace savrl::fixtures
