#pragma once

#include <map>
#include <vector>

#include "savrl/mdp.hpp"

namespace savrl {

// UCT search tree over a known TabularMDP model. Nodes are created lazily;
// stochastic transitions get one child per (action, next_state) outcome.
struct SearchTree {
  struct Node {
    int state = 0;
    bool terminal = false;
    long visits = 0;                         // n(s); equals the sum of n(s,a)
    std::vector<long> action_visits;         // n(s,a)
    std::vector<double> action_value;        // running mean return per action
    std::map<std::pair<int, int>, int> children;  // (action, next_state) -> node index
    int next_untried = 0;                    // actions below this were tried
  };

  std::vector<Node> nodes;  // nodes[0] is the root

  const Node& root() const { return nodes.front(); }
};

struct MctsConfig {
  long simulations = 1000;
  double c = 1.4;          // exploration constant
  double gamma = 1.0;
  int rollout_depth = 50;  // uniform-random rollout, discounted truncation
};

// Runs the select-expand-rollout-backup cycle for the simulation budget and
// returns the root action with the highest visit count (ties break low).
// Unvisited actions at a node are always tried before any UCT comparison.
int mcts_plan(const TabularMDP& model, int s0, const MctsConfig& cfg, RngEngine& rng,
              SearchTree* tree_out = nullptr);

int mcts_plan(const TabularMDP& model, int s0, long simulations, double c, double gamma,
              RngEngine& rng);

}  // namespace savrl
