#include "savrl/mcts.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace savrl {

namespace {

int new_node(SearchTree& tree, const TabularMDP& model, int state) {
  SearchTree::Node node;
  node.state = state;
  node.terminal = model.is_terminal(state);
  node.action_visits.assign(static_cast<std::size_t>(model.n_actions), 0);
  node.action_value.assign(static_cast<std::size_t>(model.n_actions), 0.0);
  tree.nodes.push_back(std::move(node));
  return static_cast<int>(tree.nodes.size()) - 1;
}

double rollout(const TabularMDP& model, int state, int depth, double gamma, RngEngine& rng) {
  double total = 0.0;
  double discount = 1.0;
  std::uniform_int_distribution<int> pick(0, model.n_actions - 1);
  for (int d = 0; d < depth && !model.is_terminal(state); ++d) {
    const auto [next, reward] = sample_step(model, state, pick(rng), rng);
    total += discount * reward;
    discount *= gamma;
    state = next;
  }
  return total;
}

int select_uct(const SearchTree::Node& node, double c) {
  const double log_n = std::log(static_cast<double>(node.visits));
  int best_a = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < node.action_visits.size(); ++a) {
    const double bonus = c * std::sqrt(log_n / static_cast<double>(node.action_visits[a]));
    const double score = node.action_value[a] + bonus;
    if (score > best) {
      best = score;
      best_a = static_cast<int>(a);
    }
  }
  return best_a;
}

}  // namespace

int mcts_plan(const TabularMDP& model, int s0, const MctsConfig& cfg, RngEngine& rng,
              SearchTree* tree_out) {
  if (cfg.simulations < 1) throw std::invalid_argument("mcts_plan: simulations >= 1");
  SearchTree tree;
  new_node(tree, model, s0);

  struct Edge {
    int node;
    int action;
    double reward;
  };
  std::vector<Edge> path;

  for (long sim = 0; sim < cfg.simulations; ++sim) {
    path.clear();
    int node_idx = 0;
    double tail = 0.0;
    while (true) {
      SearchTree::Node& node = tree.nodes[static_cast<std::size_t>(node_idx)];
      if (node.terminal) {
        tail = 0.0;
        break;
      }
      int action;
      bool expanded_now = false;
      if (node.next_untried < model.n_actions) {
        action = node.next_untried++;
        expanded_now = true;
      } else {
        action = select_uct(node, cfg.c);
      }
      const auto [next, reward] = sample_step(model, node.state, action, rng);
      path.push_back({node_idx, action, reward});
      auto key = std::make_pair(action, next);
      auto it = node.children.find(key);
      if (it == node.children.end()) {
        const int child = new_node(tree, model, next);
        // note: new_node may reallocate; re-fetch the parent
        tree.nodes[static_cast<std::size_t>(node_idx)].children.emplace(key, child);
        tail = rollout(model, next, cfg.rollout_depth, cfg.gamma, rng);
        break;
      }
      node_idx = it->second;
      if (expanded_now) {
        // first try of this action but the outcome state was seen before;
        // still stop the descent here so each simulation expands once
        tail = rollout(model, next, cfg.rollout_depth, cfg.gamma, rng);
        break;
      }
    }
    // backup the discounted return along the path
    double g = tail;
    for (std::size_t i = path.size(); i-- > 0;) {
      const Edge& e = path[i];
      g = e.reward + cfg.gamma * g;
      SearchTree::Node& node = tree.nodes[static_cast<std::size_t>(e.node)];
      auto& n_a = node.action_visits[static_cast<std::size_t>(e.action)];
      auto& q_a = node.action_value[static_cast<std::size_t>(e.action)];
      ++n_a;
      ++node.visits;
      q_a += (g - q_a) / static_cast<double>(n_a);
    }
  }

  const SearchTree::Node& root = tree.root();
  int best_a = 0;
  long best_n = -1;
  for (std::size_t a = 0; a < root.action_visits.size(); ++a) {
    if (root.action_visits[a] > best_n) {
      best_n = root.action_visits[a];
      best_a = static_cast<int>(a);
    }
  }
  if (tree_out) *tree_out = std::move(tree);
  return best_a;
}

int mcts_plan(const TabularMDP& model, int s0, long simulations, double c, double gamma,
              RngEngine& rng) {
  MctsConfig cfg;
  cfg.simulations = simulations;
  cfg.c = c;
  cfg.gamma = gamma;
  return mcts_plan(model, s0, cfg, rng, nullptr);
}

}  // namespace savrl
