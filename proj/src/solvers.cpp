#include "savrl/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "savrl/linalg.hpp"
#include "savrl/parallel.hpp"

namespace savrl {

double expected_reward(const TabularMDP& mdp, int s, int a) {
  double acc = 0.0;
  for (int s2 = 0; s2 < mdp.n_states; ++s2) acc += mdp.p(s, a, s2) * mdp.r(s, a, s2);
  return acc;
}

namespace {

double backup(const TabularMDP& mdp, const std::vector<double>& v, int s, int a) {
  double acc = 0.0;
  for (int s2 = 0; s2 < mdp.n_states; ++s2) {
    acc += mdp.p(s, a, s2) * (mdp.r(s, a, s2) + mdp.gamma * v[static_cast<std::size_t>(s2)]);
  }
  return acc;
}

double max_backup(const TabularMDP& mdp, const std::vector<double>& v, int s) {
  double best = backup(mdp, v, s, 0);
  for (int a = 1; a < mdp.n_actions; ++a) best = std::max(best, backup(mdp, v, s, a));
  return best;
}

}  // namespace

void bellman_sweep_serial(const TabularMDP& mdp, const std::vector<double>& v_in,
                          std::vector<double>& v_out) {
  v_out.resize(v_in.size());
  for (int s = 0; s < mdp.n_states; ++s) v_out[static_cast<std::size_t>(s)] = max_backup(mdp, v_in, s);
}

void bellman_sweep(const TabularMDP& mdp, const std::vector<double>& v_in,
                   std::vector<double>& v_out) {
  v_out.resize(v_in.size());
  const std::int64_t work =
      static_cast<std::int64_t>(mdp.n_states) * mdp.n_actions * mdp.n_states;
  if (work >= kParallelWorkCutoff) {
    parallel_for(mdp.n_states,
                 [&](std::int64_t s) { v_out[static_cast<std::size_t>(s)] = max_backup(mdp, v_in, static_cast<int>(s)); });
  } else {
    bellman_sweep_serial(mdp, v_in, v_out);
  }
}

double bellman_residual(const TabularMDP& mdp, const std::vector<double>& v) {
  double worst = 0.0;
  for (int s = 0; s < mdp.n_states; ++s) {
    worst = std::max(worst, std::abs(v[static_cast<std::size_t>(s)] - max_backup(mdp, v, s)));
  }
  return worst;
}

Policy greedy_from_values(const TabularMDP& mdp, const std::vector<double>& v) {
  Policy pi(static_cast<std::size_t>(mdp.n_states), 0);
  for (int s = 0; s < mdp.n_states; ++s) {
    double best = backup(mdp, v, s, 0);
    int best_a = 0;
    for (int a = 1; a < mdp.n_actions; ++a) {
      const double q = backup(mdp, v, s, a);
      if (q > best) {
        best = q;
        best_a = a;
      }
    }
    pi[static_cast<std::size_t>(s)] = best_a;
  }
  return pi;
}

QTable q_from_values(const TabularMDP& mdp, const std::vector<double>& v) {
  QTable q(mdp.n_states, mdp.n_actions);
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) q.at(s, a) = backup(mdp, v, s, a);
  }
  return q;
}

ViResult value_iteration(const TabularMDP& mdp, double epsilon) {
  if (epsilon <= 0.0) throw std::invalid_argument("value_iteration: epsilon must be positive");
  std::vector<double> v(static_cast<std::size_t>(mdp.n_states), 0.0);
  std::vector<double> v_next(v.size(), 0.0);
  int sweeps = 0;
  double delta = 0.0;
  do {
    bellman_sweep(mdp, v, v_next);
    delta = 0.0;
    for (std::size_t s = 0; s < v.size(); ++s) delta = std::max(delta, std::abs(v_next[s] - v[s]));
    v.swap(v_next);
    ++sweeps;
  } while (delta >= epsilon);
  return {ValueTable{v}, greedy_from_values(mdp, v), sweeps};
}

ViResult policy_iteration(const TabularMDP& mdp, double epsilon) {
  if (epsilon <= 0.0) throw std::invalid_argument("policy_iteration: epsilon must be positive");
  Policy pi(static_cast<std::size_t>(mdp.n_states), 0);
  std::vector<double> v(static_cast<std::size_t>(mdp.n_states), 0.0);
  int improvements = 0;
  while (true) {
    // policy evaluation
    double delta;
    do {
      delta = 0.0;
      for (int s = 0; s < mdp.n_states; ++s) {
        const double nv = backup(mdp, v, s, pi[static_cast<std::size_t>(s)]);
        delta = std::max(delta, std::abs(nv - v[static_cast<std::size_t>(s)]));
        v[static_cast<std::size_t>(s)] = nv;
      }
    } while (delta >= epsilon);
    // greedy improvement
    Policy improved = greedy_from_values(mdp, v);
    ++improvements;
    if (improved == pi) break;
    pi = std::move(improved);
  }
  return {ValueTable{v}, pi, improvements};
}

namespace {

struct EpisodeTrace {
  std::vector<int> states;
  std::vector<double> rewards;
  bool truncated = false;
};

EpisodeTrace sample_episode(Env<int, int>& env, const Policy& policy, long step_cap,
                            RngEngine&) {
  EpisodeTrace out;
  int s = env.reset();
  for (long t = 0; t < step_cap; ++t) {
    out.states.push_back(s);
    const auto step = env.step(policy[static_cast<std::size_t>(s)]);
    out.rewards.push_back(step.reward);
    s = step.observation;
    if (step.done) return out;
  }
  out.truncated = true;
  return out;
}

McResult mc_evaluate(Env<int, int>& env, int n_states, const Policy& policy, long episodes,
                     double gamma, RngEngine& rng, long step_cap, bool first_visit_only) {
  if (step_cap <= 0) step_cap = 10L * n_states;
  std::vector<double> total_return(static_cast<std::size_t>(n_states), 0.0);
  std::vector<long> visits(static_cast<std::size_t>(n_states), 0);
  long truncated = 0;
  std::vector<char> seen(static_cast<std::size_t>(n_states), 0);
  for (long e = 0; e < episodes; ++e) {
    const EpisodeTrace ep = sample_episode(env, policy, step_cap, rng);
    if (ep.truncated) ++truncated;
    const std::vector<double> returns = discounted_return(ep.rewards, gamma);
    std::fill(seen.begin(), seen.end(), 0);
    for (std::size_t t = 0; t < ep.states.size(); ++t) {
      const auto s = static_cast<std::size_t>(ep.states[t]);
      if (first_visit_only && seen[s]) continue;
      seen[s] = 1;
      total_return[s] += returns[t];
      ++visits[s];
    }
  }
  ValueTable v{std::vector<double>(static_cast<std::size_t>(n_states), 0.0)};
  for (std::size_t s = 0; s < v.v.size(); ++s) {
    if (visits[s] > 0) v.v[s] = total_return[s] / static_cast<double>(visits[s]);
  }
  return {std::move(v), std::move(visits), truncated};
}

}  // namespace

McResult mc_first_visit(Env<int, int>& env, int n_states, const Policy& policy,
                        long episodes, double gamma, RngEngine& rng, long step_cap) {
  return mc_evaluate(env, n_states, policy, episodes, gamma, rng, step_cap, true);
}

McResult mc_every_visit(Env<int, int>& env, int n_states, const Policy& policy,
                        long episodes, double gamma, RngEngine& rng, long step_cap) {
  return mc_evaluate(env, n_states, policy, episodes, gamma, rng, step_cap, false);
}

int epsilon_greedy(const QTable& q, int s, double epsilon, RngEngine& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (unif(rng) < epsilon) {
    std::uniform_int_distribution<int> pick(0, q.n_actions - 1);
    return pick(rng);
  }
  int best_a = 0;
  double best = q.at(s, 0);
  for (int a = 1; a < q.n_actions; ++a) {
    if (q.at(s, a) > best) {
      best = q.at(s, a);
      best_a = a;
    }
  }
  return best_a;
}

QLearnResult q_learning(Env<int, int>& env, int n_states, int n_actions,
                        const QLearnConfig& cfg, RngEngine& rng) {
  if (!(cfg.eta > 0.0 && cfg.eta <= 1.0)) throw std::invalid_argument("q_learning: eta in (0,1]");
  const long step_cap = cfg.step_cap > 0 ? cfg.step_cap : 10L * n_states;
  QLearnResult out;
  out.q = QTable(n_states, n_actions);
  QTable& q = out.q;
  for (long e = 0; e < cfg.episodes; ++e) {
    const double eps = cfg.epsilon.at(e);
    int s = env.reset();
    double ep_reward = 0.0;
    bool truncated = true;
    for (long t = 0; t < step_cap; ++t) {
      const int a = epsilon_greedy(q, s, eps, rng);
      const auto step = env.step(a);
      ep_reward += step.reward;
      const int s2 = step.observation;
      double target = step.reward;
      if (!step.done) {
        double best = q.at(s2, 0);
        for (int a2 = 1; a2 < n_actions; ++a2) best = std::max(best, q.at(s2, a2));
        target += cfg.gamma * best;
      }
      q.at(s, a) += cfg.eta * (target - q.at(s, a));
      s = s2;
      if (step.done) {
        truncated = false;
        break;
      }
    }
    out.diagnostics.push_back({e, ep_reward, eps, truncated});
  }
  return out;
}

QTable DoubleQResult::combined() const {
  QTable sum(q1.n_states, q1.n_actions);
  for (std::size_t i = 0; i < sum.q.size(); ++i) sum.q[i] = q1.q[i] + q2.q[i];
  return sum;
}

DoubleQResult double_q_learning(Env<int, int>& env, int n_states, int n_actions,
                                const QLearnConfig& cfg, RngEngine& rng) {
  if (!(cfg.eta > 0.0 && cfg.eta <= 1.0)) {
    throw std::invalid_argument("double_q_learning: eta in (0,1]");
  }
  const long step_cap = cfg.step_cap > 0 ? cfg.step_cap : 10L * n_states;
  DoubleQResult out;
  out.q1 = QTable(n_states, n_actions);
  out.q2 = QTable(n_states, n_actions);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (long e = 0; e < cfg.episodes; ++e) {
    const double eps = cfg.epsilon.at(e);
    int s = env.reset();
    double ep_reward = 0.0;
    bool truncated = true;
    for (long t = 0; t < step_cap; ++t) {
      // behavior: epsilon-greedy over Q1 + Q2
      const QTable acting = out.combined();
      const int a = epsilon_greedy(acting, s, eps, rng);
      const auto step = env.step(a);
      ep_reward += step.reward;
      const int s2 = step.observation;
      QTable& upd = (coin(rng) < 0.5) ? out.q1 : out.q2;
      QTable& other = (&upd == &out.q1) ? out.q2 : out.q1;
      double target = step.reward;
      if (!step.done) {
        if (cfg.cross_bootstrap) {
          // select with the updated table, evaluate with the other
          int best_a = 0;
          double best = upd.at(s2, 0);
          for (int a2 = 1; a2 < n_actions; ++a2) {
            if (upd.at(s2, a2) > best) {
              best = upd.at(s2, a2);
              best_a = a2;
            }
          }
          target += cfg.gamma * other.at(s2, best_a);
        } else {
          // printed listing: each table bootstraps from its own max
          double best = upd.at(s2, 0);
          for (int a2 = 1; a2 < n_actions; ++a2) best = std::max(best, upd.at(s2, a2));
          target += cfg.gamma * best;
        }
      }
      upd.at(s, a) += cfg.eta * (target - upd.at(s, a));
      s = s2;
      if (step.done) {
        truncated = false;
        break;
      }
    }
    out.diagnostics.push_back({e, ep_reward, eps, truncated});
  }
  return out;
}

Policy greedy_policy(const QTable& q) {
  Policy pi(static_cast<std::size_t>(q.n_states), 0);
  for (int s = 0; s < q.n_states; ++s) {
    int best_a = 0;
    double best = q.at(s, 0);
    for (int a = 1; a < q.n_actions; ++a) {
      if (q.at(s, a) > best) {
        best = q.at(s, a);
        best_a = a;
      }
    }
    pi[static_cast<std::size_t>(s)] = best_a;
  }
  return pi;
}

void write_diagnostics_csv(const std::string& path, const std::vector<EpisodeDiag>& diags) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write diagnostics CSV: " + path);
  out.precision(17);
  out << "episode,return,epsilon,truncated\n";
  for (const auto& d : diags) {
    out << d.episode << "," << d.total_reward << "," << d.epsilon << ","
        << (d.truncated ? 1 : 0) << "\n";
  }
}

}  // namespace savrl
