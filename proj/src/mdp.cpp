#include "savrl/mdp.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace savrl {

void TabularMDP::make_terminal(int s) {
  terminal.insert(s);
  for (int a = 0; a < n_actions; ++a) {
    for (int s2 = 0; s2 < n_states; ++s2) {
      p(s, a, s2) = (s2 == s) ? 1.0 : 0.0;
      r(s, a, s2) = 0.0;
    }
  }
}

std::vector<MdpViolation> validate_mdp(const TabularMDP& mdp) {
  std::vector<MdpViolation> out;
  if (mdp.n_states <= 0 || mdp.n_actions <= 0) {
    out.push_back({-1, -1, "n_states and n_actions must be positive"});
    return out;
  }
  const std::size_t want = static_cast<std::size_t>(mdp.n_states) * mdp.n_actions * mdp.n_states;
  if (mdp.transition.size() != want || mdp.reward.size() != want) {
    out.push_back({-1, -1, "tensor size does not match (n_states, n_actions)"});
    return out;
  }
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) {
      double row_sum = 0.0;
      for (int s2 = 0; s2 < mdp.n_states; ++s2) {
        const double p = mdp.p(s, a, s2);
        if (!(p >= 0.0 && p <= 1.0)) {
          out.push_back({s, a, "probability outside [0,1]"});
        }
        if (!std::isfinite(mdp.r(s, a, s2))) {
          out.push_back({s, a, "non-finite reward"});
        }
        row_sum += p;
      }
      if (std::abs(row_sum - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg << "transition row sums to " << row_sum;
        out.push_back({s, a, msg.str()});
      }
    }
  }
  for (int s : mdp.terminal) {
    for (int a = 0; a < mdp.n_actions; ++a) {
      if (mdp.p(s, a, s) != 1.0) {
        out.push_back({s, a, "terminal state does not self-loop"});
      } else if (mdp.r(s, a, s) != 0.0) {
        out.push_back({s, a, "terminal self-loop reward is nonzero"});
      }
    }
  }
  if (!(mdp.gamma >= 0.0 && mdp.gamma <= 1.0)) {
    out.push_back({-1, -1, "gamma outside [0,1]"});
  }
  return out;
}

std::pair<int, double> sample_step(const TabularMDP& mdp, int s, int a, RngEngine& rng) {
  if (s < 0 || s >= mdp.n_states) throw std::out_of_range("sample_step: state out of range");
  if (a < 0 || a >= mdp.n_actions) throw std::out_of_range("sample_step: action out of range");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double acc = 0.0;
  int next = mdp.n_states - 1;  // guard against row sums a hair below 1
  for (int s2 = 0; s2 < mdp.n_states; ++s2) {
    acc += mdp.p(s, a, s2);
    if (u < acc) {
      next = s2;
      break;
    }
  }
  return {next, mdp.r(s, a, next)};
}

std::vector<double> discounted_return(std::span<const double> rewards, double gamma) {
  std::vector<double> out(rewards.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    acc = rewards[i] + gamma * acc;
    out[i] = acc;
  }
  return out;
}

bool trajectory_chains(const Trajectory& t) {
  for (std::size_t i = 0; i + 1 < t.steps.size(); ++i) {
    if (t.steps[i].done) continue;
    if (t.steps[i].next_state != t.steps[i + 1].state) return false;
  }
  return true;
}

bool trajectory_chains(const ObsTrajectory& t) {
  for (std::size_t i = 0; i + 1 < t.steps.size(); ++i) {
    if (t.steps[i].done) continue;
    if (t.steps[i].next_state != t.steps[i + 1].state) return false;
  }
  return true;
}

void EnvGuard::require_open(const char* op) const {
  if (closed) throw std::logic_error(std::string(op) + " called on a closed env");
}

void EnvGuard::require_steppable() const {
  require_open("step");
  if (!started) throw std::logic_error("step called before reset");
  if (episode_done) throw std::logic_error("step called after the episode ended; reset first");
}

void EnvGuard::on_reset() {
  started = true;
  episode_done = false;
}

void EnvGuard::on_step(bool done) { episode_done = done; }

TabularEnv::TabularEnv(TabularMDP mdp, std::uint64_t seed, int start_state)
    : mdp_(std::move(mdp)), rng_(make_rng(seed)), start_state_(start_state) {}

int TabularEnv::reset() {
  guard_.require_open("reset");
  if (start_state_ >= 0) {
    state_ = start_state_;
  } else {
    std::vector<int> starts;
    for (int s = 0; s < mdp_.n_states; ++s) {
      if (!mdp_.is_terminal(s)) starts.push_back(s);
    }
    std::uniform_int_distribution<std::size_t> pick(0, starts.size() - 1);
    state_ = starts[pick(rng_)];
  }
  guard_.on_reset();
  return state_;
}

StepResult<int> TabularEnv::step(const int& action) {
  guard_.require_steppable();
  auto [next, reward] = sample_step(mdp_, state_, action, rng_);
  state_ = next;
  const bool done = mdp_.is_terminal(next);
  guard_.on_step(done);
  return {next, reward, done, {}};
}

void TabularEnv::close() { guard_.on_close(); }

// Fixture file layout (plain text, '#' comment lines allowed):
//   n_states n_actions gamma
//   n_terminal t_1 ... t_k
//   one line of n_states transition probabilities per (s, a), s-major
//   one line of n_states rewards per (s, a), s-major
TabularMDP load_mdp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open MDP fixture: " + path);
  std::string line;
  std::vector<double> numbers;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    std::istringstream row(line);
    double v;
    while (row >> v) numbers.push_back(v);
  }
  std::size_t pos = 0;
  auto next = [&]() -> double {
    if (pos >= numbers.size()) throw std::runtime_error("truncated MDP fixture: " + path);
    return numbers[pos++];
  };
  const int ns = static_cast<int>(next());
  const int na = static_cast<int>(next());
  const double gamma = next();
  TabularMDP mdp(ns, na, gamma);
  const int nt = static_cast<int>(next());
  for (int i = 0; i < nt; ++i) mdp.terminal.insert(static_cast<int>(next()));
  for (std::size_t i = 0; i < mdp.transition.size(); ++i) mdp.transition[i] = next();
  for (std::size_t i = 0; i < mdp.reward.size(); ++i) mdp.reward[i] = next();
  if (pos != numbers.size()) throw std::runtime_error("trailing data in MDP fixture: " + path);
  return mdp;
}

void save_mdp(const std::string& path, const TabularMDP& mdp) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write MDP fixture: " + path);
  out.precision(17);
  out << "# savrl tabular MDP fixture\n";
  out << mdp.n_states << " " << mdp.n_actions << " " << mdp.gamma << "\n";
  out << mdp.terminal.size();
  for (int t : mdp.terminal) out << " " << t;
  out << "\n";
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) {
      for (int s2 = 0; s2 < mdp.n_states; ++s2) {
        out << mdp.p(s, a, s2) << (s2 + 1 == mdp.n_states ? "\n" : " ");
      }
    }
  }
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) {
      for (int s2 = 0; s2 < mdp.n_states; ++s2) {
        out << mdp.r(s, a, s2) << (s2 + 1 == mdp.n_states ? "\n" : " ");
      }
    }
  }
}

}  // namespace savrl
