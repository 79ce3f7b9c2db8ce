#include "savrl/agents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "savrl/parallel.hpp"

namespace savrl {

void validate_agent_config(const AgentConfig& cfg) {
  if (!(cfg.gamma >= 0.0 && cfg.gamma < 1.0)) throw std::invalid_argument("agent: gamma in [0,1)");
  if (cfg.eta <= 0.0) throw std::invalid_argument("agent: eta must be positive");
  if (cfg.alpha <= 0.0) throw std::invalid_argument("agent: alpha must be positive");
  if (cfg.batch_size > cfg.buffer_capacity) {
    throw std::invalid_argument("agent: batch size exceeds buffer capacity");
  }
  if (cfg.batch_size == 0) throw std::invalid_argument("agent: batch size must be positive");
  if (!(cfg.epsilon_floor >= 0.0 && cfg.epsilon_floor <= cfg.epsilon_start &&
        cfg.epsilon_start <= 1.0)) {
    throw std::invalid_argument("agent: epsilon schedule must satisfy 0 <= floor <= start <= 1");
  }
  if (cfg.hidden_size <= 0) throw std::invalid_argument("agent: hidden size must be positive");
}

int ActionMask::allowed_count() const {
  return static_cast<int>(std::count(allowed.begin(), allowed.end(), true));
}

std::vector<const DecisionTransition*> ReplayBuffer::sample(std::size_t batch,
                                                            RngEngine& rng) const {
  if (batch > ring_.size()) throw std::logic_error("replay: sample larger than buffer");
  std::vector<std::size_t> index(ring_.size());
  std::iota(index.begin(), index.end(), 0);
  // partial Fisher-Yates: the first `batch` entries become the sample
  for (std::size_t i = 0; i < batch; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, index.size() - 1);
    std::swap(index[i], index[pick(rng)]);
  }
  std::vector<const DecisionTransition*> out;
  out.reserve(batch);
  for (std::size_t i = 0; i < batch; ++i) out.push_back(&ring_[index[i]]);
  return out;
}

namespace {

std::span<const double> slice_of(const Vec& out, const HeadLayout& layout, int zone) {
  return {out.data() + layout.offset(zone), static_cast<std::size_t>(layout.width)};
}

}  // namespace

int masked_argmax(std::span<const double> slice, const ActionMask& mask) {
  int best = -1;
  double best_v = 0.0;
  for (int a = 0; a < static_cast<int>(slice.size()); ++a) {
    if (!mask.allowed[static_cast<std::size_t>(a)]) continue;
    if (best < 0 || slice[static_cast<std::size_t>(a)] > best_v) {
      best = a;
      best_v = slice[static_cast<std::size_t>(a)];
    }
  }
  return best;
}

int epsilon_greedy_slice(std::span<const double> slice, double epsilon, const ActionMask& mask,
                         RngEngine& rng) {
  if (mask.allowed_count() == 0) throw std::invalid_argument("action selection: empty mask");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (epsilon > 0.0 && unif(rng) < epsilon) {
    std::uniform_int_distribution<int> pick(0, mask.allowed_count() - 1);
    int k = pick(rng);
    for (int a = 0; a < mask.width(); ++a) {
      if (!mask.allowed[static_cast<std::size_t>(a)]) continue;
      if (k-- == 0) return a;
    }
  }
  return masked_argmax(slice, mask);
}

std::vector<double> softmax_distribution(std::span<const double> slice, const ActionMask& mask) {
  if (mask.allowed_count() == 0) throw std::invalid_argument("action selection: empty mask");
  const int width = static_cast<int>(slice.size());
  double m = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < width; ++a) {
    if (mask.allowed[static_cast<std::size_t>(a)]) m = std::max(m, slice[static_cast<std::size_t>(a)]);
  }
  double total = 0.0;
  std::vector<double> weight(static_cast<std::size_t>(width), 0.0);
  for (int a = 0; a < width; ++a) {
    if (!mask.allowed[static_cast<std::size_t>(a)]) continue;
    weight[static_cast<std::size_t>(a)] = std::exp(slice[static_cast<std::size_t>(a)] - m);
    total += weight[static_cast<std::size_t>(a)];
  }
  for (double& w : weight) w /= total;
  return weight;
}

int sample_softmax_slice(std::span<const double> slice, const ActionMask& mask, RngEngine& rng,
                         bool greedy) {
  if (mask.allowed_count() == 0) throw std::invalid_argument("action selection: empty mask");
  if (greedy) return masked_argmax(slice, mask);
  const std::vector<double> pi = softmax_distribution(slice, mask);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double acc = 0.0;
  int last_allowed = 0;
  for (int a = 0; a < static_cast<int>(pi.size()); ++a) {
    if (!mask.allowed[static_cast<std::size_t>(a)]) continue;
    last_allowed = a;
    acc += pi[static_cast<std::size_t>(a)];
    if (u < acc) return a;
  }
  return last_allowed;
}

int select_action_q(const MLPParams& params, const Obs& observation, int zone,
                    double epsilon, const ActionMask& mask, const HeadLayout& layout,
                    RngEngine& rng) {
  if (mask.allowed_count() == 0) throw std::invalid_argument("select_action_q: empty mask");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (unif(rng) < epsilon) {
    std::uniform_int_distribution<int> pick(0, mask.allowed_count() - 1);
    int k = pick(rng);
    for (int a = 0; a < mask.width(); ++a) {
      if (!mask.allowed[static_cast<std::size_t>(a)]) continue;
      if (k-- == 0) return a;
    }
  }
  const Vec out = forward(params, observation, Head::kQValues);
  return masked_argmax(slice_of(out, layout, zone), mask);
}

int select_action_softmax(const MLPParams& params, const Obs& observation, int zone,
                          const ActionMask& mask, const HeadLayout& layout, RngEngine& rng,
                          bool greedy) {
  const Vec out = forward(params, observation, Head::kQValues);
  return sample_softmax_slice(slice_of(out, layout, zone), mask, rng, greedy);
}

double dqn_td_target(const MLPParams& target_params, const HeadLayout& layout,
                     const DecisionTransition& t, double gamma, const ActionMask& mask) {
  if (t.done || gamma == 0.0) return t.reward;
  const Vec out = forward(target_params, *t.next_state, Head::kQValues);
  const auto slice = slice_of(out, layout, layout.slice_of(t.action));
  const int best = masked_argmax(slice, mask);
  return t.reward + gamma * slice[static_cast<std::size_t>(best)];
}

double ddqn_td_target(const MLPParams& online_params, const MLPParams& target_params,
                      const HeadLayout& layout, const DecisionTransition& t, double gamma,
                      const ActionMask& mask) {
  if (t.done || gamma == 0.0) return t.reward;
  const int zone = layout.slice_of(t.action);
  const Vec online_out = forward(online_params, *t.next_state, Head::kQValues);
  const int best = masked_argmax(slice_of(online_out, layout, zone), mask);
  const Vec target_out = forward(target_params, *t.next_state, Head::kQValues);
  return t.reward + gamma * slice_of(target_out, layout, zone)[static_cast<std::size_t>(best)];
}

double dqn_train_step(MLPParams& params, const MLPParams& target_params, ReplayBuffer& buffer,
                      const AgentConfig& cfg, const HeadLayout& layout, TdTargetKind kind,
                      RngEngine& rng) {
  if (buffer.size() < cfg.batch_size) {
    throw std::logic_error("dqn_train_step: buffer smaller than the batch size");
  }
  const auto batch = buffer.sample(cfg.batch_size, rng);
  const ActionMask mask = ActionMask::all(layout.width);
  const auto n = static_cast<std::int64_t>(batch.size());

  std::vector<Gradients> per_sample(static_cast<std::size_t>(n));
  std::vector<double> sq_err(static_cast<std::size_t>(n), 0.0);
  parallel_for(n, [&](std::int64_t i) {
    const DecisionTransition& t = *batch[static_cast<std::size_t>(i)];
    const double target = (kind == TdTargetKind::kDqn)
                              ? dqn_td_target(target_params, layout, t, cfg.gamma, mask)
                              : ddqn_td_target(params, target_params, layout, t, cfg.gamma, mask);
    ForwardTrace trace;
    const Vec out = forward(params, *t.state, Head::kQValues, &trace);
    const double predicted = out[static_cast<std::size_t>(t.action)];
    const double err = predicted - target;
    sq_err[static_cast<std::size_t>(i)] = err * err;
    Vec out_grad(out.size(), 0.0);
    out_grad[static_cast<std::size_t>(t.action)] = 2.0 * err / static_cast<double>(n);
    per_sample[static_cast<std::size_t>(i)] = backward(params, trace, out_grad);
  });

  Gradients total = std::move(per_sample.front());
  for (std::size_t i = 1; i < per_sample.size(); ++i) total.add(per_sample[i]);
  OptimState opt;
  opt.learning_rate = cfg.eta;
  sgd_update(params, total, opt, StepDirection::kDescend);

  double loss = 0.0;
  for (double e : sq_err) loss += e;
  return loss / static_cast<double>(n);
}

void sync_target(const MLPParams& params, MLPParams& target_params) { target_params = params; }

void reinforce_update(MLPParams& params, const ObsTrajectory& trajectory, double gamma,
                      double alpha, const HeadLayout& layout, bool return_from_current,
                      double baseline) {
  if (trajectory.steps.empty()) throw std::invalid_argument("reinforce_update: empty trajectory");
  const std::size_t n = trajectory.steps.size();
  std::vector<double> g(n, 0.0);
  if (return_from_current) {
    std::vector<double> rewards(n);
    for (std::size_t t = 0; t < n; ++t) rewards[t] = trajectory.steps[t].reward;
    g = discounted_return(rewards, gamma);
  } else {
    // printed form: G_t = sum_{j > t} gamma^j r_j with absolute exponents
    double tail = 0.0;
    double pow_gamma = 1.0;
    std::vector<double> weighted(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      weighted[t] = pow_gamma * trajectory.steps[t].reward;
      pow_gamma *= gamma;
    }
    for (std::size_t t = n; t-- > 0;) {
      g[t] = tail;
      tail += weighted[t];
    }
  }

  OptimState opt;
  opt.learning_rate = alpha;
  for (std::size_t t = 0; t < n; ++t) {
    const ObsTransition& step = trajectory.steps[t];
    const double advantage = g[t] - baseline;
    if (advantage == 0.0) continue;
    ForwardTrace trace;
    const Vec out = forward(params, step.state, Head::kQValues, &trace);
    Vec out_grad(out.size(), 0.0);
    for (int action : step.actions) {
      const int zone = layout.slice_of(action);
      const int local = layout.local_of(action);
      const auto slice = slice_of(out, layout, zone);
      // grad log softmax: onehot - pi over the slice
      double m = slice[0];
      for (int a = 1; a < layout.width; ++a) m = std::max(m, slice[static_cast<std::size_t>(a)]);
      double total = 0.0;
      for (int a = 0; a < layout.width; ++a) total += std::exp(slice[static_cast<std::size_t>(a)] - m);
      for (int a = 0; a < layout.width; ++a) {
        const double pi = std::exp(slice[static_cast<std::size_t>(a)] - m) / total;
        const double onehot = (a == local) ? 1.0 : 0.0;
        out_grad[static_cast<std::size_t>(layout.offset(zone) + a)] += (onehot - pi) * advantage;
      }
    }
    const Gradients grads = backward(params, trace, out_grad);
    sgd_update(params, grads, opt, StepDirection::kAscend);
  }
}

DqnAgent::DqnAgent(const AgentConfig& cfg, int n_zones, ActionSpaceMode mode,
                   std::uint64_t seed, TdTargetKind kind)
    : cfg_(cfg),
      n_zones_(n_zones),
      mode_(mode),
      kind_(kind),
      layout_{n_zones, action_space_size(mode, n_zones)},
      mask_(ActionMask::all(action_space_size(mode, n_zones))),
      online_(MLPParams::zeros({1, 1})),
      target_(MLPParams::zeros({1, 1})),
      buffer_(cfg.buffer_capacity),
      train_rng_(make_rng(derive_seed(seed, 7))) {
  validate_agent_config(cfg);
  RngEngine init_rng = make_rng(seed);
  online_ = MLPParams::init(
      {3 * n_zones, cfg.hidden_size, cfg.hidden_size, layout_.output_size()}, init_rng);
  target_ = online_;  // before the first sync the target equals the init
}

const char* DqnAgent::name() const { return kind_ == TdTargetKind::kDqn ? "dqn" : "ddqn"; }

double DqnAgent::current_epsilon() const {
  if (env_steps_ >= cfg_.epsilon_decay_steps) return cfg_.epsilon_floor;
  const double f = static_cast<double>(env_steps_) / static_cast<double>(cfg_.epsilon_decay_steps);
  return cfg_.epsilon_start + (cfg_.epsilon_floor - cfg_.epsilon_start) * f;
}

FleetAgent::Decision DqnAgent::decide(const Obs& obs, bool explore, RngEngine&) {
  const Vec out = forward(online_, obs, Head::kQValues);  // one pass, 21 slices
  RelocationDirective d;
  d.mode = mode_;
  d.rows.resize(static_cast<std::size_t>(n_zones_));
  if (!explore) {
    // evaluation takes the max
    std::vector<int> locals(static_cast<std::size_t>(n_zones_), 0);
    for (int z = 0; z < n_zones_; ++z) {
      locals[static_cast<std::size_t>(z)] = masked_argmax(slice_of(out, layout_, z), mask_);
    }
    return {RelocationDirective::from_choices(mode_, n_zones_, locals), {}};
  }
  // Behavior rows: epsilon-uniform mixed with the softmax of the Q slice.
  // Each free vehicle samples its own target from its zone's row, so
  // exploration stays spread instead of moving whole zones in lockstep.
  const double eps = current_epsilon();
  for (int z = 0; z < n_zones_; ++z) {
    std::vector<double> row = softmax_distribution(slice_of(out, layout_, z), mask_);
    const double uniform = 1.0 / static_cast<double>(mask_.allowed_count());
    for (int a = 0; a < layout_.width; ++a) {
      if (!mask_.allowed[static_cast<std::size_t>(a)]) continue;
      row[static_cast<std::size_t>(a)] =
          eps * uniform + (1.0 - eps) * row[static_cast<std::size_t>(a)];
    }
    d.rows[static_cast<std::size_t>(z)] = std::move(row);
  }
  return {std::move(d), {}};
}

void DqnAgent::begin_episode() {
  loss_sum_ = 0.0;
  loss_count_ = 0;
}

double DqnAgent::scaled(double reward) {
  if (!cfg_.normalize_rewards) return reward;
  ++reward_count_;
  abs_reward_mean_ += (std::abs(reward) - abs_reward_mean_) / static_cast<double>(reward_count_);
  return abs_reward_mean_ > 1e-12 ? reward / abs_reward_mean_ : reward;
}

void DqnAgent::observe_step(const ObsTransition& t) {
  const double reward = scaled(t.reward);
  auto state = std::make_shared<const Obs>(t.state);
  auto next_state = std::make_shared<const Obs>(t.next_state);
  // one replay entry per executed (zone, action) decision
  for (int action : t.actions) {
    buffer_.push({state, action, reward, next_state, t.done});
  }
  if (buffer_.size() >= cfg_.batch_size) {
    for (int k = 0; k < std::max(1, cfg_.train_steps_per_env_step); ++k) {
      const double loss =
          dqn_train_step(online_, target_, buffer_, cfg_, layout_, kind_, train_rng_);
      loss_sum_ += loss;
      ++loss_count_;
    }
  }
  ++env_steps_;
  if (cfg_.target_sync_interval > 0 && env_steps_ % cfg_.target_sync_interval == 0) {
    sync_target(online_, target_);
  }
}

double DqnAgent::mean_loss_last_episode() const {
  return loss_count_ > 0 ? loss_sum_ / static_cast<double>(loss_count_) : 0.0;
}

void DqnAgent::save_checkpoint_to(const std::string& path) const {
  save_checkpoint(path, online_);
}

ReinforceAgent::ReinforceAgent(const AgentConfig& cfg, int n_zones, ActionSpaceMode mode,
                               std::uint64_t seed)
    : cfg_(cfg),
      n_zones_(n_zones),
      mode_(mode),
      layout_{n_zones, action_space_size(mode, n_zones)},
      mask_(ActionMask::all(action_space_size(mode, n_zones))),
      params_(MLPParams::zeros({1, 1})) {
  validate_agent_config(cfg);
  RngEngine init_rng = make_rng(seed);
  params_ = MLPParams::init(
      {3 * n_zones, cfg.hidden_size, cfg.hidden_size, layout_.output_size()}, init_rng);
}

FleetAgent::Decision ReinforceAgent::decide(const Obs& obs, bool explore, RngEngine&) {
  const Vec out = forward(params_, obs, Head::kQValues);
  if (!explore) {
    std::vector<int> locals(static_cast<std::size_t>(n_zones_), 0);
    for (int z = 0; z < n_zones_; ++z) {
      locals[static_cast<std::size_t>(z)] = masked_argmax(slice_of(out, layout_, z), mask_);
    }
    return {RelocationDirective::from_choices(mode_, n_zones_, locals), {}};
  }
  // the policy itself is the directive: each vehicle samples from its
  // zone's softmax slice
  RelocationDirective d;
  d.mode = mode_;
  d.rows.resize(static_cast<std::size_t>(n_zones_));
  for (int z = 0; z < n_zones_; ++z) {
    d.rows[static_cast<std::size_t>(z)] = softmax_distribution(slice_of(out, layout_, z), mask_);
  }
  return {std::move(d), {}};
}

void ReinforceAgent::end_episode(const ObsTrajectory& traj) {
  if (traj.steps.empty()) return;
  ObsTrajectory scaled = traj;
  if (cfg_.normalize_rewards) {
    for (auto& step : scaled.steps) {
      ++reward_count_;
      abs_reward_mean_ +=
          (std::abs(step.reward) - abs_reward_mean_) / static_cast<double>(reward_count_);
      if (abs_reward_mean_ > 1e-12) step.reward /= abs_reward_mean_;
    }
  }
  double baseline = 0.0;
  if (cfg_.reinforce_baseline) {
    baseline = return_baseline_;
  }
  reinforce_update(params_, scaled, cfg_.gamma, cfg_.alpha, layout_, cfg_.return_from_current,
                   baseline);
  if (cfg_.reinforce_baseline) {
    // moving average of the episode's leading return
    double g0 = 0.0;
    double pow_gamma = cfg_.return_from_current ? 1.0 : cfg_.gamma;
    for (std::size_t t = cfg_.return_from_current ? 0 : 1; t < scaled.steps.size(); ++t) {
      g0 += pow_gamma * scaled.steps[t].reward;
      pow_gamma *= cfg_.gamma;
    }
    ++episodes_seen_;
    return_baseline_ += (g0 - return_baseline_) / static_cast<double>(episodes_seen_);
  }
}

void ReinforceAgent::save_checkpoint_to(const std::string& path) const {
  save_checkpoint(path, params_);
}

EpisodeResult run_episode(FleetAgent& agent, SavEnv& env, bool train, RngEngine& rng) {
  EpisodeResult result;
  Obs obs = env.reset();
  agent.begin_episode();
  bool done = false;
  while (!done) {
    FleetAgent::Decision decision = agent.decide(obs, train, rng);
    auto step = env.step(decision.directive);
    ObsTransition t;
    t.state = std::move(obs);
    // the realized per-vehicle decisions, as sampled by the env
    t.actions = env.last_actions();
    t.reward = step.reward;
    t.next_state = step.observation;
    t.done = step.done;
    result.total_reward += step.reward;
    result.infos.push_back(std::move(step.info));
    if (train) agent.observe_step(t);
    result.trajectory.steps.push_back(std::move(t));
    obs = std::move(step.observation);
    done = step.done;
  }
  if (train) agent.end_episode(result.trajectory);
  return result;
}

}  // namespace savrl
