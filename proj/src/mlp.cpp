#include "savrl/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace savrl {

long MLPParams::param_count() const {
  long n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    n += static_cast<long>(weights[l].size()) + static_cast<long>(biases[l].size());
  }
  return n;
}

MLPParams MLPParams::zeros(std::vector<int> sizes) {
  if (sizes.size() < 2) throw std::invalid_argument("MLPParams: need at least two layer sizes");
  MLPParams p;
  p.layer_sizes = std::move(sizes);
  for (std::size_t l = 0; l + 1 < p.layer_sizes.size(); ++l) {
    p.weights.emplace_back(p.layer_sizes[l + 1], p.layer_sizes[l]);
    p.biases.emplace_back(static_cast<std::size_t>(p.layer_sizes[l + 1]), 0.0);
  }
  return p;
}

MLPParams MLPParams::init(std::vector<int> sizes, RngEngine& rng) {
  MLPParams p = zeros(std::move(sizes));
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    const double fan_in = p.layer_sizes[l];
    const double fan_out = p.layer_sizes[l + 1];
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> unif(-bound, bound);
    for (double& w : p.weights[l].a) w = unif(rng);
  }
  return p;
}

Vec relu(Vec x) {
  for (double& v : x) v = std::max(v, 0.0);
  return x;
}

Vec softmax(Vec x) {
  const double m = *std::max_element(x.begin(), x.end());
  double sum = 0.0;
  for (double& v : x) {
    v = std::exp(v - m);
    sum += v;
  }
  for (double& v : x) v /= sum;
  return x;
}

Vec forward(const MLPParams& params, std::span<const double> x, Head head,
            ForwardTrace* trace) {
  if (static_cast<int>(x.size()) != params.input_size()) {
    throw std::invalid_argument("forward: input length does not match layer 0");
  }
  const std::size_t n_layers = params.weights.size();
  Vec act(x.begin(), x.end());
  if (trace) {
    trace->input = act;
    trace->pre.assign(n_layers, {});
    trace->act.assign(n_layers, {});
  }
  Vec z;
  for (std::size_t l = 0; l < n_layers; ++l) {
    affine(params.weights[l], params.biases[l], act, z);
    if (trace) trace->pre[l] = z;
    act = (l + 1 < n_layers) ? relu(std::move(z)) : std::move(z);
    if (trace) trace->act[l] = act;
  }
  if (head == Head::kActionDistribution) return softmax(std::move(act));
  return act;
}

Gradients Gradients::zeros_like(const MLPParams& p) {
  Gradients g;
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    g.weights.emplace_back(p.weights[l].rows, p.weights[l].cols);
    g.biases.emplace_back(p.biases[l].size(), 0.0);
  }
  return g;
}

void Gradients::add(const Gradients& other) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (std::size_t i = 0; i < weights[l].a.size(); ++i) weights[l].a[i] += other.weights[l].a[i];
    for (std::size_t i = 0; i < biases[l].size(); ++i) biases[l][i] += other.biases[l][i];
  }
}

void Gradients::scale(double s) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (double& v : weights[l].a) v *= s;
    for (double& v : biases[l]) v *= s;
  }
}

Gradients backward(const MLPParams& params, const ForwardTrace& trace,
                   std::span<const double> output_gradient) {
  const std::size_t n_layers = params.weights.size();
  if (trace.pre.size() != n_layers) throw std::invalid_argument("backward: trace layer mismatch");
  if (static_cast<int>(output_gradient.size()) != params.output_size()) {
    throw std::invalid_argument("backward: output gradient length mismatch");
  }
  Gradients g = Gradients::zeros_like(params);
  Vec delta(output_gradient.begin(), output_gradient.end());
  Vec delta_prev;
  for (std::size_t l = n_layers; l-- > 0;) {
    const Vec& below = (l == 0) ? trace.input : trace.act[l - 1];
    accumulate_outer(delta, below, g.weights[l], g.biases[l]);
    if (l > 0) {
      matvec_transpose(params.weights[l], delta, delta_prev);
      const Vec& z = trace.pre[l - 1];
      for (std::size_t i = 0; i < delta_prev.size(); ++i) {
        if (z[i] <= 0.0) delta_prev[i] = 0.0;
      }
      delta.swap(delta_prev);
    }
  }
  return g;
}

void sgd_update(MLPParams& params, const Gradients& grads, OptimState& opt,
                StepDirection direction) {
  const double sign = (direction == StepDirection::kDescend) ? -1.0 : 1.0;
  const bool use_momentum = opt.momentum > 0.0;
  if (use_momentum && opt.velocity_w.empty()) {
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
      opt.velocity_w.emplace_back(params.weights[l].rows, params.weights[l].cols);
      opt.velocity_b.emplace_back(params.biases[l].size(), 0.0);
    }
  }
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    for (double v : grads.weights[l].a) {
      if (!std::isfinite(v)) {
        throw std::runtime_error("sgd_update: non-finite weight gradient in layer " +
                                 std::to_string(l));
      }
    }
    for (double v : grads.biases[l]) {
      if (!std::isfinite(v)) {
        throw std::runtime_error("sgd_update: non-finite bias gradient in layer " +
                                 std::to_string(l));
      }
    }
    if (use_momentum) {
      for (std::size_t i = 0; i < params.weights[l].a.size(); ++i) {
        double& vel = opt.velocity_w[l].a[i];
        vel = opt.momentum * vel + grads.weights[l].a[i];
        params.weights[l].a[i] += sign * opt.learning_rate * vel;
      }
      for (std::size_t i = 0; i < params.biases[l].size(); ++i) {
        double& vel = opt.velocity_b[l][i];
        vel = opt.momentum * vel + grads.biases[l][i];
        params.biases[l][i] += sign * opt.learning_rate * vel;
      }
    } else {
      for (std::size_t i = 0; i < params.weights[l].a.size(); ++i) {
        params.weights[l].a[i] += sign * opt.learning_rate * grads.weights[l].a[i];
      }
      for (std::size_t i = 0; i < params.biases[l].size(); ++i) {
        params.biases[l][i] += sign * opt.learning_rate * grads.biases[l][i];
      }
    }
  }
}

namespace {

double loss_at(const MLPParams& params, const LossSpec& loss) {
  const Vec out = forward(params, loss.input, Head::kQValues);
  return loss.value(out);
}

}  // namespace

GradCheckReport gradient_check(const MLPParams& params, const LossSpec& loss, double fd_step) {
  ForwardTrace trace;
  const Vec out = forward(params, loss.input, Head::kQValues, &trace);
  const Vec og = loss.out_grad(out);
  const Gradients analytic = backward(params, trace, og);

  GradCheckReport report;
  MLPParams probe = params;
  auto check_one = [&](double& slot, double analytic_g, int layer) {
    const double saved = slot;
    slot = saved + fd_step;
    const double up = loss_at(probe, loss);
    slot = saved - fd_step;
    const double down = loss_at(probe, loss);
    slot = saved;
    const double fd = (up - down) / (2.0 * fd_step);
    const double denom = std::max(std::abs(analytic_g) + std::abs(fd), 1e-8);
    const double rel = std::abs(analytic_g - fd) / denom;
    if (rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst_layer = layer;
    }
    ++report.params_checked;
  };
  for (std::size_t l = 0; l < probe.weights.size(); ++l) {
    for (std::size_t i = 0; i < probe.weights[l].a.size(); ++i) {
      check_one(probe.weights[l].a[i], analytic.weights[l].a[i], static_cast<int>(l));
    }
    for (std::size_t i = 0; i < probe.biases[l].size(); ++i) {
      check_one(probe.biases[l][i], analytic.biases[l][i], static_cast<int>(l));
    }
  }
  return report;
}

namespace {

constexpr char kMagic[8] = {'S', 'A', 'V', 'R', 'L', 'M', 'L', 'P'};

void put_u32(std::ofstream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ofstream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::ifstream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::ifstream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const MLPParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out.write(kMagic, sizeof(kMagic));
  put_u32(out, static_cast<std::uint32_t>(params.layer_sizes.size()));
  for (int s : params.layer_sizes) put_u32(out, static_cast<std::uint32_t>(s));
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    for (double v : params.weights[l].a) put_f64(out, v);
    for (double v : params.biases[l]) put_f64(out, v);
  }
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

MLPParams load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) {
    throw std::runtime_error("not a savrl checkpoint: " + path);
  }
  const std::uint32_t n_sizes = get_u32(in);
  if (n_sizes < 2 || n_sizes > 64) throw std::runtime_error("corrupt checkpoint header: " + path);
  std::vector<int> sizes(n_sizes);
  for (auto& s : sizes) s = static_cast<int>(get_u32(in));
  MLPParams params = MLPParams::zeros(sizes);
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    for (double& v : params.weights[l].a) v = get_f64(in);
    for (double& v : params.biases[l]) v = get_f64(in);
  }
  if (!in) throw std::runtime_error("truncated checkpoint: " + path);
  return params;
}

}  // namespace savrl
