#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "savrl/linalg.hpp"
#include "savrl/rng.hpp"

namespace savrl {

enum class Head {
  kQValues,            // raw final affine outputs
  kActionDistribution  // softmax over the full output vector
};

enum class StepDirection { kDescend, kAscend };

// Weights and biases of the fixed feedforward stack: three affine layers
// with ReLU between them (after layers 0 and 1, none after the last).
// The default fleet configuration is {3n, 120, 120, n*width}.
struct MLPParams {
  std::vector<int> layer_sizes;  // e.g. {63, 120, 120, 84}
  std::vector<Mat> weights;      // weights[l]: layer_sizes[l+1] x layer_sizes[l]
  std::vector<Vec> biases;

  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
  long param_count() const;

  // Uniform(-sqrt(6/(fan_in+fan_out)), +...) weights, zero biases.
  static MLPParams init(std::vector<int> sizes, RngEngine& rng);
  static MLPParams zeros(std::vector<int> sizes);
};

// Per-layer pre-activations and activations of one forward pass, kept for
// the backward pass.
struct ForwardTrace {
  Vec input;
  std::vector<Vec> pre;  // z_l per layer
  std::vector<Vec> act;  // post-activation per layer (act.back() is raw)
};

struct Gradients {
  std::vector<Mat> weights;
  std::vector<Vec> biases;

  static Gradients zeros_like(const MLPParams& p);
  void add(const Gradients& other);
  void scale(double s);
};

// Learning-rate state for sgd_update. Momentum accumulators exist behind
// momentum > 0 and default off.
struct OptimState {
  double learning_rate = 1e-3;
  double momentum = 0.0;
  std::vector<Mat> velocity_w;  // allocated on first use when momentum > 0
  std::vector<Vec> velocity_b;
};

Vec relu(Vec x);
// Max-subtracted for stability; entries positive and summing to 1.
Vec softmax(Vec x);

// Full forward pass. The trace, when requested, always stores the raw final
// outputs; the distribution head only changes the returned vector.
Vec forward(const MLPParams& params, std::span<const double> x, Head head,
            ForwardTrace* trace = nullptr);

// Exact reverse-mode gradients of the scalar whose gradient w.r.t. the raw
// final affine outputs is `output_gradient`. Callers using the distribution
// head chain the softmax jacobian into output_gradient themselves (for
// log-softmax losses that is just pi - onehot, negated for ascent).
Gradients backward(const MLPParams& params, const ForwardTrace& trace,
                   std::span<const double> output_gradient);

// theta <- theta -/+ lr * grad (descend/ascend). Throws naming the layer on
// a non-finite gradient entry.
void sgd_update(MLPParams& params, const Gradients& grads, OptimState& opt,
                StepDirection direction);

// A differentiable scalar loss on the network output, with both the value
// (for finite differences) and the output gradient (for backward).
struct LossSpec {
  Vec input;
  std::function<double(std::span<const double> raw_out)> value;
  std::function<Vec(std::span<const double> raw_out)> out_grad;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  long params_checked = 0;
  int worst_layer = -1;
};

// Central differences vs backward on every parameter. Meant for small
// networks (the shipped check uses sizes {6,5,5,4}).
GradCheckReport gradient_check(const MLPParams& params, const LossSpec& loss,
                               double fd_step = 1e-5);

// Binary checkpoint, little-endian: magic "SAVRLMLP", u32 layer count, u32
// sizes, then per layer the row-major weight matrix and the bias vector as
// f64. Loadable for resumed runs and test fixtures.
void save_checkpoint(const std::string& path, const MLPParams& params);
MLPParams load_checkpoint(const std::string& path);

}  // namespace savrl
