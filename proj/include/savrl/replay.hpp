#pragma once

#include <memory>
#include <vector>

#include "savrl/mdp.hpp"
#include "savrl/rng.hpp"

namespace savrl {

// One per-zone decision in observation form. Observations are shared between
// the step's decisions (21 of them for the default city), hence the pointers.
struct DecisionTransition {
  std::shared_ptr<const Obs> state;
  int action = 0;  // global head index: zone * head_width + local action
  double reward = 0.0;
  std::shared_ptr<const Obs> next_state;
  bool done = false;
};

// Fixed-capacity ring of transitions with uniform sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}

  void push(DecisionTransition t) {
    if (ring_.size() < capacity_) {
      ring_.push_back(std::move(t));
    } else {
      ring_[next_] = std::move(t);
    }
    next_ = (next_ + 1) % capacity_;
  }

  std::size_t size() const { return ring_.size(); }
  std::size_t capacity() const { return capacity_; }

  // Uniform sample without replacement; requires size() >= batch.
  std::vector<const DecisionTransition*> sample(std::size_t batch, RngEngine& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<DecisionTransition> ring_;
};

}  // namespace savrl
