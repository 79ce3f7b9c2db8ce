// Compares the OpenMP kernels against their serial references: wall time and
// bit-exactness. The parallel paths only ever write disjoint outputs, so any
// nonzero difference is a bug, not rounding.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <vector>

#include "savrl/fixtures.hpp"
#include "savrl/linalg.hpp"
#include "savrl/mlp.hpp"
#include "savrl/parallel.hpp"
#include "savrl/rng.hpp"
#include "savrl/solvers.hpp"

using namespace savrl;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void report(const char* name, double serial_ms, double parallel_ms, double max_diff) {
  std::printf("%-32s serial %9.2f ms   omp %9.2f ms   speedup %5.2fx   max|diff| %g\n", name,
              serial_ms, parallel_ms, serial_ms / parallel_ms, max_diff);
}

void bench_affine(int repeats) {
  RngEngine rng = make_rng(1);
  MLPParams net = MLPParams::init({63, 120, 120, 84}, rng);
  const int batch = 256;
  std::vector<Vec> inputs(batch, Vec(63));
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (auto& x : inputs) {
    for (double& v : x) v = unif(rng);
  }

  std::vector<Vec> out_serial(batch), out_parallel(batch);
  const auto t0 = Clock::now();
  for (int rep = 0; rep < repeats; ++rep) {
    for (int i = 0; i < batch; ++i) {
      Vec h1, h2;
      affine_serial(net.weights[0], net.biases[0], inputs[i], h1);
      h1 = relu(std::move(h1));
      affine_serial(net.weights[1], net.biases[1], h1, h2);
      h2 = relu(std::move(h2));
      affine_serial(net.weights[2], net.biases[2], h2, out_serial[i]);
    }
  }
  const double serial_ms = ms_since(t0);

  const auto t1 = Clock::now();
  for (int rep = 0; rep < repeats; ++rep) {
    parallel_for(batch, [&](std::int64_t i) {
      Vec h1, h2;
      affine_serial(net.weights[0], net.biases[0], inputs[i], h1);
      h1 = relu(std::move(h1));
      affine_serial(net.weights[1], net.biases[1], h1, h2);
      h2 = relu(std::move(h2));
      affine_serial(net.weights[2], net.biases[2], h2, out_parallel[i]);
    });
  }
  const double parallel_ms = ms_since(t1);

  double max_diff = 0.0;
  for (int i = 0; i < batch; ++i) {
    for (std::size_t j = 0; j < out_serial[i].size(); ++j) {
      max_diff = std::max(max_diff, std::abs(out_serial[i][j] - out_parallel[i][j]));
    }
  }
  report("batched MLP forward (x256)", serial_ms, parallel_ms, max_diff);
}

void bench_affine_rows(int repeats) {
  RngEngine rng = make_rng(2);
  const Mat w = [&] {
    Mat m(512, 512);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (double& v : m.a) v = unif(rng);
    return m;
  }();
  Vec b(512, 0.1), x(512, 0.5), y1, y2;
  const auto t0 = Clock::now();
  for (int rep = 0; rep < repeats * 64; ++rep) affine_serial(w, b, x, y1);
  const double serial_ms = ms_since(t0);
  const auto t1 = Clock::now();
  for (int rep = 0; rep < repeats * 64; ++rep) affine_omp(w, b, x, y2);
  const double parallel_ms = ms_since(t1);
  double max_diff = 0.0;
  for (std::size_t j = 0; j < y1.size(); ++j) max_diff = std::max(max_diff, std::abs(y1[j] - y2[j]));
  report("affine 512x512 (row split)", serial_ms, parallel_ms, max_diff);
}

void bench_bellman(int repeats) {
  // dense random MDP, big enough that the sweep dispatches to the omp path
  RngEngine rng = make_rng(3);
  const int ns = 600, na = 8;
  TabularMDP mdp(ns, na, 0.95);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int s = 0; s < ns; ++s) {
    for (int a = 0; a < na; ++a) {
      double total = 0.0;
      for (int s2 = 0; s2 < ns; ++s2) {
        const double p = unif(rng);
        mdp.p(s, a, s2) = p;
        mdp.r(s, a, s2) = unif(rng) - 0.5;
        total += p;
      }
      for (int s2 = 0; s2 < ns; ++s2) mdp.p(s, a, s2) /= total;
    }
  }
  std::vector<double> v(ns, 0.0), out1, out2;
  for (int s = 0; s < ns; ++s) v[s] = unif(rng);
  const auto t0 = Clock::now();
  for (int rep = 0; rep < repeats; ++rep) bellman_sweep_serial(mdp, v, out1);
  const double serial_ms = ms_since(t0);
  const auto t1 = Clock::now();
  for (int rep = 0; rep < repeats; ++rep) bellman_sweep(mdp, v, out2);
  const double parallel_ms = ms_since(t1);
  double max_diff = 0.0;
  for (int s = 0; s < ns; ++s) max_diff = std::max(max_diff, std::abs(out1[s] - out2[s]));
  report("Bellman sweep 600x8x600", serial_ms, parallel_ms, max_diff);
}

void bench_qlearning_batch(int runs) {
  // independent tabular runs with per-run streams, merged afterwards
  const TabularMDP mdp = fixtures::gridworld4();
  auto one_run = [&](std::uint64_t seed, QTable& out) {
    TabularEnv env(mdp, seed, -1);
    QLearnConfig cfg;
    cfg.eta = 0.1;
    cfg.gamma = mdp.gamma;
    cfg.episodes = 200;
    cfg.epsilon = EpsilonSchedule::for_episodes(cfg.episodes);
    RngEngine rng = make_rng(derive_seed(seed, 5));
    out = q_learning(env, mdp.n_states, mdp.n_actions, cfg, rng).q;
  };
  std::vector<QTable> serial_q(runs), parallel_q(runs);
  const auto t0 = Clock::now();
  for (int r = 0; r < runs; ++r) one_run(1000 + r, serial_q[r]);
  const double serial_ms = ms_since(t0);
  const auto t1 = Clock::now();
  parallel_for(runs, [&](std::int64_t r) { one_run(1000 + r, parallel_q[r]); });
  const double parallel_ms = ms_since(t1);
  double max_diff = 0.0;
  for (int r = 0; r < runs; ++r) {
    for (std::size_t i = 0; i < serial_q[r].q.size(); ++i) {
      max_diff = std::max(max_diff, std::abs(serial_q[r].q[i] - parallel_q[r].q[i]));
    }
  }
  report("Q-learning batch (200 runs)", serial_ms, parallel_ms, max_diff);
}

}  // namespace

int main(int argc, char** argv) {
  int repeats = 20;
  if (argc > 1) repeats = std::max(1, std::atoi(argv[1]));
  std::printf("threads: %d (set OMP_NUM_THREADS to change)\n", max_threads());
  bench_affine(repeats);
  bench_affine_rows(repeats);
  bench_bellman(repeats);
  bench_qlearning_batch(200);
  return 0;
}
