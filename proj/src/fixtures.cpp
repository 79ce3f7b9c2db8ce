#include "savrl/fixtures.hpp"

namespace savrl::fixtures {

TabularMDP chain() {
  TabularMDP m(3, 2, 0.9);
  // action 0: advance, reward 1
  m.p(0, 0, 1) = 1.0;
  m.r(0, 0, 1) = 1.0;
  m.p(1, 0, 2) = 1.0;
  m.r(1, 0, 2) = 1.0;
  // action 1: stay, reward 0
  m.p(0, 1, 0) = 1.0;
  m.p(1, 1, 1) = 1.0;
  m.make_terminal(2);
  return m;
}

TabularMDP gridworld4() {
  constexpr int kSide = 4;
  constexpr int kGoal = kSide * kSide - 1;
  TabularMDP m(kSide * kSide, 4, 0.9);
  const int dr[4] = {-1, 0, 1, 0};  // N, E, S, W
  const int dc[4] = {0, 1, 0, -1};
  for (int s = 0; s < m.n_states; ++s) {
    const int row = s / kSide;
    const int col = s % kSide;
    for (int a = 0; a < 4; ++a) {
      int r2 = row + dr[a];
      int c2 = col + dc[a];
      if (r2 < 0 || r2 >= kSide || c2 < 0 || c2 >= kSide) {
        r2 = row;
        c2 = col;
      }
      const int s2 = r2 * kSide + c2;
      m.p(s, a, s2) = 1.0;
      m.r(s, a, s2) = -1.0;
    }
  }
  m.make_terminal(kGoal);
  return m;
}

TabularMDP two_arm_bandit() {
  TabularMDP m(2, 2, 1.0);
  m.p(0, 0, 1) = 1.0;
  m.r(0, 0, 1) = 1.0;
  m.p(0, 1, 1) = 1.0;
  m.r(0, 1, 1) = 0.0;
  m.make_terminal(1);
  return m;
}

TabularMDP self_loop() {
  TabularMDP m(2, 1, 0.9);
  m.p(0, 0, 0) = 0.5;
  m.r(0, 0, 0) = 1.0;
  m.p(0, 0, 1) = 0.5;
  m.r(0, 0, 1) = 0.0;
  m.make_terminal(1);
  return m;
}

TabularMDP stochastic_two_outcome() {
  TabularMDP m(3, 1, 1.0);
  m.p(0, 0, 2) = 0.5;
  m.r(0, 0, 2) = 4.0;
  m.p(0, 0, 1) = 0.5;
  m.r(0, 0, 1) = 0.0;
  m.p(1, 0, 2) = 1.0;
  m.r(1, 0, 2) = 2.0;
  m.make_terminal(2);
  return m;
}

TabularMDP fixed_horizon_tree(int depth, double best_leaf) {
  // States: breadth-first complete binary tree plus one shared terminal.
  const int internal = (1 << depth) - 1;     // nodes with children
  const int leaves = 1 << depth;
  const int terminal = internal + leaves;    // single sink after the leaves
  TabularMDP m(terminal + 1, 2, 1.0);
  for (int node = 0; node < internal; ++node) {
    for (int a = 0; a < 2; ++a) {
      const int child = 2 * node + 1 + a;
      m.p(node, a, child) = 1.0;
      if (child >= internal) {
        // edge into a leaf: leftmost leaf pays best_leaf
        m.r(node, a, child) = (child == internal) ? best_leaf : 0.0;
      }
    }
  }
  for (int leaf = internal; leaf < terminal; ++leaf) {
    for (int a = 0; a < 2; ++a) {
      m.p(leaf, a, terminal) = 1.0;
    }
  }
  m.make_terminal(terminal);
  return m;
}

}  // namespace savrl::fixtures
