#include <gtest/gtest.h>

#include <random>

#include "savrl/linalg.hpp"
#include "savrl/rng.hpp"

using namespace savrl;

namespace {

Mat random_mat(int rows, int cols, RngEngine& rng) {
  Mat m(rows, cols);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (double& v : m.a) v = unif(rng);
  return m;
}

Vec random_vec(int n, RngEngine& rng) {
  Vec v(static_cast<std::size_t>(n));
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (double& x : v) x = unif(rng);
  return v;
}

}  // namespace

TEST(Linalg, AffineMatchesNaiveTripleLoop) {
  RngEngine rng = make_rng(1);
  const Mat w = random_mat(7, 5, rng);
  const Vec b = random_vec(7, rng);
  const Vec x = random_vec(5, rng);
  Vec y;
  affine(w, b, x, y);
  for (int r = 0; r < 7; ++r) {
    double want = b[r];
    for (int c = 0; c < 5; ++c) want += w(r, c) * x[c];
    EXPECT_NEAR(y[r], want, 1e-12);
  }
}

// The omp kernels write disjoint rows, so they must equal the serial
// reference bit for bit on any shape.
TEST(Linalg, ParallelKernelsBitIdenticalToSerial) {
  RngEngine rng = make_rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<int> dim(1, 70);
    const int rows = dim(rng);
    const int cols = dim(rng);
    const Mat w = random_mat(rows, cols, rng);
    const Vec b = random_vec(rows, rng);
    const Vec x = random_vec(cols, rng);
    Vec y1, y2;
    affine_serial(w, b, x, y1);
    affine_omp(w, b, x, y2);
    EXPECT_EQ(y1, y2);

    const Vec d = random_vec(rows, rng);
    Vec t1, t2;
    matvec_transpose_serial(w, d, t1);
    matvec_transpose_omp(w, d, t2);
    EXPECT_EQ(t1, t2);

    Mat g1(rows, cols), g2(rows, cols);
    Vec gb1(static_cast<std::size_t>(rows), 0.0), gb2(static_cast<std::size_t>(rows), 0.0);
    accumulate_outer_serial(d, x, g1, gb1);
    accumulate_outer_omp(d, x, g2, gb2);
    EXPECT_EQ(g1.a, g2.a);
    EXPECT_EQ(gb1, gb2);
  }
}

TEST(Linalg, AccumulateOuterAddsOntoExisting) {
  RngEngine rng = make_rng(3);
  (void)rng;
  Mat g(3, 2);
  g.a = {1, 1, 1, 1, 1, 1};
  Vec gb = {1, 1, 1};
  const Vec d = {1.0, 2.0, 3.0};
  const Vec x = {0.5, -0.5};
  accumulate_outer(d, x, g, gb);
  EXPECT_DOUBLE_EQ(g(0, 0), 1.5);
  EXPECT_DOUBLE_EQ(g(2, 1), 1.0 - 1.5);
  EXPECT_DOUBLE_EQ(gb[2], 4.0);
}
