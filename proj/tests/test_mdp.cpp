#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "savrl/fixtures.hpp"
#include "savrl/mdp.hpp"

using namespace savrl;

namespace {

TabularMDP two_state_ok() {
  TabularMDP m(2, 1, 0.9);
  m.p(0, 0, 1) = 1.0;
  m.r(0, 0, 1) = 1.0;
  m.make_terminal(1);
  return m;
}

}  // namespace

TEST(ValidateMdp, WellFormedHasNoViolations) {
  EXPECT_TRUE(validate_mdp(two_state_ok()).empty());
  EXPECT_TRUE(validate_mdp(fixtures::chain()).empty());
  EXPECT_TRUE(validate_mdp(fixtures::gridworld4()).empty());
}

TEST(ValidateMdp, RowSumViolationNamesStateAction) {
  TabularMDP m = two_state_ok();
  m.p(0, 0, 1) = 0.9;
  const auto violations = validate_mdp(m);
  ASSERT_EQ(violations.size(), 1u);
  EXPECT_EQ(violations[0].state, 0);
  EXPECT_EQ(violations[0].action, 0);
  EXPECT_NE(violations[0].rule.find("sums"), std::string::npos);
}

TEST(ValidateMdp, NegativeProbabilityIsARangeViolation) {
  TabularMDP m = two_state_ok();
  m.p(0, 0, 0) = -0.1;
  m.p(0, 0, 1) = 1.1;
  const auto violations = validate_mdp(m);
  bool found = false;
  for (const auto& v : violations) {
    if (v.rule.find("[0,1]") != std::string::npos) found = true;
  }
  EXPECT_TRUE(found);
}

TEST(SampleStep, DeterministicRow) {
  RngEngine rng = make_rng(1);
  const auto m = two_state_ok();
  const auto [next, reward] = sample_step(m, 0, 0, rng);
  EXPECT_EQ(next, 1);
  EXPECT_DOUBLE_EQ(reward, 1.0);
}

TEST(SampleStep, TerminalSelfLoopsWithZeroReward) {
  RngEngine rng = make_rng(2);
  const auto m = two_state_ok();
  const auto [next, reward] = sample_step(m, 1, 0, rng);
  EXPECT_EQ(next, 1);
  EXPECT_DOUBLE_EQ(reward, 0.0);
}

TEST(SampleStep, UniformRowWithinThreeSigma) {
  TabularMDP m(2, 1, 1.0);
  m.p(0, 0, 0) = 0.5;
  m.p(0, 0, 1) = 0.5;
  m.terminal = {};  // plain two-outcome row, no terminals needed
  RngEngine rng = make_rng(3);
  const int n = 100000;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    if (sample_step(m, 0, 0, rng).first == 0) ++hits;
  }
  const double sigma = std::sqrt(0.25 * n);
  EXPECT_NEAR(hits, n / 2.0, 3.0 * sigma);
}

// empirical next-state frequencies match the transition row within 4 sigma
TEST(SampleStep, FrequenciesMatchRowFourSigma) {
  TabularMDP m(3, 1, 1.0);
  m.p(0, 0, 0) = 0.2;
  m.p(0, 0, 1) = 0.5;
  m.p(0, 0, 2) = 0.3;
  RngEngine rng = make_rng(4);
  const int n = 100000;
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < n; ++i) ++counts[sample_step(m, 0, 0, rng).first];
  for (int s2 = 0; s2 < 3; ++s2) {
    const double p = m.p(0, 0, s2);
    const double sigma = std::sqrt(p * (1 - p) * n);
    EXPECT_NEAR(counts[s2], p * n, 4.0 * sigma) << "s2=" << s2;
  }
}

TEST(SampleStep, OutOfRangeThrows) {
  RngEngine rng = make_rng(5);
  const auto m = two_state_ok();
  EXPECT_THROW(sample_step(m, 2, 0, rng), std::out_of_range);
  EXPECT_THROW(sample_step(m, 0, 1, rng), std::out_of_range);
}

TEST(DiscountedReturn, GammaZeroTruncates) {
  const double r[] = {1, 1, 1};
  EXPECT_EQ(discounted_return(r, 0.0), (std::vector<double>{1, 1, 1}));
}

TEST(DiscountedReturn, GammaOneIsSuffixSums) {
  const double r[] = {1, 1, 1};
  EXPECT_EQ(discounted_return(r, 1.0), (std::vector<double>{3, 2, 1}));
}

TEST(DiscountedReturn, HalfGammaHandComputed) {
  const double r[] = {2, 0, 4};
  EXPECT_EQ(discounted_return(r, 0.5), (std::vector<double>{3, 2, 4}));
}

TEST(DiscountedReturn, LinearInRewards) {
  RngEngine rng = make_rng(6);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> r(17);
    for (double& x : r) x = unif(rng);
    const double a = unif(rng) * 3.0;
    std::vector<double> scaled = r;
    for (double& x : scaled) x *= a;
    const auto g = discounted_return(r, 0.9);
    const auto ga = discounted_return(scaled, 0.9);
    for (std::size_t t = 0; t < r.size(); ++t) EXPECT_NEAR(ga[t], a * g[t], 1e-12);
  }
}

TEST(Trajectory, ChainingHoldsForEnvRollout) {
  TabularEnv env(fixtures::chain(), 11, 0);
  Trajectory traj;
  int s = env.reset();
  for (int t = 0; t < 10; ++t) {
    const auto step = env.step(0);
    traj.steps.push_back({s, 0, step.reward, step.observation, step.done});
    s = step.observation;
    if (step.done) break;
  }
  EXPECT_TRUE(trajectory_chains(traj));
  EXPECT_EQ(traj.total_steps(), 2u);
}

TEST(EnvContract, StepBeforeResetThrows) {
  TabularEnv env(fixtures::chain(), 12, 0);
  EXPECT_THROW(env.step(0), std::logic_error);
}

TEST(EnvContract, StepAfterDoneThrows) {
  TabularEnv env(fixtures::chain(), 13, 0);
  env.reset();
  env.step(0);
  const auto last = env.step(0);
  ASSERT_TRUE(last.done);
  EXPECT_THROW(env.step(0), std::logic_error);
  env.reset();
  EXPECT_NO_THROW(env.step(0));
}

TEST(EnvContract, CloseIsIdempotentAndFinal) {
  TabularEnv env(fixtures::chain(), 14, 0);
  env.reset();
  env.close();
  EXPECT_NO_THROW(env.close());
  EXPECT_THROW(env.reset(), std::logic_error);
  EXPECT_THROW(env.step(0), std::logic_error);
}

TEST(MdpFile, RoundTripsThroughText) {
  const auto path = std::filesystem::temp_directory_path() / "savrl_chain.mdp";
  const TabularMDP m = fixtures::chain();
  save_mdp(path.string(), m);
  const TabularMDP loaded = load_mdp(path.string());
  EXPECT_EQ(loaded.n_states, m.n_states);
  EXPECT_EQ(loaded.n_actions, m.n_actions);
  EXPECT_DOUBLE_EQ(loaded.gamma, m.gamma);
  EXPECT_EQ(loaded.terminal, m.terminal);
  EXPECT_EQ(loaded.transition, m.transition);
  EXPECT_EQ(loaded.reward, m.reward);
  std::filesystem::remove(path);
}
