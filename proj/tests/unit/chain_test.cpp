#include "knapmix/chain.hpp"

#include <gtest/gtest.h>

#include <map>

#include "knapmix/error.hpp"
#include "knapmix/io.hpp"

using knapmix::ChainConfig;
using knapmix::KnapsackInstance;
using knapmix::Solution;

namespace {
KnapsackInstance figure1() { return KnapsackInstance({5, 3, 2, 1}, 9); }
}  // namespace

TEST(Chain, StepExamples) {
  const auto k = figure1();
  EXPECT_EQ(knapmix::step(k, Solution::from_string("0000"), 0).to_string(), "1000");
  EXPECT_EQ(knapmix::step(k, Solution::from_string("1101"), 2).to_string(), "1101");
  EXPECT_EQ(knapmix::step(k, Solution::from_string("1101"), 3).to_string(), "1100");
  for (std::uint64_t u = 4; u < 8; ++u) {
    EXPECT_EQ(knapmix::step(k, Solution::from_string("0110"), u).to_string(), "0110");
  }
  EXPECT_THROW(knapmix::step(k, Solution::from_string("0000"), 8), knapmix::InputError);
  EXPECT_THROW(knapmix::step(k, Solution::from_string("1111"), 0), knapmix::PreconditionError);
}

// Every draw u >= n holds: the lazy branch alone has probability exactly 1/2.
TEST(Chain, HoldingBranchIsHalfOfTheDraws) {
  const auto k = figure1();
  for (const auto& x : knapmix::enumerate(k).solutions()) {
    int holds = 0;
    for (std::uint64_t u = 0; u < 8; ++u) holds += knapmix::step(k, x, u) == x;
    EXPECT_GE(holds, 4) << x.to_string();
  }
}

TEST(Chain, RunZeroStepsIsStart) {
  const auto t = knapmix::run(ChainConfig(figure1(), 5), 0);
  ASSERT_EQ(t.states.size(), 1U);
  EXPECT_EQ(t.states[0], Solution::zeros(4));
}

TEST(Chain, RejectsInfeasibleStart) {
  EXPECT_THROW(ChainConfig(figure1(), 1, Solution::from_string("1110")), knapmix::PreconditionError);
}

// Pinned from a first run; guards the documented stream derivation.
TEST(Chain, TwoStateRegression) {
  const auto t = knapmix::run(ChainConfig(KnapsackInstance({1}, 1), 42), 3);
  std::string seq;
  for (const auto& s : t.states) seq += s.to_string();
  EXPECT_EQ(seq, "0001");
}

TEST(Chain, LongRunStaysFeasibleAndMovesOneBit) {
  const auto k = figure1();
  const auto t = knapmix::run(ChainConfig(k, 7), 10'000);
  ASSERT_EQ(t.steps(), 10'000U);
  for (std::size_t s = 0; s < t.states.size(); ++s) {
    ASSERT_TRUE(knapmix::is_feasible(k, t.states[s]));
    if (s == 0) continue;
    int diff = 0;
    for (std::size_t i = 0; i < 4; ++i) diff += t.states[s][i] != t.states[s - 1][i];
    ASSERT_LE(diff, 1);
  }
  const auto& c = t.counters;
  EXPECT_EQ(c.moved + c.held + c.rejected, 10'000U);
  EXPECT_GE(static_cast<double>(c.held + c.rejected) / 10'000.0, 0.5 - 0.02);
}

TEST(Chain, Determinism) {
  const ChainConfig config(figure1(), 99);
  EXPECT_EQ(knapmix::run(config, 500).states, knapmix::run(config, 500).states);
  EXPECT_NE(knapmix::run(config, 500).states, knapmix::run(ChainConfig(figure1(), 100), 500).states);
}

TEST(Chain, SampleSingleReplicateMatchesRun) {
  const ChainConfig config(figure1(), 11);
  const auto one = knapmix::sample(config, 300, 1);
  ASSERT_EQ(one.size(), 1U);
  EXPECT_EQ(one[0], knapmix::run(config, 300).states.back());
}

TEST(Chain, SampleIndependentOfThreadCount) {
  const ChainConfig config(knapmix::random_instance(9, 50, 3), 2024);
  const auto serial = knapmix::sample(config, 200, 257, 1);
  EXPECT_EQ(serial, knapmix::sample(config, 200, 257, 4));
  EXPECT_EQ(serial, knapmix::sample(config, 200, 257, 300));
}

TEST(Chain, SingleStateChain) {
  const auto samples = knapmix::sample(ChainConfig(KnapsackInstance({1}, 0), 8), 50, 100);
  for (const auto& x : samples) EXPECT_EQ(x.to_string(), "0");
  EXPECT_THROW(knapmix::sample(ChainConfig(KnapsackInstance({1}, 0), 8), 50, 0), knapmix::InputError);
}

TEST(Chain, ReplicatesDiffer) {
  const auto samples = knapmix::sample(ChainConfig(figure1(), 5), 473, 200);
  std::map<std::string, int> seen;
  for (const auto& x : samples) ++seen[x.to_string()];
  EXPECT_GT(seen.size(), 10U);
}
