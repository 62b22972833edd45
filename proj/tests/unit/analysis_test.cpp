#include "knapmix/analysis.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "knapmix/error.hpp"
#include "knapmix/io.hpp"
#include "oracles.hpp"

using knapmix::KnapsackInstance;
using knapmix::Solution;
using knapmix::TransitionMatrix;

namespace {

KnapsackInstance figure1() { return KnapsackInstance({5, 3, 2, 1}, 9); }

std::vector<std::int64_t> weights_of(const KnapsackInstance& k) {
  return {k.weights().begin(), k.weights().end()};
}

}  // namespace

TEST(TransitionMatrix, TwoStateChain) {
  const auto P = knapmix::transition_matrix(KnapsackInstance({1}, 1));
  ASSERT_EQ(P.order(), 2U);
  EXPECT_EQ(P.denominator(), 2);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(P.numerator(i, j), 1);
  }
}

TEST(TransitionMatrix, SingleState) {
  const auto P = knapmix::transition_matrix(KnapsackInstance({1}, 0));
  ASSERT_EQ(P.order(), 1U);
  EXPECT_EQ(P(0, 0), 1.0);
}

TEST(TransitionMatrix, Figure1RowWithBlockedFlip) {
  const auto P = knapmix::transition_matrix(figure1());
  ASSERT_EQ(P.order(), 14U);
  const std::size_t row = P.index_of(Solution::from_string("1101"));
  EXPECT_EQ(P.numerator(row, row), 5);  // 5/8
  EXPECT_EQ(P.denominator(), 8);
  for (std::size_t j = 0; j < P.order(); ++j) {
    if (j != row) EXPECT_TRUE(P.numerator(row, j) == 0 || P.numerator(row, j) == 1);
  }
}

TEST(TransitionMatrix, ExactPropertiesOnRandomInstances) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const auto k = knapmix::random_instance(1 + s % 9, 50, 500 + s);
    const auto P = knapmix::transition_matrix(k);
    EXPECT_TRUE(P.is_symmetric());
    EXPECT_TRUE(P.has_unit_rows());
    EXPECT_TRUE(P.has_lazy_diagonal());
    EXPECT_TRUE(P.uniform_is_stationary());
    const auto expected = oracle::brute_matrix(weights_of(k), k.budget());
    const auto dense = P.dense();
    ASSERT_EQ(dense.size(), expected.size());
    for (std::size_t e = 0; e < dense.size(); ++e) EXPECT_NEAR(dense[e], expected[e], 1e-15);
  }
}

TEST(TransitionMatrix, CapacityErrors) {
  const KnapsackInstance k(std::vector<knapmix::Weight>(10, 1), 10);
  EXPECT_THROW(knapmix::transition_matrix(k, 1000), knapmix::CapacityError);
  EXPECT_NO_THROW(knapmix::transition_matrix(k, 1024));
}

TEST(Spectrum, TwoStateGapIsOne) {
  const auto P = knapmix::transition_matrix(KnapsackInstance({1}, 1));
  const auto s = knapmix::spectrum(P);
  EXPECT_NEAR(s.eigenvalues[0], 1.0, 1e-12);
  EXPECT_NEAR(s.eigenvalues[1], 0.0, 1e-12);
  EXPECT_NEAR(s.gap, 1.0, 1e-12);
}

TEST(Spectrum, SingleStateConvention) {
  EXPECT_EQ(knapmix::spectral_gap(knapmix::transition_matrix(KnapsackInstance({2}, 1))), 1.0);
}

// Pinned from the eigen-solve; an independent dense solve (numpy eigvalsh
// on the same matrix) gives 0.172745751406262, i.e. (5 - sqrt 5) / 16.
TEST(Spectrum, Figure1GapRegression) {
  const auto s = knapmix::spectrum(knapmix::transition_matrix(figure1()));
  EXPECT_NEAR(s.gap, 0.1727457514062629, 1e-10);
  EXPECT_NEAR(s.gap, (5.0 - std::sqrt(5.0)) / 16.0, 1e-10);
  EXPECT_NEAR(s.power_lambda2, 1.0 - s.gap, 1e-8);
  for (double ev : s.eigenvalues) EXPECT_GE(ev, -1e-10);
}

TEST(Spectrum, RejectsInvalidMatrices) {
  const TransitionMatrix asymmetric(4, 2, {3, 1, 2, 2});
  EXPECT_THROW(knapmix::spectrum(asymmetric), knapmix::InvariantError);
  const TransitionMatrix not_stochastic(4, 2, {3, 2, 2, 3});
  EXPECT_THROW(knapmix::spectrum(not_stochastic), knapmix::InvariantError);
}

TEST(Spectrum, PowerIterationMatchesEigenSolve) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto P = knapmix::transition_matrix(knapmix::random_instance(2 + s % 8, 50, 40 + s));
    const auto spec = knapmix::spectrum(P);  // throws on disagreement
    if (P.order() > 1) {
      EXPECT_NEAR(knapmix::second_eigenvalue_by_power_iteration(P), spec.eigenvalues[1], 1e-8);
      EXPECT_LT(spec.eigenvalues[1], 1.0 - 1e-10);  // connected: eigenvalue 1 is simple
    }
  }
}

TEST(TotalVariation, Examples) {
  const auto P2 = knapmix::transition_matrix(KnapsackInstance({1}, 1));
  EXPECT_NEAR(knapmix::tv_distance_at(P2, 0, 0), 0.5, 1e-15);
  EXPECT_NEAR(knapmix::tv_distance_at(P2, 0, 1), 0.0, 1e-15);

  const auto P = knapmix::transition_matrix(figure1());
  EXPECT_NEAR(knapmix::tv_distance_at(P, Solution::zeros(4), 0), 1.0 - 1.0 / 14.0, 1e-15);
  EXPECT_LE(knapmix::tv_distance_at(P, Solution::zeros(4), 473), 0.01 + 1e-10);
}

TEST(TotalVariation, MatchesDenseOracleAndIsMonotone) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto k = knapmix::random_instance(2 + s % 5, 30, 900 + s);
    const auto P = knapmix::transition_matrix(k);
    const auto m = oracle::brute_matrix(weights_of(k), k.budget());
    for (std::size_t start = 0; start < P.order(); start += 3) {
      const auto curve = knapmix::tv_curve(P, start, 40);
      for (std::uint64_t t = 0; t <= 40; t += 7) {
        EXPECT_NEAR(curve[t], oracle::brute_tv(m, P.order(), start, t), 1e-12);
        EXPECT_NEAR(curve[t], knapmix::tv_distance_at(P, start, t), 1e-15);
      }
      for (std::size_t t = 1; t < curve.size(); ++t) EXPECT_LE(curve[t], curve[t - 1] + 1e-15);
    }
  }
}

TEST(MixingTime, Examples) {
  const auto P2 = knapmix::transition_matrix(KnapsackInstance({1}, 1));
  EXPECT_EQ(knapmix::empirical_mixing_time(P2, 0, 0.1), 1U);
  EXPECT_EQ(knapmix::empirical_mixing_time(knapmix::transition_matrix(KnapsackInstance({1}, 0)), 0, 0.1), 0U);

  const auto P = knapmix::transition_matrix(figure1());
  const auto tau = knapmix::empirical_mixing_time(P, Solution::zeros(4), 0.01);
  EXPECT_EQ(tau, 14U);  // pinned; also found by a plain numpy evolution
  EXPECT_LE(tau, 473U);
  EXPECT_THROW(knapmix::empirical_mixing_time(P, 0, 1.0), knapmix::InputError);
}

// Doubling + bisection agrees with a linear scan, and the batched
// all-starts evolution agrees with both.
TEST(MixingTime, SearchAgreesWithLinearScan) {
  for (std::uint64_t s = 0; s < 12; ++s) {
    const auto P = knapmix::transition_matrix(knapmix::random_instance(2 + s % 7, 50, 70 + s));
    const std::vector<double> eps{0.25, 0.1, 0.01};
    const auto batch = knapmix::mixing_times_all_starts(P, eps, 100'000);
    for (std::size_t start = 0; start < P.order(); ++start) {
      const auto curve = knapmix::tv_curve(P, start, 2000);
      for (std::size_t e = 0; e < eps.size(); ++e) {
        std::uint64_t linear = 0;
        while (curve[linear] > eps[e]) ++linear;
        EXPECT_EQ(knapmix::empirical_mixing_time(P, start, eps[e]), linear);
        EXPECT_EQ(batch[e][start], linear);
      }
    }
  }
}

TEST(TheoremBound, Examples) {
  EXPECT_EQ(knapmix::theorem_bound(4, 0.01), 473U);
  EXPECT_EQ(knapmix::theorem_bound(10, 0.1), 5076U);
  EXPECT_EQ(knapmix::theorem_bound(4, 0.01),
            static_cast<std::uint64_t>(std::ceil(64.0 * std::log(1600.0))));
  EXPECT_THROW(knapmix::theorem_bound(1, 16.0 / std::exp(1.0)), knapmix::InputError);
  EXPECT_THROW(knapmix::theorem_bound(1, 0.0), knapmix::InputError);
  EXPECT_THROW(knapmix::theorem_bound(0, 0.5), knapmix::InputError);
}

TEST(MixingProfile, Figure1) {
  const auto P = knapmix::transition_matrix(figure1());
  const std::vector<double> eps{0.1, 0.01};
  const auto profile = knapmix::mixing_profile(P, Solution::zeros(4), eps, 100);
  EXPECT_EQ(profile.tv_curve.size(), 101U);
  EXPECT_EQ(profile.tau.at(0.01), 14U);
  EXPECT_EQ(profile.theorem_bound.at(0.01), 473U);
  EXPECT_LE(profile.tau.at(0.1), profile.tau.at(0.01));
  EXPECT_GT(profile.spectral_gap, 0.0);
  EXPECT_LE(profile.spectral_gap, 1.0);
}
