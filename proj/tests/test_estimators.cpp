#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "dqm/estimators.hpp"

namespace dqm {
namespace {

FStatistics fp(std::map<std::size_t, std::size_t> freq) {
  std::size_t n = 0;
  for (auto [j, fj] : freq) n += j * fj;
  return FStatistics(std::move(freq), n);
}

TallyState random_tally(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<std::uint32_t> votes(0, 4);
  std::vector<ItemTally> items(n);
  for (auto& it : items) it = {votes(rng), votes(rng)};
  return TallyState(items);
}

TEST(Nominal, CountsItemsWithAnyDirtyVote) {
  EXPECT_EQ(nominal(TallyState({{1, 1}, {0, 2}, {0, 0}})), 1u);
  EXPECT_EQ(nominal(TallyState(4)), 0u);
}

TEST(Majority, StrictMajorityTiesAreClean) {
  EXPECT_EQ(majority(TallyState({{2, 1}})), 1u);
  EXPECT_EQ(majority(TallyState({{1, 1}})), 0u);
  EXPECT_EQ(majority(TallyState({{0, 0}})), 0u);
}

TEST(Baselines, MatchBruteForceOnRandomTallies) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const auto t = random_tally(rng, 25);
    std::size_t nom = 0, maj = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double n_i = t[i].pos + t[i].neg;
      if (t[i].pos > 0) ++nom;
      if (t[i].pos - n_i / 2.0 > 0) ++maj;
    }
    ASSERT_EQ(nominal(t), nom);
    ASSERT_EQ(majority(t), maj);
  }
}

TEST(Extrapolate, ScalesSampleErrors) {
  const auto one_percent = extrapolate(0.01, 4);
  EXPECT_NEAR(one_percent.total, 400.0, 1e-9);
  EXPECT_NEAR(one_percent.remaining, 396.0, 1e-9);
  const auto full = extrapolate(1.0, 7);
  EXPECT_DOUBLE_EQ(full.total, 7.0);
  EXPECT_DOUBLE_EQ(full.remaining, 0.0);
  EXPECT_DOUBLE_EQ(extrapolate(0.05, 0).total, 0.0);
}

TEST(Extrapolate, RejectsFractionsOutsideUnitInterval) {
  EXPECT_THROW(extrapolate(0.0, 1), DomainError);
  EXPECT_THROW(extrapolate(-0.5, 1), DomainError);
  EXPECT_THROW(extrapolate(1.5, 1), DomainError);
}

TEST(Coverage, GoodTuring) {
  EXPECT_NEAR(coverage(FStatistics({{1, 30}}, 180)), 5.0 / 6.0, 1e-12);
  EXPECT_DOUBLE_EQ(coverage(fp({{2, 3}, {4, 1}})), 1.0);
  EXPECT_DOUBLE_EQ(coverage(FStatistics()), 1.0);
}

TEST(Cv2, HandArithmetic) {
  // f1=2, f2=1: n=4, d=6, sum j(j-1)f_j = 2, 6*2/12 - 1 = 0
  EXPECT_DOUBLE_EQ(cv2(fp({{1, 2}, {2, 1}}), 6.0), 0.0);
  // singletons only: the pair sum vanishes
  EXPECT_DOUBLE_EQ(cv2(fp({{1, 7}}), 20.0), 0.0);
  // f3=1: n=3, d=1, 1*6/6 - 1 = 0
  EXPECT_DOUBLE_EQ(cv2(fp({{3, 1}}), 1.0), 0.0);
  // f1=1, f3=1: n=4, d=8/3, (8/3)*6/12 - 1 = 1/3
  EXPECT_NEAR(cv2(fp({{1, 1}, {3, 1}}), 8.0 / 3.0), 1.0 / 3.0, 1e-12);
  // fewer than two observations
  EXPECT_DOUBLE_EQ(cv2(fp({{1, 1}}), 5.0), 0.0);
}

// 83 distinct errors, 30 singletons, n+ = 180. With f2 = 9 and f3 = 44 the
// pair sum is 282 and 99.6 * 282 / (180 * 179) < 1, so the skew term is 0.
TEST(Chao92, WorkedExampleWithoutFalsePositives) {
  const auto f = fp({{1, 30}, {2, 9}, {3, 44}});
  ASSERT_EQ(f.distinct(), 83u);
  ASSERT_EQ(f.n(), 180u);
  const auto est = chao92(f, 1000);
  EXPECT_DOUBLE_EQ(est.cv2_hat, 0.0);
  EXPECT_NEAR(est.total_errors_hat, 99.6, 99.6 * 1e-9);
  EXPECT_NEAR(est.remaining_hat, 16.6, 16.6 * 1e-9);
  EXPECT_FALSE(est.flags.low_coverage);
}

// 102 distinct (83 + 19 false), 46 singletons, n+ = 208.
TEST(Chao92, WorkedExampleWithFalsePositives) {
  const auto f = fp({{1, 46}, {2, 6}, {3, 50}});
  ASSERT_EQ(f.distinct(), 102u);
  ASSERT_EQ(f.n(), 208u);
  const auto est = chao92(f, 1000);
  EXPECT_DOUBLE_EQ(est.cv2_hat, 0.0);
  const double expected = 102.0 / (1.0 - 46.0 / 208.0);
  EXPECT_NEAR(est.total_errors_hat, expected, expected * 1e-9);
  EXPECT_NEAR(est.total_errors_hat, 130.96, 0.01);
}

TEST(Chao92, FullCoverageReturnsObservedCount) {
  const auto est = chao92(fp({{2, 5}, {3, 2}}), 100);
  EXPECT_DOUBLE_EQ(est.total_errors_hat, 7.0);
  EXPECT_DOUBLE_EQ(est.remaining_hat, 0.0);
}

TEST(Chao92, AllSingletonsIsCappedAtUniverse) {
  const auto est = chao92(fp({{1, 5}}), 40);
  EXPECT_TRUE(est.flags.low_coverage);
  EXPECT_DOUBLE_EQ(est.coverage_hat, 0.0);
  EXPECT_DOUBLE_EQ(est.total_errors_hat, 40.0);
  EXPECT_DOUBLE_EQ(est.remaining_hat, 35.0);
}

TEST(Chao92, EmptySampleIsZero) {
  const auto est = chao92(FStatistics(), 10);
  EXPECT_DOUBLE_EQ(est.total_errors_hat, 0.0);
  EXPECT_DOUBLE_EQ(est.coverage_hat, 1.0);
}

TEST(Chao92, NeverBelowObservedAndOutputsInRange) {
  std::mt19937_64 rng(22);
  std::uniform_int_distribution<std::size_t> count(0, 6);
  for (int trial = 0; trial < 2000; ++trial) {
    std::map<std::size_t, std::size_t> freq;
    for (std::size_t j = 1; j <= 6; ++j) freq[j] = count(rng);
    const auto f = fp(freq);
    const auto est = chao92(f, 10000);
    ASSERT_GE(est.total_errors_hat + 1e-9, static_cast<double>(f.distinct()));
    ASSERT_GE(est.coverage_hat, 0.0);
    ASSERT_LE(est.coverage_hat, 1.0);
    ASSERT_GE(est.cv2_hat, 0.0);
    if (f.f(1) == 0) {
      ASSERT_DOUBLE_EQ(est.total_errors_hat, static_cast<double>(f.distinct()));
    }
  }
}

// f = (4, 2, 1), n+ = 11, c_majority = 2, s = 1: n^{+,1} = 7, C = 5/7, the
// shifted pair sum is 2 and 2.8 * 2 / 42 < 1, so D = 2 / (5/7) = 2.8.
TEST(VChao92, ShiftedHandExample) {
  const auto f = fp({{1, 4}, {2, 2}, {3, 1}});
  ASSERT_EQ(f.n(), 11u);
  const auto est = shifted_chao92(f, 2, 1, 100);
  EXPECT_NEAR(est.coverage_hat, 5.0 / 7.0, 1e-12);
  EXPECT_DOUBLE_EQ(est.cv2_hat, 0.0);
  EXPECT_NEAR(est.total_errors_hat, 2.8, 1e-12);
  EXPECT_NEAR(est.remaining_hat, 0.8, 1e-12);
}

TEST(VChao92, UsesMajorityCountFromTally) {
  // two majority-dirty items (3,0) and (2,1); one tied item (1,1); one
  // singleton discovery (1,2)
  TallyState t({{3, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 0}});
  const auto f = error_fstats(t);
  const auto direct = shifted_chao92(f, 2, 1, t.size());
  const auto via_tally = vchao92(t, f, 1, t.size());
  EXPECT_DOUBLE_EQ(via_tally.total_errors_hat, direct.total_errors_hat);
  EXPECT_DOUBLE_EQ(vchao92(t, 1).total_errors_hat, direct.total_errors_hat);
}

TEST(VChao92, ZeroShiftEqualsChao92WhenCountsAgree) {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<std::size_t> count(0, 5);
  for (int trial = 0; trial < 500; ++trial) {
    std::map<std::size_t, std::size_t> freq;
    for (std::size_t j = 1; j <= 5; ++j) freq[j] = count(rng);
    const auto f = fp(freq);
    if (f.n() == 0) continue;
    const auto a = chao92(f, 500);
    const auto b = shifted_chao92(f, f.distinct(), 0, 500);
    ASSERT_DOUBLE_EQ(a.total_errors_hat, b.total_errors_hat);
    ASSERT_DOUBLE_EQ(a.cv2_hat, b.cv2_hat);
  }
}

TEST(VChao92, NoShiftedSingletonsGivesMajorityCount) {
  const auto est = shifted_chao92(fp({{1, 3}, {3, 2}}), 4, 1, 100);
  EXPECT_DOUBLE_EQ(est.total_errors_hat, 4.0);
}

TEST(VChao92, ExhaustedShiftIsInsufficientData) {
  const auto est = shifted_chao92(fp({{1, 3}}), 0, 1, 100);
  EXPECT_TRUE(est.flags.insufficient_data);
  EXPECT_FALSE(est.defined());
  EXPECT_TRUE(shifted_chao92(FStatistics(), 0, 0, 10).flags.insufficient_data);
}

// Probe of "non-increasing in s" over non-increasing fingerprints with a
// zero skew term. It does not hold in general: f = (1, 1) gives 1/(1 - 1/3)
// at s = 0 but 1/(1 - 1/2) at s = 1, because n shrinks faster than f_{1+s}.
TEST(VChao92, MonotoneInShiftProbeFindsCounterexamples) {
  std::mt19937_64 rng(24);
  std::uniform_int_distribution<std::size_t> len(1, 6);
  std::uniform_int_distribution<std::size_t> top(1, 8);
  std::size_t checked = 0, violations = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    std::map<std::size_t, std::size_t> freq;
    std::size_t cur = top(rng);
    const std::size_t L = len(rng);
    for (std::size_t j = 1; j <= L && cur > 0; ++j) {
      freq[j] = cur;
      cur = std::uniform_int_distribution<std::size_t>(0, cur)(rng);
    }
    const auto f = fp(freq);
    const std::size_t observed = f.distinct();
    for (std::size_t s = 0; s + 1 <= L; ++s) {
      const auto a = shifted_chao92(f, observed, s, 100000);
      const auto b = shifted_chao92(f, observed, s + 1, 100000);
      if (!a.defined() || !b.defined() || a.cv2_hat != 0.0 || b.cv2_hat != 0.0) continue;
      if (a.flags.low_coverage || b.flags.low_coverage) continue;
      ++checked;
      if (b.total_errors_hat > a.total_errors_hat + 1e-9) ++violations;
    }
  }
  EXPECT_GT(checked, 100u);
  EXPECT_GT(violations, 0u);

  const auto s0 = shifted_chao92(fp({{1, 1}, {2, 1}}), 2, 0, 100);
  const auto s1 = shifted_chao92(fp({{1, 1}, {2, 1}}), 2, 1, 100);
  EXPECT_NEAR(s0.total_errors_hat, 3.0, 1e-12);
  EXPECT_NEAR(s1.total_errors_hat, 4.0, 1e-12);
}

}  // namespace
}  // namespace dqm
