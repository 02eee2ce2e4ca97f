#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "r3val/stats.hpp"

namespace r3v::stats {
namespace {

TEST(Ranks, Examples) {
  EXPECT_EQ(ranks_with_ties(std::vector<double>{10, 20, 30}), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(ranks_with_ties(std::vector<double>{5, 5, 9}), (std::vector<double>{1.5, 1.5, 3}));
  EXPECT_EQ(ranks_with_ties(std::vector<double>{7, 7, 7, 7}), (std::vector<double>{2.5, 2.5, 2.5, 2.5}));
  EXPECT_EQ(ranks_with_ties(std::vector<double>{3, 1, 2}), (std::vector<double>{3, 1, 2}));
}

TEST(Ranks, RejectsNonFiniteAndEmpty) {
  EXPECT_THROW(ranks_with_ties(std::vector<double>{1, NAN}), std::invalid_argument);
  EXPECT_THROW(ranks_with_ties(std::vector<double>{1, INFINITY}), std::invalid_argument);
  EXPECT_THROW(ranks_with_ties(std::vector<double>{}), std::invalid_argument);
}

TEST(Ranks, SumIsTriangular) {
  std::mt19937 rng(3);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> v(1 + rng() % 30);
    for (auto& x : v) x = rng() % 5;
    double sum = 0;
    for (double r : ranks_with_ties(v)) sum += r;
    EXPECT_DOUBLE_EQ(sum, v.size() * (v.size() + 1) / 2.0);
  }
}

TEST(Wilcoxon, EnumerationExample) {
  const std::vector<double> a{1, 3, 5, 7};
  const std::vector<double> b{2, 4, 6, 8};
  const auto r = wilcoxon_rank_sum(a, b, Alternative::kTwoSided, Method::kExact);
  EXPECT_EQ(r.p_value, oracle::wilcoxon_enumerated(a, b, Alternative::kTwoSided));
  EXPECT_EQ(r.method, Method::kExact);
  EXPECT_EQ(r.u_statistic, 6.0);
  EXPECT_EQ(r.rank_sum, 16.0);
}

TEST(Wilcoxon, CompleteSeparation) {
  const auto r = wilcoxon_rank_sum(std::vector<double>{5, 6, 7}, std::vector<double>{1, 2, 3}, Alternative::kGreater,
                                   Method::kExact);
  EXPECT_DOUBLE_EQ(r.p_value, 0.05);
  EXPECT_EQ(r.u_statistic, 9.0);
  const auto less = wilcoxon_rank_sum(std::vector<double>{5, 6, 7}, std::vector<double>{1, 2, 3}, Alternative::kLess,
                                      Method::kExact);
  EXPECT_DOUBLE_EQ(less.p_value, 1.0);
}

TEST(Wilcoxon, SameDistributionGivesLargeP) {
  // interleaved so that U sits exactly at its mean
  const std::vector<double> a{1, 4, 5, 8, 9, 12, 13, 16};
  const std::vector<double> b{2, 3, 6, 7, 10, 11, 14, 15};
  const auto r = wilcoxon_rank_sum(a, b);
  EXPECT_DOUBLE_EQ(r.u_statistic, 32.0);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0);
}

TEST(Wilcoxon, Errors) {
  EXPECT_THROW(wilcoxon_rank_sum(std::vector<double>{}, std::vector<double>{1}), std::invalid_argument);
  EXPECT_THROW(wilcoxon_rank_sum(std::vector<double>{1, 2}, std::vector<double>{2, 3}, Alternative::kTwoSided,
                                 Method::kExact),
               std::invalid_argument);
}

TEST(Wilcoxon, AutoSwitchesOnTiesAndSize) {
  EXPECT_EQ(wilcoxon_rank_sum(std::vector<double>{1, 2}, std::vector<double>{2, 3}).method, Method::kNormalApprox);
  std::vector<double> a(10);
  std::vector<double> b(10);
  std::vector<double> c(11);
  for (int i = 0; i < 10; ++i) {
    a[i] = i;
    b[i] = i + 0.5;
  }
  for (int i = 0; i < 11; ++i) c[i] = i + 0.25;
  EXPECT_EQ(wilcoxon_rank_sum(a, b).method, Method::kExact);
  EXPECT_EQ(wilcoxon_rank_sum(a, c).method, Method::kNormalApprox);
}

TEST(Wilcoxon, AllValuesEqualGivesPOne) {
  const auto r = wilcoxon_rank_sum(std::vector<double>{4, 4, 4}, std::vector<double>{4, 4});
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(Wilcoxon, PValueNeverZero) {
  std::vector<double> a(200);
  std::vector<double> b(200);
  for (int i = 0; i < 200; ++i) {
    a[i] = 1000 + i;
    b[i] = i;
  }
  const auto r = wilcoxon_rank_sum(a, b, Alternative::kGreater);
  EXPECT_GT(r.p_value, 0.0);
  EXPECT_LE(r.p_value, 1e-50);
}

TEST(Wilcoxon, ExactMatchesEnumerationForRandomSmallSamples) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 100);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n1 = 1 + rng() % 6;
    const std::size_t n2 = 1 + rng() % (10 - n1);
    std::vector<double> a(n1);
    std::vector<double> b(n2);
    for (auto& x : a) x = u(rng);
    for (auto& x : b) x = u(rng);
    for (auto alt : {Alternative::kTwoSided, Alternative::kLess, Alternative::kGreater}) {
      EXPECT_EQ(wilcoxon_rank_sum(a, b, alt, Method::kExact).p_value, oracle::wilcoxon_enumerated(a, b, alt));
    }
  }
}

TEST(Wilcoxon, NormalApproxAgreesWithMonteCarlo) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> z;
  std::vector<double> a(50);
  std::vector<double> b(50);
  for (auto& x : a) x = z(rng) + 0.3;
  for (auto& x : b) x = z(rng);
  for (auto alt : {Alternative::kTwoSided, Alternative::kGreater, Alternative::kLess}) {
    const double approx = wilcoxon_rank_sum(a, b, alt, Method::kNormalApprox).p_value;
    EXPECT_NEAR(approx, oracle::wilcoxon_monte_carlo(a, b, alt, 100'000, 3), 0.02);
  }
}

TEST(Wilcoxon, TieCorrectionAgreesWithMonteCarlo) {
  std::mt19937_64 rng(21);
  std::vector<double> a(40);
  std::vector<double> b(40);
  for (auto& x : a) x = static_cast<double>(rng() % 6 + 1);
  for (auto& x : b) x = static_cast<double>(rng() % 6);
  const double approx = wilcoxon_rank_sum(a, b).p_value;
  EXPECT_NEAR(approx, oracle::wilcoxon_monte_carlo(a, b, Alternative::kTwoSided, 100'000, 4), 0.02);
}

TEST(Wilcoxon, InvariantUnderMonotoneTransform) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.1, 10);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> a(6);
    std::vector<double> b(7);
    for (auto& x : a) x = u(rng);
    for (auto& x : b) x = u(rng);
    auto ta = a;
    auto tb = b;
    for (auto& x : ta) x = std::exp(x) * 3 + 1;
    for (auto& x : tb) x = std::exp(x) * 3 + 1;
    const auto r = wilcoxon_rank_sum(a, b);
    const auto tr = wilcoxon_rank_sum(ta, tb);
    EXPECT_EQ(r.u_statistic, tr.u_statistic);
    EXPECT_EQ(r.p_value, tr.p_value);
    EXPECT_EQ(a12(a, b), a12(ta, tb));
  }
}

TEST(ExactCounts, SumToBinomial) {
  const auto counts = exact_u_counts(5, 7);
  double total = 0;
  for (double c : counts) total += c;
  EXPECT_EQ(total, 792.0);
  EXPECT_EQ(counts.size(), 36u);
  for (std::size_t w = 0; w < counts.size(); ++w) EXPECT_EQ(counts[w], counts[counts.size() - 1 - w]);
}

TEST(A12, Examples) {
  EXPECT_EQ(a12(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}), 0.5);
  EXPECT_EQ(a12(std::vector<double>{1, 2, 3}, std::vector<double>{4, 5, 6}), 1.0);
  EXPECT_EQ(a12(std::vector<double>{1, 3}, std::vector<double>{2, 4}), 0.75);
  EXPECT_THROW(a12(std::vector<double>{}, std::vector<double>{1}), std::invalid_argument);
}

TEST(A12, MatchesPairEnumerationAndIsComplementary) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> a(1 + rng() % 8);
    std::vector<double> b(1 + rng() % 8);
    for (auto& x : a) x = static_cast<double>(rng() % 5);
    for (auto& x : b) x = static_cast<double>(rng() % 5);
    EXPECT_EQ(a12(a, b), oracle::a12_pairs(a, b));
    EXPECT_DOUBLE_EQ(a12(a, b) + a12(b, a), 1.0);
  }
}

TEST(ClassifyEffect, Examples) {
  EXPECT_EQ(classify_effect(0.5), Magnitude::kNegligible);
  EXPECT_EQ(classify_effect(0.55), Magnitude::kSmall);
  EXPECT_EQ(classify_effect(0.56), Magnitude::kSmall);
  EXPECT_EQ(classify_effect(0.60), Magnitude::kMedium);
  EXPECT_EQ(classify_effect(0.65), Magnitude::kMedium);
  EXPECT_EQ(classify_effect(0.71), Magnitude::kMedium);
  EXPECT_EQ(classify_effect(0.9), Magnitude::kLarge);
  EXPECT_EQ(classify_effect(0.1), Magnitude::kLarge);
  EXPECT_THROW(classify_effect(1.2), std::invalid_argument);
  EXPECT_THROW(classify_effect(NAN), std::invalid_argument);
}

TEST(ClassifyEffect, SymmetricOnGrid) {
  for (int i = 0; i <= 1000; ++i) {
    const double x = i / 1000.0;
    EXPECT_EQ(classify_effect(x), classify_effect(1.0 - x)) << x;
  }
}

TEST(EffectSize, ConsistentWithClassification) {
  const auto es = effect_size(std::vector<double>{1, 2, 3}, std::vector<double>{4, 5, 6});
  EXPECT_EQ(es.a12, 1.0);
  EXPECT_EQ(es.magnitude, Magnitude::kLarge);
}

TEST(Median, OddEvenAndEmpty) {
  EXPECT_EQ(median({3, 1, 2}), 2.0);
  EXPECT_EQ(median({4, 1, 2, 3}), 2.5);
  EXPECT_THROW(median({}), std::invalid_argument);
}

}  // namespace
}  // namespace r3v::stats
