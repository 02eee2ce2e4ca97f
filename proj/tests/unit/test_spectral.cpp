#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "r3val/spectral.hpp"

namespace r3v::spectral {
namespace {

std::vector<double> tone(std::size_t n, double period, double amplitude, double phase = 0.0) {
  std::vector<double> v(n);
  for (std::size_t t = 0; t < n; ++t) {
    v[t] = amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period + phase);
  }
  return v;
}

TEST(Periodogram, ConstantSeriesHasNoPower) {
  const auto s = periodogram(std::vector<double>(64, 5.0));
  ASSERT_EQ(s.power.size(), 32u);
  for (double p : s.power) EXPECT_LE(p, 1e-12);
}

TEST(Periodogram, PureToneLandsInOneBin) {
  const auto s = periodogram(tone(64, 16.0, 1.0));
  EXPECT_DOUBLE_EQ(s.frequencies[3], 4.0 / 64.0);
  EXPECT_NEAR(s.power[3], 16.0, 1e-9);
  for (std::size_t k = 0; k < s.power.size(); ++k) {
    if (k != 3) EXPECT_LE(s.power[k], 1e-10);
  }
  const auto top = dominant_periods(s, 1);
  ASSERT_EQ(top.size(), 1u);
  EXPECT_DOUBLE_EQ(top[0].period_samples, 16.0);
}

TEST(Periodogram, WhiteNoiseHasNoDominantBin) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    std::vector<double> v(1024);
    for (auto& x : v) x = z(rng);
    const auto s = periodogram(v);
    double total = 0;
    for (double p : s.power) total += p;
    for (double p : s.power) EXPECT_LE(p / total, 0.05);
  }
}

TEST(Periodogram, MatchesNaiveDft) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> z;
  for (std::size_t n : {4u, 5u, 17u, 64u, 101u}) {
    std::vector<double> v(n);
    for (auto& x : v) x = z(rng) * 3 + 10;
    const auto fast = periodogram(v);
    const auto slow = oracle::naive_periodogram(v);
    ASSERT_EQ(fast.power.size(), slow.size());
    for (std::size_t k = 0; k < slow.size(); ++k) EXPECT_NEAR(fast.power[k], slow[k], 1e-9 * (1 + slow[k]));
  }
}

TEST(Periodogram, ParsevalOnOddAndEvenLengths) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> z;
  for (std::size_t n = 4; n < 300; n += 7) {
    std::vector<double> v(n);
    for (auto& x : v) x = z(rng) + 50;
    const auto s = periodogram(v);
    const double var = oracle::population_variance(v);
    EXPECT_NEAR(two_sided_power(s) / static_cast<double>(n), var, 1e-9 * var);
  }
}

TEST(Periodogram, PowerScalesWithAmplitudeSquared) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> z;
  std::vector<double> v(128);
  for (auto& x : v) x = z(rng);
  auto doubled = v;
  for (auto& x : doubled) x *= 2;
  const auto a = periodogram(v);
  const auto b = periodogram(doubled);
  for (std::size_t k = 0; k < a.power.size(); ++k) EXPECT_NEAR(b.power[k], 4 * a.power[k], 1e-9 * b.power[k]);
}

TEST(Periodogram, Errors) {
  EXPECT_THROW(periodogram(std::vector<double>{1, 2, 3}), std::invalid_argument);
  EXPECT_THROW(periodogram(std::vector<double>{1, 2, NAN, 4}), std::invalid_argument);
}

TEST(Periodogram, HannWindowReducesLeakage) {
  const auto v = tone(256, 10.3, 1.0);
  const auto raw = periodogram(v);
  const auto hann = periodogram(v, std::nullopt, Window::kHann);
  // power far from the tone (period 10.3, bin ~25)
  double raw_far = 0;
  double hann_far = 0;
  for (std::size_t k = 60; k < raw.power.size(); ++k) {
    raw_far += raw.power[k];
    hann_far += hann.power[k];
  }
  EXPECT_LT(hann_far, raw_far / 10);
}

TEST(DominantPeriods, OrdersByPowerAndReportsSeconds) {
  auto v = tone(128, 32.0, 2.0);
  const auto weak = tone(128, 8.0, 1.0, 0.3);
  for (std::size_t t = 0; t < v.size(); ++t) v[t] += weak[t];
  const auto top = dominant_periods(periodogram(v, 20.0), 2);
  ASSERT_EQ(top.size(), 2u);
  EXPECT_DOUBLE_EQ(top[0].period_samples, 32.0);
  EXPECT_DOUBLE_EQ(top[1].period_samples, 8.0);
  EXPECT_DOUBLE_EQ(*top[0].period_seconds, 640.0);
  EXPECT_NEAR(top[0].power_share + top[1].power_share, 1.0, 1e-9);
  EXPECT_NEAR(top[0].power_share / top[1].power_share, 4.0, 1e-9);
}

TEST(DominantPeriods, KLargerThanBinsReturnsAll) {
  EXPECT_EQ(dominant_periods(periodogram(tone(16, 4.0, 1.0)), 100).size(), 8u);
}

TEST(SpectrumCsv, HeaderAndRows) {
  std::ostringstream out;
  write_spectrum_csv(out, periodogram(tone(8, 4.0, 1.0), 2.0));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "frequency,period_samples,period_seconds,power");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, line.find(',', line.find(',', line.find(',') + 1) + 1)), "0.125,8,16");
}

}  // namespace
}  // namespace r3v::spectral
