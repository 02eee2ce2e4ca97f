#pragma once

// Brute-force reference implementations used to check the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "r3val/stats.hpp"

namespace r3v::oracle {

/// A12 by direct enumeration of all n1 * n2 pairs.
inline double a12_pairs(std::span<const double> a, std::span<const double> b) {
  double wins = 0.0;
  for (double x : a) {
    for (double y : b) {
      if (x < y) {
        wins += 1.0;
      } else if (x == y) {
        wins += 0.5;
      }
    }
  }
  return wins / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

inline double u_of(std::span<const double> a, std::span<const double> b) {
  double u = 0.0;
  for (double x : a) {
    for (double y : b) {
      if (x > y) {
        u += 1.0;
      } else if (x == y) {
        u += 0.5;
      }
    }
  }
  return u;
}

/// Exact rank-sum p-value by visiting every split of the pooled tie-free sample.
inline double wilcoxon_enumerated(std::span<const double> a, std::span<const double> b,
                                  stats::Alternative alternative) {
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size();
  const std::size_t n1 = a.size();
  const double observed = u_of(a, b);
  const double center = static_cast<double>(n1 * b.size()) / 2.0;

  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(n1), true);
  double hits = 0.0;
  double total = 0.0;
  do {
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i = 0; i < n; ++i) (pick[i] ? x : y).push_back(pooled[i]);
    const double u = u_of(x, y);
    bool extreme = false;
    switch (alternative) {
      case stats::Alternative::kGreater: extreme = u >= observed; break;
      case stats::Alternative::kLess: extreme = u <= observed; break;
      case stats::Alternative::kTwoSided: extreme = std::abs(u - center) >= std::abs(observed - center); break;
    }
    hits += extreme ? 1.0 : 0.0;
    total += 1.0;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return hits / total;
}

/// Permutation-test p-value from `resamples` random relabellings of the pooled sample.
inline double wilcoxon_monte_carlo(std::span<const double> a, std::span<const double> b,
                                   stats::Alternative alternative, std::size_t resamples, std::uint64_t seed) {
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranks = stats::ranks_with_ties(pooled);
  const std::size_t n1 = a.size();
  const double offset = static_cast<double>(n1 * (n1 + 1)) / 2.0;
  const double center = static_cast<double>(n1 * b.size()) / 2.0;
  double observed = -offset;
  for (std::size_t i = 0; i < n1; ++i) observed += ranks[i];

  std::mt19937_64 rng(seed);
  std::vector<double> r = ranks;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < resamples; ++k) {
    // partial Fisher-Yates: the first n1 slots become a random subset
    double u = -offset;
    for (std::size_t i = 0; i < n1; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, r.size() - 1);
      std::swap(r[i], r[pick(rng)]);
      u += r[i];
    }
    bool extreme = false;
    switch (alternative) {
      case stats::Alternative::kGreater: extreme = u >= observed - 1e-9; break;
      case stats::Alternative::kLess: extreme = u <= observed + 1e-9; break;
      case stats::Alternative::kTwoSided:
        extreme = std::abs(u - center) >= std::abs(observed - center) - 1e-9;
        break;
    }
    hits += extreme ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(resamples);
}

/// One-sided periodogram |X_k|^2 / n, k = 1..n/2, by the O(n^2) DFT of the mean-removed series.
inline std::vector<double> naive_periodogram(std::span<const double> series) {
  const std::size_t n = series.size();
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> power;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k * t % n) / static_cast<double>(n);
      acc += (series[t] - mean) * std::polar(1.0, angle);
    }
    power.push_back(std::norm(acc) / static_cast<double>(n));
  }
  return power;
}

inline double population_variance(std::span<const double> series) {
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(series.size());
  double ss = 0.0;
  for (double v : series) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(series.size());
}

}  // namespace r3v::oracle
