#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace r3v::stats {

enum class Alternative {
  kTwoSided,
  kLess,     // first sample tends to be smaller
  kGreater,  // first sample tends to be larger
};

enum class Method { kAuto, kExact, kNormalApprox };

/// Pooled sizes up to this bound use the exact null distribution under kAuto.
inline constexpr std::size_t kExactPooledLimit = 20;

struct TestResult {
  double u_statistic = 0.0;  // Mann-Whitney U of the first sample
  double rank_sum = 0.0;     // rank sum of the first sample in the pooled ranking
  double p_value = 1.0;
  Alternative alternative = Alternative::kTwoSided;
  Method method = Method::kExact;  // kExact or kNormalApprox, never kAuto
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

/// Midranks (1-based); tied values share the mean of the ranks they span.
std::vector<double> ranks_with_ties(std::span<const double> values);

/// Wilcoxon rank-sum / Mann-Whitney U test.
///
/// Exact p-values are the share of all C(n1+n2, n1) rank assignments whose U
/// is at least as extreme as the observed one. The normal approximation uses
/// the tie-corrected variance with a 0.5 continuity correction. p-values are
/// floored at the smallest attainable exact value, so they are never 0.
///
/// Throws std::invalid_argument on empty or non-finite input, or when kExact
/// is requested for data with ties.
TestResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b,
                             Alternative alternative = Alternative::kTwoSided,
                             Method method = Method::kAuto);

/// Number of rank assignments of the exact null distribution: counts[w]
/// is the number of size-n1 subsets of {1..n1+n2} with rank sum
/// w + n1(n1+1)/2, i.e. with U == w.
std::vector<double> exact_u_counts(std::size_t n1, std::size_t n2);

/// Vargha-Delaney A12 oriented so that larger means `a` is lower:
/// (#{a_i < b_j} + 0.5 #{a_i == b_j}) / (n1 n2).
double a12(std::span<const double> a, std::span<const double> b);

enum class Magnitude { kNegligible, kSmall, kMedium, kLarge };

std::string_view to_string(Magnitude magnitude) noexcept;

/// Bands on d = max(a, 1 - a): Negligible iff d == 0.5, Small iff d <= 0.56,
/// Medium iff d <= 0.71, Large above. The unnamed (0.64, 0.71] band counts as Medium.
Magnitude classify_effect(double a12_value);

struct EffectSize {
  double a12 = 0.5;
  Magnitude magnitude = Magnitude::kNegligible;
};

EffectSize effect_size(std::span<const double> a, std::span<const double> b);

/// Standard normal CDF.
double normal_cdf(double z) noexcept;

double median(std::vector<double> values);

}  // namespace r3v::stats
