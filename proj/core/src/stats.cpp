#include "r3val/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace r3v::stats {

namespace {

void require_finite(std::span<const double> values, const char* what) {
  if (values.empty()) throw std::invalid_argument(std::string(what) + " is empty");
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " has a non-finite value");
  }
}

double log_choose(std::size_t n, std::size_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

}  // namespace

std::vector<double> ranks_with_ties(std::span<const double> values) {
  require_finite(values, "values");
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // positions i..j-1 hold ranks i+1..j
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = midrank;
    i = j;
  }
  return ranks;
}

std::vector<double> exact_u_counts(std::size_t n1, std::size_t n2) {
  // Walk the pooled items in increasing order. dp[k][u] counts subsets of size k
  // among the items seen so far whose U is u; choosing item m when k items are
  // already chosen adds the m - k unchosen items below it to U.
  const std::size_t max_u = n1 * n2;
  std::vector<std::vector<double>> dp(n1 + 1, std::vector<double>(max_u + 1, 0.0));
  dp[0][0] = 1.0;
  for (std::size_t m = 0; m < n1 + n2; ++m) {
    for (std::size_t k = std::min(m, n1 == 0 ? 0 : n1 - 1) + 1; k-- > 0;) {
      if (k + 1 > n1) continue;
      const std::size_t shift = m - k;
      if (shift > max_u) continue;
      const auto& src = dp[k];
      auto& dst = dp[k + 1];
      for (std::size_t u = 0; u + shift <= max_u; ++u) {
        if (src[u] != 0.0) dst[u + shift] += src[u];
      }
    }
  }
  return dp[n1];
}

TestResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b,
                             Alternative alternative, Method method) {
  require_finite(a, "first sample");
  require_finite(b, "second sample");
  const std::size_t n1 = a.size();
  const std::size_t n2 = b.size();
  const std::size_t n = n1 + n2;

  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranks = ranks_with_ties(pooled);

  double rank_sum = 0.0;
  for (std::size_t i = 0; i < n1; ++i) rank_sum += ranks[i];
  const double u = rank_sum - static_cast<double>(n1) * static_cast<double>(n1 + 1) / 2.0;

  // tie groups for the variance correction
  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  bool has_ties = false;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    if (j - i > 1) has_ties = true;
    tie_term += t * t * t - t;
    i = j;
  }

  Method chosen = method;
  if (method == Method::kAuto) {
    chosen = (n <= kExactPooledLimit && !has_ties) ? Method::kExact : Method::kNormalApprox;
  } else if (method == Method::kExact && has_ties) {
    throw std::invalid_argument(
        "exact Wilcoxon test needs tie-free data; use the normal approximation for tied samples");
  }

  TestResult result;
  result.u_statistic = u;
  result.rank_sum = rank_sum;
  result.alternative = alternative;
  result.method = chosen;
  result.n1 = n1;
  result.n2 = n2;

  const double mean_u = static_cast<double>(n1) * static_cast<double>(n2) / 2.0;

  if (chosen == Method::kExact) {
    const auto counts = exact_u_counts(n1, n2);
    double total = 0.0;
    for (double c : counts) total += c;
    // u is an integer for tie-free data
    const auto observed = static_cast<std::size_t>(std::llround(u));
    double extreme = 0.0;
    for (std::size_t w = 0; w < counts.size(); ++w) {
      const double uw = static_cast<double>(w);
      bool hit = false;
      switch (alternative) {
        case Alternative::kGreater: hit = w >= observed; break;
        case Alternative::kLess: hit = w <= observed; break;
        case Alternative::kTwoSided:
          hit = std::fabs(uw - mean_u) >= std::fabs(static_cast<double>(observed) - mean_u);
          break;
      }
      if (hit) extreme += counts[w];
    }
    result.p_value = extreme / total;
    return result;
  }

  const double nd = static_cast<double>(n);
  const double var = static_cast<double>(n1) * static_cast<double>(n2) / 12.0 *
                     ((nd + 1.0) - tie_term / (nd * (nd - 1.0)));
  double p = 1.0;
  if (var > 0.0) {
    const double sd = std::sqrt(var);
    const double diff = u - mean_u;
    switch (alternative) {
      case Alternative::kGreater: p = 1.0 - normal_cdf((diff - 0.5) / sd); break;
      case Alternative::kLess: p = normal_cdf((diff + 0.5) / sd); break;
      case Alternative::kTwoSided: {
        const double correction = diff > 0.0 ? 0.5 : (diff < 0.0 ? -0.5 : 0.0);
        const double z = (diff - correction) / sd;
        p = 2.0 * std::min(normal_cdf(z), 1.0 - normal_cdf(z));
        break;
      }
    }
  }
  double floor = std::exp(-log_choose(n, n1));
  if (alternative == Alternative::kTwoSided) floor *= 2.0;
  floor = std::max(floor, std::numeric_limits<double>::min());
  result.p_value = std::clamp(p, floor, 1.0);
  return result;
}

double a12(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("a12 needs two non-empty samples");
  // Count via sorting: for each a_i, #b below/equal. O((n1+n2) log n2).
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sb.begin(), sb.end());
  double wins = 0.0;
  for (double x : a) {
    const auto lo = std::lower_bound(sb.begin(), sb.end(), x);
    const auto hi = std::upper_bound(lo, sb.end(), x);
    const auto greater = static_cast<double>(sb.end() - hi);
    const auto equal = static_cast<double>(hi - lo);
    wins += greater + 0.5 * equal;
  }
  return wins / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

std::string_view to_string(Magnitude magnitude) noexcept {
  switch (magnitude) {
    case Magnitude::kNegligible: return "negligible";
    case Magnitude::kSmall: return "small";
    case Magnitude::kMedium: return "medium";
    case Magnitude::kLarge: return "large";
  }
  return "?";
}

Magnitude classify_effect(double a12_value) {
  if (!(a12_value >= 0.0 && a12_value <= 1.0)) {
    throw std::invalid_argument("A12 value outside [0, 1]");
  }
  const double d = std::max(a12_value, 1.0 - a12_value);
  if (d == 0.5) return Magnitude::kNegligible;
  if (d <= 0.56) return Magnitude::kSmall;
  if (d <= 0.71) return Magnitude::kMedium;
  return Magnitude::kLarge;
}

EffectSize effect_size(std::span<const double> a, std::span<const double> b) {
  const double value = a12(a, b);
  return EffectSize{value, classify_effect(value)};
}

double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return (values[mid - 1] + values[mid]) / 2.0;
}

}  // namespace r3v::stats
