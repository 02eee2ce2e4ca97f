#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "r3val/corpus.hpp"
#include "r3val/model.hpp"
#include "r3val/stats.hpp"

namespace r3v {

inline constexpr double kDefaultAlpha = 0.05;
inline constexpr double kMediumEffectThreshold = 0.64;

/// How slots of a single-setup schedule (A1, A4) are mapped onto a corpus with
/// several reboot blocks.
enum class SingleChargeMapping {
  /// Slot s of S runs is taken from the reading at the same discharge phase:
  /// position s / B of block (s % B + s / B) % B, for B equal-length blocks.
  kPhaseAligned,
  /// Readings are consumed in corpus order, ignoring block boundaries.
  kLinear,
};

struct ReadingRef {
  std::size_t reboot = 0;
  std::size_t position = 0;

  friend auto operator<=>(const ReadingRef&, const ReadingRef&) = default;
};

/// Corpus readings split into pseudo-variants v1..vN as one approach would sample them.
struct GroupingResult {
  Approach approach = Approach::kA1;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> groups;          // parallel to labels
  std::vector<std::vector<ReadingRef>> provenance;  // parallel to labels

  /// Throws UnknownVariantError.
  const std::vector<double>& group(const std::string& label) const;
};

/// Generates the approach's schedule for `n_variants` pseudo-variants with
/// `samples_per_variant` runs each and maps its slots onto the corpus.
///
/// A2, A3 and R3 map setups to reboot blocks one to one and need every block
/// to hold exactly the runs of its setup. R3 uses pi = samples_per_variant /
/// n_variants. Throws StructureMismatch describing expected versus actual shape.
GroupingResult group_corpus(const Corpus& corpus, Approach approach, std::size_t n_variants,
                            std::size_t samples_per_variant,
                            SingleChargeMapping mapping = SingleChargeMapping::kPhaseAligned);

/// Pairwise two-sided Wilcoxon results over a grouping. Every group shares one
/// true variant, so each flagged pair is a false positive.
struct SpecificityMatrix {
  std::vector<std::string> labels;
  /// p_values[i][j] is set for i < j only.
  std::vector<std::vector<std::optional<double>>> p_values;
  /// Symmetric; false on the diagonal.
  std::vector<std::vector<bool>> fp_mask;
  double alpha = kDefaultAlpha;

  std::size_t false_positive_count() const noexcept;  // flagged pairs, each counted once
  std::size_t pair_count() const noexcept;
};

SpecificityMatrix specificity_matrix(const GroupingResult& grouping, double alpha = kDefaultAlpha);

/// Elementwise false-positive counts summed over platforms or corpora.
struct CountMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<std::size_t>> counts;

  std::size_t total() const noexcept;  // upper triangle
  friend bool operator==(const CountMatrix&, const CountMatrix&) = default;
};

/// Throws ConfigError on an empty list or mismatched labels.
CountMatrix aggregate_specificity(const std::vector<SpecificityMatrix>& matrices);

struct VariantComparison {
  VariantId variant;
  double a12 = 0.5;      // a12(variant, baseline); higher means the variant uses less
  double p_value = 1.0;  // one-sided test that the baseline uses more
};

struct SensitivityRow {
  Approach approach = Approach::kA1;
  double median_es = 0.5;
  std::size_t count_es_ge_064 = 0;
  std::size_t count_p_le_alpha = 0;
  std::vector<VariantComparison> per_variant;
};

/// One row per campaign, in map order. Throws UnknownVariantError when a
/// campaign lacks the baseline and ConfigError when it has no other variant.
std::vector<SensitivityRow> sensitivity_table(const std::map<Approach, Campaign>& campaigns,
                                              const VariantId& baseline, double alpha = kDefaultAlpha);

SensitivityRow sensitivity_row(const Campaign& campaign, const VariantId& baseline,
                               double alpha = kDefaultAlpha);

}  // namespace r3v
