#include "r3val/evaluation.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "r3val/error.hpp"
#include "r3val/schedule.hpp"

namespace r3v {

namespace {

std::vector<VariantId> pseudo_variants(std::size_t n) {
  std::vector<VariantId> out;
  for (std::size_t i = 1; i <= n; ++i) out.emplace_back("v" + std::to_string(i));
  return out;
}

std::string block_shape(const Corpus& corpus) {
  std::string s;
  for (std::size_t i = 0; i < corpus.reboots.size(); ++i) {
    s += (i ? "," : "") + std::to_string(corpus.reboots[i].size());
  }
  return "[" + s + "]";
}

std::vector<ReadingRef> aligned_refs(const Corpus& corpus, const Schedule& schedule) {
  std::vector<std::size_t> segments;
  for (const auto& action : schedule.actions()) {
    if (action.is_setup()) {
      segments.push_back(0);
    } else {
      ++segments.back();
    }
  }
  bool match = segments.size() == corpus.reboots.size();
  for (std::size_t i = 0; match && i < segments.size(); ++i) match = segments[i] == corpus.reboots[i].size();
  if (!match) {
    std::string expected;
    for (std::size_t i = 0; i < segments.size(); ++i) expected += (i ? "," : "") + std::to_string(segments[i]);
    throw StructureMismatch(fmt::format("{} needs reboot blocks of sizes [{}], corpus '{}' has {}",
                                        to_string(schedule.approach()), expected, corpus.platform_label,
                                        block_shape(corpus)));
  }
  std::vector<ReadingRef> refs;
  for (std::size_t b = 0; b < segments.size(); ++b) {
    for (std::size_t p = 0; p < segments[b]; ++p) refs.push_back({b, p});
  }
  return refs;
}

std::vector<ReadingRef> single_charge_refs(const Corpus& corpus, std::size_t total, SingleChargeMapping mapping) {
  std::vector<ReadingRef> refs;
  refs.reserve(total);
  if (mapping == SingleChargeMapping::kLinear) {
    for (std::size_t b = 0; b < corpus.reboots.size(); ++b) {
      for (std::size_t p = 0; p < corpus.reboots[b].size(); ++p) refs.push_back({b, p});
    }
    return refs;
  }
  const std::size_t blocks = corpus.reboots.size();
  const std::size_t length = corpus.reboots.front().size();
  const bool equal = std::all_of(corpus.reboots.begin(), corpus.reboots.end(),
                                 [&](const auto& b) { return b.size() == length; });
  if (!equal) {
    throw StructureMismatch(fmt::format("phase-aligned mapping needs equal reboot blocks, corpus '{}' has {}",
                                        corpus.platform_label, block_shape(corpus)));
  }
  for (std::size_t s = 0; s < total; ++s) {
    const std::size_t phase = s / blocks;
    refs.push_back({(s % blocks + phase) % blocks, phase});
  }
  return refs;
}

}  // namespace

const std::vector<double>& GroupingResult::group(const std::string& label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw UnknownVariantError(label);
  return groups[static_cast<std::size_t>(it - labels.begin())];
}

GroupingResult group_corpus(const Corpus& corpus, Approach approach, std::size_t n_variants,
                            std::size_t samples_per_variant, SingleChargeMapping mapping) {
  corpus.validate();
  if (n_variants == 0 || samples_per_variant == 0) {
    throw ConfigError("grouping needs at least one variant and one sample per variant");
  }
  const std::size_t total = n_variants * samples_per_variant;
  if (corpus.reading_count() != total) {
    throw StructureMismatch(fmt::format("{} variants x {} samples need {} readings, corpus '{}' has {} in blocks {}",
                                        n_variants, samples_per_variant, total, corpus.platform_label,
                                        corpus.reading_count(), block_shape(corpus)));
  }

  ScheduleConfig config;
  config.variants = pseudo_variants(n_variants);
  config.n_samples = samples_per_variant;
  config.pi = 1;
  if (approach == Approach::kR3) {
    if (samples_per_variant % n_variants != 0) {
      throw StructureMismatch(fmt::format("R3 needs samples per variant ({}) divisible by the variant count ({})",
                                          samples_per_variant, n_variants));
    }
    config.pi = samples_per_variant / n_variants;
  }
  const Schedule schedule = generate_schedule(config, approach);

  const bool single_charge = approach == Approach::kA1 || approach == Approach::kA4;
  const auto refs = single_charge ? single_charge_refs(corpus, total, mapping) : aligned_refs(corpus, schedule);

  GroupingResult result;
  result.approach = approach;
  for (const auto& v : config.variants) result.labels.push_back(v.name());
  result.groups.resize(n_variants);
  result.provenance.resize(n_variants);
  std::size_t slot = 0;
  for (const auto& action : schedule.actions()) {
    if (!action.is_run()) continue;
    const auto& name = action.variant().name();
    const auto idx = static_cast<std::size_t>(std::stoul(name.substr(1))) - 1;
    const auto ref = refs[slot++];
    result.groups[idx].push_back(corpus.reboots[ref.reboot][ref.position]);
    result.provenance[idx].push_back(ref);
  }
  return result;
}

// ---------------------------------------------------------------------------

std::size_t SpecificityMatrix::false_positive_count() const noexcept {
  std::size_t n = 0;
  for (std::size_t i = 0; i < fp_mask.size(); ++i) {
    for (std::size_t j = i + 1; j < fp_mask.size(); ++j) n += fp_mask[i][j] ? 1 : 0;
  }
  return n;
}

std::size_t SpecificityMatrix::pair_count() const noexcept {
  return labels.size() * (labels.size() - (labels.empty() ? 0 : 1)) / 2;
}

SpecificityMatrix specificity_matrix(const GroupingResult& grouping, double alpha) {
  const std::size_t n = grouping.labels.size();
  if (n < 2) throw ConfigError("specificity needs at least two groups");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  SpecificityMatrix m;
  m.labels = grouping.labels;
  m.alpha = alpha;
  m.p_values.assign(n, std::vector<std::optional<double>>(n));
  m.fp_mask.assign(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto r = stats::wilcoxon_rank_sum(grouping.groups[i], grouping.groups[j]);
      m.p_values[i][j] = r.p_value;
      m.fp_mask[i][j] = m.fp_mask[j][i] = r.p_value <= alpha;
    }
  }
  return m;
}

std::size_t CountMatrix::total() const noexcept {
  std::size_t n = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (std::size_t j = i + 1; j < counts.size(); ++j) n += counts[i][j];
  }
  return n;
}

CountMatrix aggregate_specificity(const std::vector<SpecificityMatrix>& matrices) {
  if (matrices.empty()) throw ConfigError("nothing to aggregate");
  CountMatrix out;
  out.labels = matrices.front().labels;
  const std::size_t n = out.labels.size();
  out.counts.assign(n, std::vector<std::size_t>(n, 0));
  for (std::size_t k = 0; k < matrices.size(); ++k) {
    if (matrices[k].labels != out.labels) {
      throw ConfigError(fmt::format("specificity matrix {} has different labels from matrix 0", k));
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) out.counts[i][j] += matrices[k].fp_mask[i][j] ? 1 : 0;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

SensitivityRow sensitivity_row(const Campaign& campaign, const VariantId& baseline, double alpha) {
  const auto base = energies_of(campaign, baseline);
  SensitivityRow row;
  row.approach = campaign.schedule.approach();
  std::vector<double> effects;
  for (const auto& v : campaign.schedule.variants()) {
    if (v == baseline) continue;
    const auto energies = energies_of(campaign, v);
    if (energies.empty() || base.empty()) {
      throw ConfigError(fmt::format("campaign has no samples for '{}' or the baseline", v.name()));
    }
    const double es = stats::a12(energies, base);
    const double p = stats::wilcoxon_rank_sum(base, energies, stats::Alternative::kGreater).p_value;
    row.per_variant.push_back({v, es, p});
    effects.push_back(es);
    if (es >= kMediumEffectThreshold) ++row.count_es_ge_064;
    if (p <= alpha) ++row.count_p_le_alpha;
  }
  if (effects.empty()) throw ConfigError("campaign has no variant besides the baseline");
  row.median_es = stats::median(effects);
  return row;
}

std::vector<SensitivityRow> sensitivity_table(const std::map<Approach, Campaign>& campaigns,
                                              const VariantId& baseline, double alpha) {
  std::vector<SensitivityRow> rows;
  for (const auto& [approach, campaign] : campaigns) {
    auto row = sensitivity_row(campaign, baseline, alpha);
    row.approach = approach;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace r3v
