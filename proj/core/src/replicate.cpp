#include "r3val/replicate.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

#include <fmt/format.h>

#include "r3val/backend.hpp"
#include "r3val/error.hpp"
#include "r3val/runner.hpp"
#include "r3val/schedule.hpp"

namespace r3v {

namespace {

constexpr std::uint64_t kCorpusStream = 1000;
constexpr std::uint64_t kSensitivityStream = 2000;
constexpr std::uint64_t kSpectrumStream = 3000;

}  // namespace

std::uint64_t seed_from_env(std::uint64_t fallback) {
  const char* text = std::getenv(kSeedEnvVar);
  if (!text || !*text) return fallback;
  std::uint64_t seed = 0;
  const char* end = text + std::strlen(text);
  const auto [ptr, ec] = std::from_chars(text, end, seed);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(fmt::format("{}='{}' is not an unsigned integer", kSeedEnvVar, text));
  }
  return seed;
}

std::vector<Corpus> simulate_platforms(const DeviceParams& params, const VariantId& variant, std::size_t count,
                                       std::size_t blocks, std::size_t readings, std::uint64_t seed) {
  std::vector<Corpus> out;
  for (std::size_t p = 0; p < count; ++p) {
    out.push_back(simulate_corpus(params, variant, blocks, readings, mix_seed(seed, kCorpusStream + p),
                                  "sim-" + std::to_string(p + 1)));
  }
  return out;
}

std::vector<SpecificitySection> specificity_experiment(const std::vector<Corpus>& corpora, double alpha,
                                                       SingleChargeMapping mapping) {
  if (corpora.empty()) throw ConfigError("specificity needs at least one corpus");
  std::vector<SpecificitySection> sections;
  for (const Approach approach : kAllApproaches) {
    std::vector<SpecificityMatrix> matrices;
    for (const auto& corpus : corpora) {
      const std::size_t blocks = corpus.reboots.size();
      const std::size_t readings = corpus.reboots.front().size();
      matrices.push_back(specificity_matrix(group_corpus(corpus, approach, blocks, readings, mapping), alpha));
    }
    sections.push_back({approach, aggregate_specificity(matrices), corpora.size()});
  }
  return sections;
}

std::map<Approach, Campaign> sensitivity_campaigns(const DeviceParams& params, std::size_t pi, std::uint64_t seed,
                                                   double battery_floor_pct) {
  ScheduleConfig config;
  config.variants = params.variant_ids();
  config.pi = pi;
  config.n_samples = pi * config.variants.size();
  config.battery_floor = battery_floor_pct;

  std::map<Approach, Campaign> out;
  const std::uint64_t device_seed = mix_seed(seed, kSensitivityStream);
  for (const Approach approach : kAllApproaches) {
    SimulatorBackend backend(params, device_seed);
    auto result = execute_campaign(generate_schedule(config, approach), backend, battery_floor_pct, device_seed);
    if (!result.ok()) {
      throw Error(fmt::format("{} campaign stopped: {}", to_string(approach), result.failure->message));
    }
    out.emplace(approach, std::move(result.campaign));
  }
  return out;
}

spectral::Spectrum drift_spectrum(const DeviceParams& params, const VariantId& variant, std::size_t runs,
                                  std::uint64_t seed) {
  SimulatedDevice device(params, seed);
  device.setup();
  std::vector<double> series;
  series.reserve(runs);
  for (std::size_t i = 0; i < runs; ++i) series.push_back(device.run(variant).energy_j);
  return spectral::periodogram(series, params.profile(variant).runtime_s);
}

ReplicationResult run_replication(const ReplicationConfig& config) {
  config.params.validate();
  config.params.profile(config.baseline);

  ReplicationResult result;
  result.corpora = simulate_platforms(config.params, config.baseline, config.platforms, config.corpus_blocks,
                                      config.corpus_readings, config.seed);
  result.campaigns = sensitivity_campaigns(config.params, config.pi, config.seed, config.params.battery_floor_pct);

  auto& report = result.report;
  report.title = "R3 validation replication";
  report.seed = config.seed;
  report.alpha = config.alpha;
  report.specificity = specificity_experiment(result.corpora, config.alpha);
  report.sensitivity = sensitivity_table(result.campaigns, config.baseline, config.alpha);
  report.spectrum = drift_spectrum(config.params, config.baseline, config.spectrum_runs,
                                   mix_seed(config.seed, kSpectrumStream));
  report.spectrum_variant = config.baseline.name();
  return result;
}

}  // namespace r3v
