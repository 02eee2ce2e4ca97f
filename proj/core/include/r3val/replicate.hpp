#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "r3val/corpus.hpp"
#include "r3val/evaluation.hpp"
#include "r3val/report.hpp"
#include "r3val/simulator.hpp"

namespace r3v {

inline constexpr std::uint64_t kDefaultSeed = 1;
inline constexpr const char* kSeedEnvVar = "R3VAL_SEED";

/// Seed from R3VAL_SEED when set and valid, otherwise `fallback`.
/// Throws ConfigError for a malformed value.
std::uint64_t seed_from_env(std::uint64_t fallback);

struct ReplicationConfig {
  std::uint64_t seed = kDefaultSeed;
  DeviceParams params = DeviceParams::defaults();
  VariantId baseline{"original"};

  std::size_t platforms = 7;
  std::size_t corpus_blocks = 7;
  std::size_t corpus_readings = 7;

  std::size_t pi = 3;  // samples per variant = pi * variant count
  std::size_t spectrum_runs = 200;
  double alpha = kDefaultAlpha;
};

/// `count` single-variant corpora from independently seeded simulated devices,
/// labelled "sim-1".."sim-<count>".
std::vector<Corpus> simulate_platforms(const DeviceParams& params, const VariantId& variant, std::size_t count,
                                       std::size_t blocks, std::size_t readings, std::uint64_t seed);

/// Groups every corpus under every approach (blocks many pseudo-variants with
/// readings many samples each) and sums the false-positive masks.
std::vector<SpecificitySection> specificity_experiment(const std::vector<Corpus>& corpora, double alpha,
                                                       SingleChargeMapping mapping = SingleChargeMapping::kPhaseAligned);

/// One campaign per approach over all variants of `params`, each on a device
/// seeded with `seed`. Throws Error when a campaign stops early.
std::map<Approach, Campaign> sensitivity_campaigns(const DeviceParams& params, std::size_t pi, std::uint64_t seed,
                                                   double battery_floor_pct);

/// Periodogram of `runs` consecutive runs of `variant` after one setup.
spectral::Spectrum drift_spectrum(const DeviceParams& params, const VariantId& variant, std::size_t runs,
                                  std::uint64_t seed);

struct ReplicationResult {
  ReportInputs report;
  std::vector<Corpus> corpora;
  std::map<Approach, Campaign> campaigns;
};

/// Full desk-scale pipeline on the simulator: specificity over simulated
/// platforms, sensitivity under all five approaches, and a drift spectrum.
ReplicationResult run_replication(const ReplicationConfig& config);

}  // namespace r3v
