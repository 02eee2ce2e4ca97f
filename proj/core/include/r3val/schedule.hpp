#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "r3val/model.hpp"

namespace r3v {

struct ScheduleConfig {
  /// Initial permutation; R3 rotates it left once per setup.
  std::vector<VariantId> variants;
  std::size_t n_samples = 33;
  /// Rounds per discharge cycle (R3 only).
  std::size_t pi = 3;
  /// Carried for the runner's battery guard; the generator does not use it.
  double battery_floor = 20.0;

  /// Throws ConfigError describing the first violated constraint.
  void validate(Approach approach) const;
};

/// Element i of the result is element (i + k) mod size of the input.
template <typename T>
std::vector<T> rotate_left(std::span<const T> sequence, std::size_t k) {
  std::vector<T> out;
  out.reserve(sequence.size());
  const std::size_t n = sequence.size();
  for (std::size_t i = 0; i < n; ++i) out.push_back(sequence[(i + k) % n]);
  return out;
}

template <typename T>
std::vector<T> rotate_left(const std::vector<T>& sequence, std::size_t k) {
  return rotate_left(std::span<const T>(sequence), k);
}

/// Builds the full execution plan of one approach.
///
///   A1: setup, then n consecutive runs of each variant in order.
///   A2: per variant, setup then n consecutive runs.
///   A3: n times (setup, one run of each variant).
///   A4: one setup, then n rounds of one run of each variant.
///   R3: per reboot r in [0, N): setup, then pi rounds of rotate_left(variants, r).
///
/// R3 requires n_samples == pi * N, one rotation per reboot.
Schedule generate_schedule(const ScheduleConfig& config, Approach approach);

struct ScheduleSummary {
  std::size_t setup_count = 0;
  std::map<VariantId, std::size_t> runs_per_variant;
  /// Number of rounds in each setup segment (max round index + 1).
  std::vector<std::size_t> rounds_per_setup;

  friend bool operator==(const ScheduleSummary&, const ScheduleSummary&) = default;
};

ScheduleSummary schedule_summary(const Schedule& schedule);

/// Compact form used in docs and tests: "setup,ABCD,ABCD,setup,BCDA,..." with
/// variant names concatenated inside each segment. Only readable for
/// single-character names.
std::string compact_string(const Schedule& schedule);

// Line-oriented text format: '#' header lines with approach/samples/pi, then
// one action per line, "SETUP" or "RUN <variant>".
void write_schedule(std::ostream& out, const Schedule& schedule);
std::string schedule_to_text(const Schedule& schedule);
Schedule read_schedule(std::istream& in, const std::string& source_name = "<schedule>");
Schedule schedule_from_text(const std::string& text);
void save_schedule(const std::string& path, const Schedule& schedule);
Schedule load_schedule(const std::string& path);

}  // namespace r3v
