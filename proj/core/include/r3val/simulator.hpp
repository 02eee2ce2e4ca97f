#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "r3val/model.hpp"
#include "r3val/random.hpp"

namespace r3v {

/// What a backend reports for one run; the runner adds schedule indices and the clock.
struct Reading {
  double energy_j = 0.0;
  std::optional<double> runtime_s;
  std::optional<double> battery_pct;
  std::optional<double> voltage_mv;
  std::optional<std::int64_t> active_processes;
  std::optional<double> memory_pct;
  std::optional<double> cpu_pct;
};

struct VariantProfile {
  VariantId variant;
  double energy_j;   // true mean cost of one run
  double runtime_s;  // mean duration of one run

  friend bool operator==(const VariantProfile&, const VariantProfile&) = default;
};

struct StartupTransient {
  double extra_j = 3.0;        // surplus on the first run after a setup
  std::size_t decay_runs = 5;  // linear decay to zero over this many runs

  friend bool operator==(const StartupTransient&, const StartupTransient&) = default;
};

struct VoltageModel {
  double start_mv = 4350.0;
  double start_jitter_mv = 10.0;
  /// Drop over one nominal discharge cycle of `cycle_pct` percent of charge.
  double drop_mv_per_cycle = 24.0;
  double cycle_pct = 7.0;
  /// Chance that a run moves the voltage up instead of down.
  double nonmonotone_prob = 0.1;

  friend bool operator==(const VoltageModel&, const VoltageModel&) = default;
};

/// Parameters of the simulated device. Defaults describe a phone-like device
/// running an ~50 J, ~17 s workload; see data/default_device.conf.
struct DeviceParams {
  std::vector<VariantProfile> variants;

  double drift_amplitude_j = 3.0;
  double drift_period_runs = 200.0;
  double walk_step_j = 0.1;
  double reboot_offset_sd_j = 1.0;
  StartupTransient startup_transient;

  double burst_rate = 0.005;
  double burst_energy_j = 50.0;
  std::int64_t burst_process_jump = 250;
  double burst_memory_drop_pct = 5.0;
  double burst_background_cpu_pct = 40.5;

  std::int64_t base_processes_low = 140;
  std::int64_t base_processes_high = 250;
  double base_memory_pct = 50.0;
  double memory_setup_jitter_pct = 5.0;
  double memory_growth_pct = 0.02;
  double cpu_base_low_pct = 48.0;
  double cpu_base_high_pct = 54.0;
  double cpu_background_low_pct = 3.0;
  double cpu_background_high_pct = 8.0;

  double battery_capacity_j = 25000.0;
  double battery_floor_pct = 20.0;
  double low_battery_noise_multiplier = 4.0;
  VoltageModel voltage;

  double measurement_noise_sd_j = 1.0;
  double runtime_jitter_s = 1.25;

  /// Built-in defaults including the eleven default variants.
  static DeviceParams defaults();

  /// One message per violated constraint; empty when valid.
  std::vector<std::string> violations() const;
  void validate() const;

  /// Throws UnknownVariantError.
  const VariantProfile& profile(const VariantId& variant) const;
  std::vector<VariantId> variant_ids() const;

  /// Every randomness source switched off; runs cost exactly their base energy.
  DeviceParams without_noise() const;

  friend bool operator==(const DeviceParams&, const DeviceParams&) = default;
};

// Flat "key = value" text with '#' comments; see data/default_device.conf for keys.
// Unspecified keys keep their defaults; listing any variant.* key replaces the
// default variant set, in file order.
DeviceParams read_device_params(std::istream& in, const std::string& source_name = "<params>");
DeviceParams load_device_params(const std::string& path);
void write_device_params(std::ostream& out, const DeviceParams& params);

struct DeviceState {
  double battery_pct = 100.0;
  double voltage_mv = 0.0;
  double walk_position_j = 0.0;
  std::size_t runs_since_setup = 0;
  std::size_t reboot_count = 0;
  std::size_t global_run_index = 0;
  double current_offset_j = 0.0;
  double memory_pct = 0.0;

  friend bool operator==(const DeviceState&, const DeviceState&) = default;
};

/// Seeded state machine of a device whose system state drifts between and
/// within discharge cycles. Not thread-safe; distinct devices are independent.
///
/// Energy of one run of v:
///   base(v) + A sin(2 pi g / P) + walk + reboot offset + startup transient
///   + burst + N(0, noise_sd * m),  clamped at 0,
/// with g the global run index and m the low-battery multiplier below the floor.
class SimulatedDevice {
 public:
  SimulatedDevice(DeviceParams params, std::uint64_t seed);

  /// Reboot and recharge: full battery, fresh reboot offset and start voltage.
  void setup();

  /// Throws BackendError(kDischarged) on an empty battery, UnknownVariantError
  /// for a variant missing from the parameters.
  Reading run(const VariantId& variant);

  const DeviceState& state() const noexcept { return state_; }
  const DeviceParams& params() const noexcept { return params_; }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  DeviceParams params_;
  std::uint64_t seed_;
  Rng rng_;
  DeviceState state_;
};

struct Corpus;

/// Repeated measurements of one variant: `blocks` setups of `readings` runs each.
Corpus simulate_corpus(const DeviceParams& params, const VariantId& variant, std::size_t blocks,
                       std::size_t readings, std::uint64_t seed, std::string platform_label);

}  // namespace r3v
