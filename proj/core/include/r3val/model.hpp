#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace r3v {

/// Opaque label of a software variant ("original", "raw1", ...).
///
/// Names are restricted to [A-Za-z0-9_.+-] so they survive the line-oriented
/// schedule format, CSV fields, and shell substitution in the external backend.
class VariantId {
 public:
  explicit VariantId(std::string name);

  const std::string& name() const noexcept { return name_; }

  friend auto operator<=>(const VariantId&, const VariantId&) = default;
  friend bool operator==(const VariantId&, const VariantId&) = default;

 private:
  std::string name_;
};

bool is_valid_variant_name(std::string_view name) noexcept;

/// Parses a comma-separated list of names, rejecting empties and duplicates.
std::vector<VariantId> parse_variant_list(std::string_view csv);

enum class Approach { kA1, kA2, kA3, kA4, kR3 };

inline constexpr Approach kAllApproaches[] = {Approach::kA1, Approach::kA2, Approach::kA3,
                                              Approach::kA4, Approach::kR3};

std::string_view to_string(Approach approach) noexcept;
/// Accepts "a1".."a4", "r3", "r3-validation" in any case.
Approach parse_approach(std::string_view text);

enum class ActionKind { kSetup, kRun };

/// One step of a schedule: reboot/recharge the device, or run one variant.
class ScheduleAction {
 public:
  static ScheduleAction setup() { return ScheduleAction(std::nullopt); }
  static ScheduleAction run(VariantId variant) { return ScheduleAction(std::move(variant)); }

  ActionKind kind() const noexcept { return variant_ ? ActionKind::kRun : ActionKind::kSetup; }
  bool is_setup() const noexcept { return !variant_; }
  bool is_run() const noexcept { return variant_.has_value(); }

  /// Throws ConfigError for a setup action.
  const VariantId& variant() const;

  friend bool operator==(const ScheduleAction&, const ScheduleAction&) = default;

 private:
  explicit ScheduleAction(std::optional<VariantId> variant) : variant_(std::move(variant)) {}

  std::optional<VariantId> variant_;
};

/// The full execution plan produced by one validation approach.
///
/// Construction checks that the plan starts with a setup and that every
/// variant is run exactly `n_samples` times.
class Schedule {
 public:
  Schedule(Approach approach, std::vector<ScheduleAction> actions, std::size_t n_samples,
           std::size_t pi);

  Approach approach() const noexcept { return approach_; }
  const std::vector<ScheduleAction>& actions() const noexcept { return actions_; }
  std::size_t n_samples() const noexcept { return n_samples_; }
  std::size_t pi() const noexcept { return pi_; }

  /// Distinct variants in order of first appearance.
  const std::vector<VariantId>& variants() const noexcept { return variants_; }
  std::size_t run_count() const noexcept { return n_samples_ * variants_.size(); }
  bool contains(const VariantId& variant) const noexcept;

  friend bool operator==(const Schedule& a, const Schedule& b) {
    return a.approach_ == b.approach_ && a.n_samples_ == b.n_samples_ && a.pi_ == b.pi_ &&
           a.actions_ == b.actions_;
  }

 private:
  Approach approach_;
  std::vector<ScheduleAction> actions_;
  std::size_t n_samples_;
  std::size_t pi_;
  std::vector<VariantId> variants_;
};

/// Position of a run action inside its schedule.
struct SlotPosition {
  std::size_t reboot_index = 0;  // number of preceding setups, minus one
  std::size_t round_index = 0;   // previous runs of the same variant since the last setup
  std::size_t slot_index = 0;    // position among all run actions
};

/// One entry per run action, in schedule order.
std::vector<SlotPosition> slot_positions(const Schedule& schedule);

/// One energy observation with whatever system-state metadata the backend could supply.
/// Absent metadata stays empty and is written as an empty CSV field.
struct MeasurementSample {
  VariantId variant;
  double energy_j = 0.0;
  std::optional<double> runtime_s;
  std::size_t reboot_index = 0;
  std::size_t round_index = 0;
  std::size_t slot_index = 0;
  std::optional<double> battery_pct;
  std::optional<double> voltage_mv;
  std::optional<std::int64_t> active_processes;
  std::optional<double> memory_pct;
  std::optional<double> cpu_pct;
  double timestamp_s = 0.0;

  friend bool operator==(const MeasurementSample&, const MeasurementSample&) = default;
};

struct Campaign {
  Schedule schedule;
  std::vector<MeasurementSample> samples;
  std::string backend_descriptor;
  std::optional<std::uint64_t> seed;
  std::string created_at;

  friend bool operator==(const Campaign&, const Campaign&) = default;
};

/// Samples of one variant in execution order. Throws UnknownVariantError when
/// the variant is not part of the campaign's schedule.
std::vector<MeasurementSample> samples_of(const Campaign& campaign, const VariantId& variant);

/// Energies of one variant in execution order.
std::vector<double> energies_of(const Campaign& campaign, const VariantId& variant);

/// Checks the campaign invariants: samples follow the schedule order and carry
/// the indices of the run action that produced them. Throws StructureMismatch.
void check_campaign(const Campaign& campaign);

/// UTC wall-clock time as ISO-8601, second resolution.
std::string utc_timestamp_now();

}  // namespace r3v
