#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "r3val/backend.hpp"
#include "r3val/error.hpp"
#include "r3val/model.hpp"

namespace r3v {

enum class FailureKind {
  kBackend,       // the backend raised an error
  kBatteryFloor,  // charge fell below the floor before a run
};

/// Why a campaign stopped early.
struct FailureRecord {
  FailureKind kind = FailureKind::kBackend;
  std::optional<BackendFailure> backend_failure;
  std::size_t action_index = 0;
  /// Run slot that could not be measured; empty when a setup failed.
  std::optional<std::size_t> slot_index;
  std::string message;
};

struct CampaignResult {
  /// Samples collected before any failure.
  Campaign campaign;
  std::optional<FailureRecord> failure;

  bool ok() const noexcept { return !failure.has_value(); }
};

/// Executes the schedule strictly in order.
///
/// Setup actions call backend.setup(); run actions call backend.run() and
/// record a sample with its reboot/round/slot indices. Timestamps come from a
/// logical clock that advances by each reading's runtime. If the backend
/// reports a battery level below `battery_floor_pct` before a run, execution
/// stops with a kBatteryFloor record naming the slot. Errors derived from
/// r3v::Error are captured in the result; anything else propagates.
CampaignResult execute_campaign(const Schedule& schedule, MeasurementBackend& backend,
                                double battery_floor_pct = 20.0,
                                std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace r3v
