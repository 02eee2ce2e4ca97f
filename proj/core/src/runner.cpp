#include "r3val/runner.hpp"

#include <fmt/format.h>

namespace r3v {

CampaignResult execute_campaign(const Schedule& schedule, MeasurementBackend& backend,
                                double battery_floor_pct, std::optional<std::uint64_t> seed) {
  CampaignResult result{Campaign{schedule, {}, backend.descriptor(), seed, utc_timestamp_now()}, std::nullopt};
  const auto positions = slot_positions(schedule);
  const auto& actions = schedule.actions();
  auto& samples = result.campaign.samples;
  samples.reserve(positions.size());

  double clock_s = 0.0;
  std::size_t slot = 0;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const auto& action = actions[i];
    try {
      if (action.is_setup()) {
        backend.setup();
        continue;
      }
      if (const auto level = backend.battery_pct(); level && *level < battery_floor_pct) {
        result.failure = FailureRecord{
            FailureKind::kBatteryFloor, std::nullopt, i, slot,
            fmt::format("battery at {:.2f}% is below the {}% floor before slot {} (run of '{}')", *level,
                        battery_floor_pct, slot, action.variant().name())};
        return result;
      }
      const Reading reading = backend.run(action.variant());
      const auto& pos = positions[slot];
      MeasurementSample s{action.variant(),
                          reading.energy_j,
                          reading.runtime_s,
                          pos.reboot_index,
                          pos.round_index,
                          pos.slot_index,
                          reading.battery_pct,
                          reading.voltage_mv,
                          reading.active_processes,
                          reading.memory_pct,
                          reading.cpu_pct,
                          clock_s};
      samples.push_back(std::move(s));
      clock_s += reading.runtime_s.value_or(0.0);
      ++slot;
    } catch (const BackendError& e) {
      result.failure = FailureRecord{FailureKind::kBackend, e.kind(), i,
                                     action.is_run() ? std::optional<std::size_t>(slot) : std::nullopt,
                                     e.what()};
      return result;
    } catch (const Error& e) {
      result.failure = FailureRecord{FailureKind::kBackend, std::nullopt, i,
                                     action.is_run() ? std::optional<std::size_t>(slot) : std::nullopt,
                                     e.what()};
      return result;
    }
  }
  return result;
}

}  // namespace r3v
