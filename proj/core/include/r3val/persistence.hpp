#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "r3val/model.hpp"

namespace r3v {

/// Column order of the samples file.
inline constexpr const char* kSampleColumns[] = {
    "variant",  "reboot_index",     "round_index", "slot_index", "energy_j", "runtime_s",
    "battery_pct", "voltage_mv", "active_processes", "memory_pct", "cpu_pct", "timestamp_s"};

/// Samples as CSV. Missing metadata is an empty field; doubles use the
/// shortest representation that reads back to the same value.
void write_samples_csv(std::ostream& out, const std::vector<MeasurementSample>& samples);
/// Columns are matched by header name. Throws ParseError with the line number,
/// or naming the missing column.
std::vector<MeasurementSample> read_samples_csv(std::istream& in, const std::string& source_name = "<samples>");

/// Everything about a campaign except its samples.
struct Manifest {
  Schedule schedule;
  std::string backend_descriptor;
  std::optional<std::uint64_t> seed;
  std::string created_at;
};

/// JSON manifest holding the approach, sample count, pi, schedule lines, seed,
/// backend descriptor and creation time.
void write_manifest(std::ostream& out, const Campaign& campaign);
Manifest read_manifest(std::istream& in, const std::string& source_name = "<manifest>");

inline constexpr const char* kSamplesFileName = "samples.csv";
inline constexpr const char* kManifestFileName = "manifest.json";

/// Writes `dir`/samples.csv and `dir`/manifest.json, creating `dir` if needed.
void save_campaign(const std::string& dir, const Campaign& campaign);
/// Reads a campaign directory and checks the samples against the schedule.
/// A partial campaign (fewer samples than runs) is accepted.
Campaign load_campaign(const std::string& dir);

}  // namespace r3v
