#include "r3val/model.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <ctime>
#include <map>
#include <set>

#include <fmt/format.h>

#include "r3val/error.hpp"

namespace r3v {

bool is_valid_variant_name(std::string_view name) noexcept {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-' ||
           c == '+';
  });
}

VariantId::VariantId(std::string name) : name_(std::move(name)) {
  if (!is_valid_variant_name(name_)) {
    throw ConfigError(fmt::format("invalid variant name '{}': expected [A-Za-z0-9_.+-]+", name_));
  }
}

std::vector<VariantId> parse_variant_list(std::string_view csv) {
  std::vector<VariantId> out;
  std::set<std::string> seen;
  std::size_t start = 0;
  while (start <= csv.size()) {
    auto end = csv.find(',', start);
    if (end == std::string_view::npos) end = csv.size();
    std::string item(csv.substr(start, end - start));
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) throw ConfigError("empty variant name in list");
    if (!seen.insert(item).second) throw ConfigError(fmt::format("duplicate variant '{}'", item));
    out.emplace_back(std::move(item));
    start = end + 1;
  }
  return out;
}

std::string_view to_string(Approach approach) noexcept {
  switch (approach) {
    case Approach::kA1: return "A1";
    case Approach::kA2: return "A2";
    case Approach::kA3: return "A3";
    case Approach::kA4: return "A4";
    case Approach::kR3: return "R3";
  }
  return "?";
}

Approach parse_approach(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "a1") return Approach::kA1;
  if (lower == "a2") return Approach::kA2;
  if (lower == "a3") return Approach::kA3;
  if (lower == "a4") return Approach::kA4;
  if (lower == "r3" || lower == "r3-validation") return Approach::kR3;
  throw ConfigError(fmt::format("unknown approach '{}': expected a1, a2, a3, a4 or r3", text));
}

const VariantId& ScheduleAction::variant() const {
  if (!variant_) throw ConfigError("setup action carries no variant");
  return *variant_;
}

Schedule::Schedule(Approach approach, std::vector<ScheduleAction> actions, std::size_t n_samples,
                   std::size_t pi)
    : approach_(approach), actions_(std::move(actions)), n_samples_(n_samples), pi_(pi) {
  if (actions_.empty() || !actions_.front().is_setup()) {
    throw ConfigError("schedule must start with a setup action");
  }
  if (n_samples_ == 0) throw ConfigError("schedule n_samples must be at least 1");
  if (pi_ == 0) throw ConfigError("schedule pi must be at least 1");

  std::map<VariantId, std::size_t> counts;
  for (const auto& action : actions_) {
    if (!action.is_run()) continue;
    auto [it, inserted] = counts.try_emplace(action.variant(), 0);
    if (inserted) variants_.push_back(action.variant());
    ++it->second;
  }
  if (variants_.empty()) throw ConfigError("schedule contains no run actions");
  for (const auto& [variant, count] : counts) {
    if (count != n_samples_) {
      throw ConfigError(fmt::format("variant '{}' runs {} times, schedule expects {}",
                                    variant.name(), count, n_samples_));
    }
  }
}

bool Schedule::contains(const VariantId& variant) const noexcept {
  return std::find(variants_.begin(), variants_.end(), variant) != variants_.end();
}

std::vector<SlotPosition> slot_positions(const Schedule& schedule) {
  std::vector<SlotPosition> out;
  out.reserve(schedule.run_count());
  std::map<VariantId, std::size_t> runs_since_setup;
  std::size_t setups = 0;
  for (const auto& action : schedule.actions()) {
    if (action.is_setup()) {
      ++setups;
      runs_since_setup.clear();
      continue;
    }
    auto& round = runs_since_setup[action.variant()];
    out.push_back(SlotPosition{setups - 1, round, out.size()});
    ++round;
  }
  return out;
}

std::vector<MeasurementSample> samples_of(const Campaign& campaign, const VariantId& variant) {
  if (!campaign.schedule.contains(variant)) throw UnknownVariantError(variant.name());
  std::vector<MeasurementSample> out;
  for (const auto& sample : campaign.samples) {
    if (sample.variant == variant) out.push_back(sample);
  }
  return out;
}

std::vector<double> energies_of(const Campaign& campaign, const VariantId& variant) {
  std::vector<double> out;
  for (const auto& sample : samples_of(campaign, variant)) out.push_back(sample.energy_j);
  return out;
}

void check_campaign(const Campaign& campaign) {
  const auto positions = slot_positions(campaign.schedule);
  if (campaign.samples.size() > positions.size()) {
    throw StructureMismatch(fmt::format("campaign holds {} samples but its schedule has {} runs",
                                        campaign.samples.size(), positions.size()));
  }
  std::size_t run = 0;
  for (const auto& action : campaign.schedule.actions()) {
    if (!action.is_run()) continue;
    if (run == campaign.samples.size()) break;
    const auto& sample = campaign.samples[run];
    const auto& pos = positions[run];
    if (sample.variant != action.variant() || sample.reboot_index != pos.reboot_index ||
        sample.round_index != pos.round_index || sample.slot_index != pos.slot_index) {
      throw StructureMismatch(
          fmt::format("sample {} ({}) does not match schedule slot {} ({})", run,
                      sample.variant.name(), pos.slot_index, action.variant().name()));
    }
    if (!(sample.energy_j >= 0.0)) {
      throw StructureMismatch(fmt::format("sample {} has negative energy", run));
    }
    if (sample.battery_pct && (*sample.battery_pct < 0.0 || *sample.battery_pct > 100.0)) {
      throw StructureMismatch(fmt::format("sample {} battery level outside [0, 100]", run));
    }
    ++run;
  }
}

std::string utc_timestamp_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace r3v
