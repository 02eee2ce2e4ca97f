#include "r3val/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "r3val/corpus.hpp"
#include "r3val/error.hpp"

namespace r3v {

DeviceParams DeviceParams::defaults() {
  DeviceParams p;
  // raw1..raw10 then the baseline: odd variants improve by 8..12 %, even ones match it.
  constexpr double kBaseline = 50.0;
  constexpr double kSavings[] = {0.08, 0.09, 0.10, 0.11, 0.12};
  for (int i = 1; i <= 10; ++i) {
    const double energy = i % 2 == 1 ? kBaseline * (1.0 - kSavings[(i - 1) / 2]) : kBaseline;
    p.variants.push_back({VariantId("raw" + std::to_string(i)), energy, 17.0});
  }
  p.variants.push_back({VariantId("original"), kBaseline, 17.0});
  return p;
}

std::vector<std::string> DeviceParams::violations() const {
  std::vector<std::string> out;
  auto non_negative = [&](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) out.push_back(fmt::format("{} must be >= 0", name));
  };
  auto probability = [&](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) out.push_back(fmt::format("{} must lie in [0, 1]", name));
  };

  if (variants.empty()) out.emplace_back("at least one variant is required");
  std::map<VariantId, int> seen;
  double max_base = 0.0;
  for (const auto& v : variants) {
    if (++seen[v.variant] == 2) out.push_back(fmt::format("duplicate variant '{}'", v.variant.name()));
    if (!(v.energy_j >= 0.0)) out.push_back(fmt::format("variant '{}' energy must be >= 0", v.variant.name()));
    if (!(v.runtime_s >= 0.0)) out.push_back(fmt::format("variant '{}' runtime must be >= 0", v.variant.name()));
    max_base = std::max(max_base, v.energy_j);
  }

  non_negative(drift_amplitude_j, "drift amplitude");
  if (!(drift_period_runs > 0.0)) out.emplace_back("drift period must be > 0");
  non_negative(walk_step_j, "walk step");
  non_negative(reboot_offset_sd_j, "reboot offset sd");
  non_negative(startup_transient.extra_j, "startup transient extra");
  probability(burst_rate, "burst rate");
  non_negative(burst_energy_j, "burst energy");
  if (burst_process_jump < 0) out.emplace_back("burst process jump must be >= 0");
  non_negative(burst_memory_drop_pct, "burst memory drop");
  non_negative(burst_background_cpu_pct, "burst background cpu");
  if (base_processes_low < 0 || base_processes_high < base_processes_low) {
    out.emplace_back("process range must satisfy 0 <= low <= high");
  }
  if (!(base_memory_pct >= 0.0 && base_memory_pct <= 100.0)) out.emplace_back("base memory must lie in [0, 100]");
  non_negative(memory_setup_jitter_pct, "memory setup jitter");
  non_negative(memory_growth_pct, "memory growth");
  if (!(cpu_base_low_pct >= 0.0 && cpu_base_high_pct >= cpu_base_low_pct)) {
    out.emplace_back("cpu base range must satisfy 0 <= low <= high");
  }
  if (!(cpu_background_low_pct >= 0.0 && cpu_background_high_pct >= cpu_background_low_pct)) {
    out.emplace_back("cpu background range must satisfy 0 <= low <= high");
  }
  if (!(battery_floor_pct >= 0.0 && battery_floor_pct < 100.0)) out.emplace_back("battery floor must lie in [0, 100)");
  if (!(low_battery_noise_multiplier >= 1.0)) out.emplace_back("low battery noise multiplier must be >= 1");
  non_negative(voltage.start_mv, "voltage start");
  non_negative(voltage.start_jitter_mv, "voltage start jitter");
  non_negative(voltage.drop_mv_per_cycle, "voltage drop per cycle");
  if (!(voltage.cycle_pct > 0.0)) out.emplace_back("voltage cycle percent must be > 0");
  probability(voltage.nonmonotone_prob, "voltage nonmonotone probability");
  non_negative(measurement_noise_sd_j, "measurement noise sd");
  non_negative(runtime_jitter_s, "runtime jitter");

  const double max_run = max_base + drift_amplitude_j + startup_transient.extra_j + burst_energy_j;
  if (!(battery_capacity_j > max_run)) {
    out.push_back(fmt::format("battery capacity {} J must exceed the largest run cost {} J",
                              battery_capacity_j, max_run));
  }
  return out;
}

void DeviceParams::validate() const {
  const auto problems = violations();
  if (problems.empty()) return;
  std::string msg = "invalid device parameters:";
  for (const auto& p : problems) msg += "\n  - " + p;
  throw ConfigError(msg);
}

const VariantProfile& DeviceParams::profile(const VariantId& variant) const {
  for (const auto& v : variants) {
    if (v.variant == variant) return v;
  }
  throw UnknownVariantError(variant.name());
}

std::vector<VariantId> DeviceParams::variant_ids() const {
  std::vector<VariantId> out;
  for (const auto& v : variants) out.push_back(v.variant);
  return out;
}

DeviceParams DeviceParams::without_noise() const {
  DeviceParams p = *this;
  p.drift_amplitude_j = 0.0;
  p.walk_step_j = 0.0;
  p.reboot_offset_sd_j = 0.0;
  p.startup_transient.extra_j = 0.0;
  p.burst_rate = 0.0;
  p.measurement_noise_sd_j = 0.0;
  p.runtime_jitter_s = 0.0;
  return p;
}

// ---------------------------------------------------------------------------
// key = value parameter files

namespace {

struct ParamTable {
  std::map<std::string, std::function<void(DeviceParams&, const std::string&)>> setters;
  std::vector<std::pair<std::string, std::function<std::string(const DeviceParams&)>>> getters;
};

double to_double(const std::string& text) {
  std::size_t pos = 0;
  double v = std::stod(text, &pos);
  if (pos != text.size()) throw std::invalid_argument("trailing characters");
  return v;
}

std::int64_t to_int(const std::string& text) {
  std::size_t pos = 0;
  long long v = std::stoll(text, &pos);
  if (pos != text.size()) throw std::invalid_argument("trailing characters");
  return v;
}

const ParamTable& param_table() {
  static const ParamTable table = [] {
    ParamTable t;
    auto add_double = [&t](const std::string& key, double DeviceParams::*field) {
      t.setters[key] = [field](DeviceParams& p, const std::string& v) { p.*field = to_double(v); };
      t.getters.emplace_back(key, [field](const DeviceParams& p) { return fmt::format("{}", p.*field); });
    };
    auto add_int = [&t](const std::string& key, std::int64_t DeviceParams::*field) {
      t.setters[key] = [field](DeviceParams& p, const std::string& v) { p.*field = to_int(v); };
      t.getters.emplace_back(key, [field](const DeviceParams& p) { return fmt::format("{}", p.*field); });
    };
    auto add_voltage = [&t](const std::string& key, double VoltageModel::*field) {
      t.setters[key] = [field](DeviceParams& p, const std::string& v) { p.voltage.*field = to_double(v); };
      t.getters.emplace_back(key, [field](const DeviceParams& p) { return fmt::format("{}", p.voltage.*field); });
    };

    add_double("drift.amplitude_j", &DeviceParams::drift_amplitude_j);
    add_double("drift.period_runs", &DeviceParams::drift_period_runs);
    add_double("drift.walk_step_j", &DeviceParams::walk_step_j);
    add_double("reboot.offset_sd_j", &DeviceParams::reboot_offset_sd_j);
    t.setters["startup.extra_j"] = [](DeviceParams& p, const std::string& v) {
      p.startup_transient.extra_j = to_double(v);
    };
    t.getters.emplace_back("startup.extra_j", [](const DeviceParams& p) {
      return fmt::format("{}", p.startup_transient.extra_j);
    });
    t.setters["startup.decay_runs"] = [](DeviceParams& p, const std::string& v) {
      const auto n = to_int(v);
      if (n < 0) throw std::invalid_argument("negative");
      p.startup_transient.decay_runs = static_cast<std::size_t>(n);
    };
    t.getters.emplace_back("startup.decay_runs", [](const DeviceParams& p) {
      return fmt::format("{}", p.startup_transient.decay_runs);
    });
    add_double("burst.rate", &DeviceParams::burst_rate);
    add_double("burst.energy_j", &DeviceParams::burst_energy_j);
    add_int("burst.process_jump", &DeviceParams::burst_process_jump);
    add_double("burst.memory_drop_pct", &DeviceParams::burst_memory_drop_pct);
    add_double("burst.background_cpu_pct", &DeviceParams::burst_background_cpu_pct);
    add_int("processes.low", &DeviceParams::base_processes_low);
    add_int("processes.high", &DeviceParams::base_processes_high);
    add_double("memory.base_pct", &DeviceParams::base_memory_pct);
    add_double("memory.setup_jitter_pct", &DeviceParams::memory_setup_jitter_pct);
    add_double("memory.growth_pct_per_run", &DeviceParams::memory_growth_pct);
    add_double("cpu.base_low_pct", &DeviceParams::cpu_base_low_pct);
    add_double("cpu.base_high_pct", &DeviceParams::cpu_base_high_pct);
    add_double("cpu.background_low_pct", &DeviceParams::cpu_background_low_pct);
    add_double("cpu.background_high_pct", &DeviceParams::cpu_background_high_pct);
    add_double("battery.capacity_j", &DeviceParams::battery_capacity_j);
    add_double("battery.floor_pct", &DeviceParams::battery_floor_pct);
    add_double("battery.low_noise_multiplier", &DeviceParams::low_battery_noise_multiplier);
    add_voltage("voltage.start_mv", &VoltageModel::start_mv);
    add_voltage("voltage.start_jitter_mv", &VoltageModel::start_jitter_mv);
    add_voltage("voltage.drop_mv_per_cycle", &VoltageModel::drop_mv_per_cycle);
    add_voltage("voltage.cycle_pct", &VoltageModel::cycle_pct);
    add_voltage("voltage.nonmonotone_prob", &VoltageModel::nonmonotone_prob);
    add_double("noise.measurement_sd_j", &DeviceParams::measurement_noise_sd_j);
    add_double("runtime.jitter_s", &DeviceParams::runtime_jitter_s);
    return t;
  }();
  return table;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

DeviceParams read_device_params(std::istream& in, const std::string& source_name) {
  DeviceParams params = DeviceParams::defaults();
  // variant name -> (energy, runtime), in order of first appearance
  std::vector<std::string> order;
  std::map<std::string, std::pair<std::optional<double>, std::optional<double>>> variants;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source_name, line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw ParseError(source_name, line_no, fmt::format("missing value for '{}'", key));

    if (key.rfind("variant.", 0) == 0) {
      const auto dot = key.rfind('.');
      const std::string name = key.substr(8, dot > 8 ? dot - 8 : 0);
      const std::string field = key.substr(dot + 1);
      if (dot <= 8 || !is_valid_variant_name(name) || (field != "energy_j" && field != "runtime_s")) {
        throw ParseError(source_name, line_no,
                         fmt::format("expected variant.<name>.energy_j or .runtime_s, got '{}'", key));
      }
      if (!variants.count(name)) order.push_back(name);
      double v = 0.0;
      try {
        v = to_double(value);
      } catch (const std::exception&) {
        throw ParseError(source_name, line_no, fmt::format("bad number '{}' for '{}'", value, key));
      }
      (field == "energy_j" ? variants[name].first : variants[name].second) = v;
      continue;
    }
    const auto it = param_table().setters.find(key);
    if (it == param_table().setters.end()) {
      throw ParseError(source_name, line_no, fmt::format("unknown key '{}'", key));
    }
    try {
      it->second(params, value);
    } catch (const std::exception&) {
      throw ParseError(source_name, line_no, fmt::format("bad value '{}' for '{}'", value, key));
    }
  }
  if (!order.empty()) {
    params.variants.clear();
    for (const auto& name : order) {
      const auto& [energy, runtime] = variants[name];
      if (!energy) throw ParseError(source_name, 0, fmt::format("variant '{}' has no energy_j", name));
      params.variants.push_back({VariantId(name), *energy, runtime.value_or(0.0)});
    }
  }
  try {
    params.validate();
  } catch (const ConfigError& e) {
    throw ParseError(source_name, 0, e.what());
  }
  return params;
}

DeviceParams load_device_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open '{}'", path));
  return read_device_params(in, path);
}

void write_device_params(std::ostream& out, const DeviceParams& params) {
  for (const auto& v : params.variants) {
    out << "variant." << v.variant.name() << ".energy_j = " << fmt::format("{}", v.energy_j) << '\n';
    out << "variant." << v.variant.name() << ".runtime_s = " << fmt::format("{}", v.runtime_s) << '\n';
  }
  for (const auto& [key, get] : param_table().getters) out << key << " = " << get(params) << '\n';
}

// ---------------------------------------------------------------------------

SimulatedDevice::SimulatedDevice(DeviceParams params, std::uint64_t seed)
    : params_(std::move(params)), seed_(seed), rng_(seed) {
  params_.validate();
  state_.voltage_mv = params_.voltage.start_mv;
  state_.memory_pct = params_.base_memory_pct;
}

void SimulatedDevice::setup() {
  state_.battery_pct = 100.0;
  state_.runs_since_setup = 0;
  ++state_.reboot_count;
  state_.current_offset_j = rng_.normal(0.0, params_.reboot_offset_sd_j);
  state_.voltage_mv = params_.voltage.start_mv + rng_.normal(0.0, params_.voltage.start_jitter_mv);
  state_.memory_pct = std::clamp(
      params_.base_memory_pct + rng_.uniform(0.0, params_.memory_setup_jitter_pct), 0.0, 100.0);
}

Reading SimulatedDevice::run(const VariantId& variant) {
  const auto& profile = params_.profile(variant);
  if (state_.battery_pct <= 0.0) {
    throw BackendError(BackendFailure::kDischarged, "discharged: battery is empty");
  }
  const auto& p = params_;

  const double multiplier = state_.battery_pct < p.battery_floor_pct ? p.low_battery_noise_multiplier : 1.0;
  state_.walk_position_j += rng_.normal(0.0, p.walk_step_j);
  const double drift = p.drift_amplitude_j *
                       std::sin(2.0 * std::numbers::pi * static_cast<double>(state_.global_run_index) /
                                p.drift_period_runs);
  double transient = 0.0;
  if (p.startup_transient.decay_runs > 0 && state_.runs_since_setup < p.startup_transient.decay_runs) {
    transient = p.startup_transient.extra_j *
                (1.0 - static_cast<double>(state_.runs_since_setup) /
                           static_cast<double>(p.startup_transient.decay_runs));
  }
  const bool burst = rng_.bernoulli(p.burst_rate);
  const double noise = rng_.normal(0.0, p.measurement_noise_sd_j * multiplier);

  double energy = profile.energy_j + drift + state_.walk_position_j + state_.current_offset_j +
                  transient + (burst ? p.burst_energy_j : 0.0) + noise;
  energy = std::max(energy, 0.0);

  Reading r;
  r.energy_j = energy;
  r.runtime_s = std::max(0.0, profile.runtime_s + rng_.uniform(-p.runtime_jitter_s, p.runtime_jitter_s));
  r.battery_pct = state_.battery_pct;
  r.voltage_mv = state_.voltage_mv;
  r.active_processes = rng_.uniform_int(p.base_processes_low, p.base_processes_high) +
                       (burst ? p.burst_process_jump : 0);
  if (burst) state_.memory_pct -= p.burst_memory_drop_pct;
  r.memory_pct = std::clamp(state_.memory_pct, 0.0, 100.0);
  const double background = burst ? p.burst_background_cpu_pct * rng_.uniform(0.75, 1.0)
                                  : rng_.uniform(p.cpu_background_low_pct, p.cpu_background_high_pct);
  r.cpu_pct = std::min(100.0, rng_.uniform(p.cpu_base_low_pct, p.cpu_base_high_pct) + background);

  // state after the run
  const double drawn_pct = energy / p.battery_capacity_j * 100.0;
  state_.battery_pct = std::max(0.0, state_.battery_pct - drawn_pct);
  const double nominal_drop = p.voltage.drop_mv_per_cycle * drawn_pct / p.voltage.cycle_pct;
  if (rng_.bernoulli(p.voltage.nonmonotone_prob)) {
    state_.voltage_mv += rng_.uniform(0.0, nominal_drop);
  } else {
    state_.voltage_mv -= nominal_drop * rng_.uniform(0.5, 1.5);
  }
  state_.memory_pct = std::clamp(state_.memory_pct + p.memory_growth_pct, 0.0, 100.0);
  ++state_.runs_since_setup;
  ++state_.global_run_index;
  return r;
}

Corpus simulate_corpus(const DeviceParams& params, const VariantId& variant, std::size_t blocks,
                       std::size_t readings, std::uint64_t seed, std::string platform_label) {
  if (blocks == 0 || readings == 0) throw ConfigError("corpus needs at least one block and one reading");
  SimulatedDevice device(params, seed);
  Corpus corpus;
  corpus.platform_label = std::move(platform_label);
  for (std::size_t b = 0; b < blocks; ++b) {
    device.setup();
    auto& block = corpus.reboots.emplace_back();
    for (std::size_t i = 0; i < readings; ++i) block.push_back(device.run(variant).energy_j);
  }
  return corpus;
}

}  // namespace r3v
