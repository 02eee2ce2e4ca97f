#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <regex>
#include <string>

#include "r3val/corpus.hpp"
#include "r3val/model.hpp"
#include "r3val/simulator.hpp"

namespace r3v {

/// Something that can reset a device and measure one run of a variant.
/// `run` may only be called after at least one `setup`.
class MeasurementBackend {
 public:
  virtual ~MeasurementBackend() = default;

  virtual void setup() = 0;
  virtual Reading run(const VariantId& variant) = 0;
  virtual std::string descriptor() const = 0;

  /// Current charge level when the backend can observe it.
  virtual std::optional<double> battery_pct() const { return std::nullopt; }
};

class SimulatorBackend final : public MeasurementBackend {
 public:
  SimulatorBackend(DeviceParams params, std::uint64_t seed);

  void setup() override;
  Reading run(const VariantId& variant) override;
  std::string descriptor() const override;
  std::optional<double> battery_pct() const override;

  const SimulatedDevice& device() const noexcept { return device_; }

 private:
  SimulatedDevice device_;
  bool set_up_ = false;
};

/// Plays back a single-variant corpus: each setup opens the next block and each
/// run returns the next reading of that block, whatever variant is asked for.
class ReplayBackend final : public MeasurementBackend {
 public:
  explicit ReplayBackend(Corpus corpus);

  void setup() override;
  Reading run(const VariantId& variant) override;
  std::string descriptor() const override;

  const Corpus& corpus() const noexcept { return corpus_; }

 private:
  Corpus corpus_;
  std::optional<std::size_t> block_;
  std::size_t position_ = 0;
};

/// Throws StructureMismatch when replaying `corpus` under `schedule` would run
/// out of blocks or out of readings inside a block.
void check_replay_compatible(const Corpus& corpus, const Schedule& schedule);

struct ExternalCommandConfig {
  /// Shell command run on every setup.
  std::string setup_command;
  /// Shell command run per measurement; every "{variant}" is replaced by the name.
  std::string run_command;
  /// Regular expression applied to the combined output. The token "(float)"
  /// stands for a decimal number; otherwise the first capture group is used.
  std::string parse_pattern = "energy_j=(float)";
  std::chrono::milliseconds timeout{60'000};
};

/// Drives a real meter through shell commands (/bin/sh -c).
///
/// Failures raise BackendError with kind kSpawn, kTimeout, kExitStatus or kParse.
/// The reading's runtime is the wall-clock duration of the run command.
class ExternalCommandBackend final : public MeasurementBackend {
 public:
  explicit ExternalCommandBackend(ExternalCommandConfig config);

  void setup() override;
  Reading run(const VariantId& variant) override;
  std::string descriptor() const override;

  const ExternalCommandConfig& config() const noexcept { return config_; }

 private:
  ExternalCommandConfig config_;
  std::regex pattern_;
  bool set_up_ = false;
};

struct CommandOutput {
  int exit_status = 0;  // exit code, or 128 + signal number
  std::string output;   // stdout and stderr interleaved
  double elapsed_s = 0.0;
};

/// Runs `command` through /bin/sh -c, killing it after `timeout`.
/// Throws BackendError(kSpawn) or BackendError(kTimeout).
CommandOutput run_shell_command(const std::string& command, std::chrono::milliseconds timeout);

}  // namespace r3v
