#include "r3val/backend.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <charconv>
#include <cstring>

#include <fmt/format.h>

#include "r3val/error.hpp"

namespace r3v {

SimulatorBackend::SimulatorBackend(DeviceParams params, std::uint64_t seed)
    : device_(std::move(params), seed) {}

void SimulatorBackend::setup() {
  device_.setup();
  set_up_ = true;
}

Reading SimulatorBackend::run(const VariantId& variant) {
  if (!set_up_) throw BackendError(BackendFailure::kNotSetUp, "run requested before the first setup");
  return device_.run(variant);
}

std::string SimulatorBackend::descriptor() const {
  return fmt::format("simulator seed={}", device_.seed());
}

std::optional<double> SimulatorBackend::battery_pct() const {
  if (!set_up_) return std::nullopt;
  return device_.state().battery_pct;
}

// ---------------------------------------------------------------------------

ReplayBackend::ReplayBackend(Corpus corpus) : corpus_(std::move(corpus)) { corpus_.validate(); }

void ReplayBackend::setup() {
  const std::size_t next = block_ ? *block_ + 1 : 0;
  if (next >= corpus_.reboots.size()) {
    throw BackendError(BackendFailure::kExhausted,
                       fmt::format("corpus '{}' has only {} reboot blocks", corpus_.platform_label,
                                   corpus_.reboots.size()));
  }
  block_ = next;
  position_ = 0;
}

Reading ReplayBackend::run(const VariantId&) {
  if (!block_) throw BackendError(BackendFailure::kNotSetUp, "run requested before the first setup");
  const auto& block = corpus_.reboots[*block_];
  if (position_ >= block.size()) {
    throw BackendError(BackendFailure::kExhausted,
                       fmt::format("reboot block {} of corpus '{}' has only {} readings", *block_,
                                   corpus_.platform_label, block.size()));
  }
  Reading r;
  r.energy_j = block[position_++];
  return r;
}

std::string ReplayBackend::descriptor() const {
  return fmt::format("replay platform={}", corpus_.platform_label);
}

void check_replay_compatible(const Corpus& corpus, const Schedule& schedule) {
  std::vector<std::size_t> segments;
  for (const auto& action : schedule.actions()) {
    if (action.is_setup()) {
      segments.push_back(0);
    } else {
      ++segments.back();
    }
  }
  if (segments.size() > corpus.reboots.size()) {
    throw StructureMismatch(fmt::format("schedule needs {} reboot blocks, corpus '{}' has {}",
                                        segments.size(), corpus.platform_label, corpus.reboots.size()));
  }
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (segments[i] > corpus.reboots[i].size()) {
      throw StructureMismatch(fmt::format("schedule needs {} readings in reboot block {}, corpus '{}' has {}",
                                          segments[i], i, corpus.platform_label, corpus.reboots[i].size()));
    }
  }
}

// ---------------------------------------------------------------------------

namespace {

constexpr const char* kFloatRegex = R"(([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?))";

std::string expand_pattern(const std::string& pattern) {
  std::string out;
  const std::string token = "(float)";
  std::size_t pos = 0;
  for (;;) {
    const auto hit = pattern.find(token, pos);
    if (hit == std::string::npos) break;
    out += pattern.substr(pos, hit - pos);
    out += kFloatRegex;
    pos = hit + token.size();
  }
  out += pattern.substr(pos);
  return out;
}

std::string substitute_variant(const std::string& tmpl, const std::string& variant) {
  std::string out;
  const std::string token = "{variant}";
  std::size_t pos = 0;
  for (;;) {
    const auto hit = tmpl.find(token, pos);
    if (hit == std::string::npos) break;
    out += tmpl.substr(pos, hit - pos);
    out += variant;
    pos = hit + token.size();
  }
  out += tmpl.substr(pos);
  return out;
}

std::string tail(const std::string& text, std::size_t max = 2000) {
  return text.size() <= max ? text : "..." + text.substr(text.size() - max);
}

void check_status(const CommandOutput& result, const std::string& command) {
  if (result.exit_status != 0) {
    throw BackendError(BackendFailure::kExitStatus,
                       fmt::format("command '{}' exited with status {}; output:\n{}", command,
                                   result.exit_status, tail(result.output)));
  }
}

}  // namespace

CommandOutput run_shell_command(const std::string& command, std::chrono::milliseconds timeout) {
  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) {
    throw BackendError(BackendFailure::kSpawn, fmt::format("pipe failed: {}", std::strerror(errno)));
  }
  const auto start = std::chrono::steady_clock::now();
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    throw BackendError(BackendFailure::kSpawn, fmt::format("fork failed: {}", std::strerror(errno)));
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(fds[1], STDOUT_FILENO);
    ::dup2(fds[1], STDERR_FILENO);
    const int devnull = ::open("/dev/null", O_RDONLY);
    if (devnull >= 0) ::dup2(devnull, STDIN_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(fds[1]);

  CommandOutput result;
  bool timed_out = false;
  char buffer[4096];
  for (;;) {
    const auto elapsed = std::chrono::steady_clock::now() - start;
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(timeout - elapsed);
    if (left.count() <= 0) {
      timed_out = true;
      break;
    }
    pollfd pfd{fds[0], POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(left.count(), 1'000'000)));
    if (ready < 0 && errno == EINTR) continue;
    if (ready == 0) continue;
    const ssize_t got = ::read(fds[0], buffer, sizeof buffer);
    if (got < 0 && errno == EINTR) continue;
    if (got <= 0) break;
    result.output.append(buffer, static_cast<std::size_t>(got));
  }
  ::close(fds[0]);
  if (timed_out) ::kill(-pid, SIGKILL);

  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  result.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (timed_out) {
    throw BackendError(BackendFailure::kTimeout,
                       fmt::format("command '{}' timed out after {} ms", command, timeout.count()));
  }
  if (WIFEXITED(status)) {
    result.exit_status = WEXITSTATUS(status);
    if (result.exit_status == 127 && result.output.find("not found") != std::string::npos) {
      throw BackendError(BackendFailure::kSpawn,
                         fmt::format("command '{}' could not be started: {}", command, tail(result.output)));
    }
  } else if (WIFSIGNALED(status)) {
    result.exit_status = 128 + WTERMSIG(status);
  }
  return result;
}

ExternalCommandBackend::ExternalCommandBackend(ExternalCommandConfig config) : config_(std::move(config)) {
  if (config_.setup_command.empty()) throw ConfigError("setup command must not be empty");
  if (config_.run_command.empty()) throw ConfigError("run command must not be empty");
  if (config_.parse_pattern.empty()) throw ConfigError("parse pattern must not be empty");
  if (config_.timeout.count() <= 0) throw ConfigError("timeout must be positive");
  try {
    pattern_ = std::regex(expand_pattern(config_.parse_pattern), std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    throw ConfigError(fmt::format("invalid parse pattern '{}': {}", config_.parse_pattern, e.what()));
  }
  if (pattern_.mark_count() < 1) {
    throw ConfigError(fmt::format("parse pattern '{}' needs a capture group or (float)", config_.parse_pattern));
  }
}

void ExternalCommandBackend::setup() {
  check_status(run_shell_command(config_.setup_command, config_.timeout), config_.setup_command);
  set_up_ = true;
}

Reading ExternalCommandBackend::run(const VariantId& variant) {
  if (!set_up_) throw BackendError(BackendFailure::kNotSetUp, "run requested before the first setup");
  const std::string command = substitute_variant(config_.run_command, variant.name());
  const auto result = run_shell_command(command, config_.timeout);
  check_status(result, command);

  std::smatch match;
  if (!std::regex_search(result.output, match, pattern_)) {
    throw BackendError(BackendFailure::kParse,
                       fmt::format("pattern '{}' not found in output of '{}':\n{}", config_.parse_pattern,
                                   command, tail(result.output)));
  }
  const std::string text = match[1].str();
  double energy = 0.0;
  const char* first = text.data();
  if (!text.empty() && text.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), energy);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(energy) || energy < 0.0) {
    throw BackendError(BackendFailure::kParse,
                       fmt::format("pattern '{}' captured '{}', not a non-negative energy", config_.parse_pattern,
                                   text));
  }
  Reading r;
  r.energy_j = energy;
  r.runtime_s = result.elapsed_s;
  return r;
}

std::string ExternalCommandBackend::descriptor() const {
  return fmt::format("exec run='{}' pattern='{}'", config_.run_command, config_.parse_pattern);
}

}  // namespace r3v
