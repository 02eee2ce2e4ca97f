#include "r3val/schedule.hpp"

#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "r3val/error.hpp"

namespace r3v {

void ScheduleConfig::validate(Approach approach) const {
  if (variants.empty()) throw ConfigError("variant list is empty");
  std::set<VariantId> unique(variants.begin(), variants.end());
  if (unique.size() != variants.size()) throw ConfigError("variant list contains duplicates");
  if (n_samples == 0) throw ConfigError("n_samples must be at least 1");
  if (pi == 0) throw ConfigError("pi must be at least 1");
  if (approach == Approach::kR3 && n_samples != pi * variants.size()) {
    throw ConfigError(fmt::format(
        "R3 needs n_samples = pi x variants ({} x {} = {}), got {}: one rotation per reboot",
        pi, variants.size(), pi * variants.size(), n_samples));
  }
}

Schedule generate_schedule(const ScheduleConfig& config, Approach approach) {
  config.validate(approach);
  const auto& vs = config.variants;
  const std::size_t n = config.n_samples;
  std::vector<ScheduleAction> actions;
  actions.reserve(vs.size() * n + n + 1);

  auto round = [&](const std::vector<VariantId>& order) {
    for (const auto& v : order) actions.push_back(ScheduleAction::run(v));
  };

  switch (approach) {
    case Approach::kA1:
      actions.push_back(ScheduleAction::setup());
      for (const auto& v : vs)
        for (std::size_t i = 0; i < n; ++i) actions.push_back(ScheduleAction::run(v));
      break;
    case Approach::kA2:
      for (const auto& v : vs) {
        actions.push_back(ScheduleAction::setup());
        for (std::size_t i = 0; i < n; ++i) actions.push_back(ScheduleAction::run(v));
      }
      break;
    case Approach::kA3:
      for (std::size_t i = 0; i < n; ++i) {
        actions.push_back(ScheduleAction::setup());
        round(vs);
      }
      break;
    case Approach::kA4:
      actions.push_back(ScheduleAction::setup());
      for (std::size_t i = 0; i < n; ++i) round(vs);
      break;
    case Approach::kR3:
      for (std::size_t r = 0; r < vs.size(); ++r) {
        actions.push_back(ScheduleAction::setup());
        const auto order = rotate_left(vs, r);
        for (std::size_t p = 0; p < config.pi; ++p) round(order);
      }
      break;
  }
  const std::size_t pi = approach == Approach::kR3 ? config.pi : 1;
  return Schedule(approach, std::move(actions), n, pi);
}

ScheduleSummary schedule_summary(const Schedule& schedule) {
  ScheduleSummary summary;
  const auto positions = slot_positions(schedule);
  std::size_t run = 0;
  for (const auto& action : schedule.actions()) {
    if (action.is_setup()) {
      ++summary.setup_count;
      summary.rounds_per_setup.push_back(0);
      continue;
    }
    ++summary.runs_per_variant[action.variant()];
    auto& rounds = summary.rounds_per_setup.back();
    rounds = std::max(rounds, positions[run].round_index + 1);
    ++run;
  }
  return summary;
}

std::string compact_string(const Schedule& schedule) {
  std::string out;
  bool in_segment = false;
  std::size_t since_setup = 0;
  const std::size_t width = schedule.approach() == Approach::kA1 || schedule.approach() == Approach::kA2
                                ? schedule.n_samples()
                                : schedule.variants().size();
  for (const auto& action : schedule.actions()) {
    if (action.is_setup()) {
      if (!out.empty()) out += ',';
      out += "setup";
      in_segment = false;
      since_setup = 0;
      continue;
    }
    if (!in_segment || since_setup % width == 0) out += ',';
    in_segment = true;
    out += action.variant().name();
    ++since_setup;
  }
  return out;
}

void write_schedule(std::ostream& out, const Schedule& schedule) {
  out << "# r3val schedule\n";
  out << "# approach " << to_string(schedule.approach()) << '\n';
  out << "# samples " << schedule.n_samples() << '\n';
  out << "# pi " << schedule.pi() << '\n';
  for (const auto& action : schedule.actions()) {
    if (action.is_setup()) {
      out << "SETUP\n";
    } else {
      out << "RUN " << action.variant().name() << '\n';
    }
  }
}

std::string schedule_to_text(const Schedule& schedule) {
  std::ostringstream out;
  write_schedule(out, schedule);
  return out.str();
}

namespace {

std::size_t parse_count(const std::string& text, const std::string& source, std::size_t line) {
  std::size_t pos = 0;
  unsigned long long value = 0;
  try {
    value = std::stoull(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != text.size()) {
    throw ParseError(source, line, fmt::format("expected a count, got '{}'", text));
  }
  return static_cast<std::size_t>(value);
}

// Header-less files: pick the approach whose generator reproduces the actions.
std::optional<Schedule> infer_schedule(const std::vector<ScheduleAction>& actions) {
  std::vector<VariantId> order;
  std::size_t runs = 0;
  std::set<VariantId> seen;
  for (const auto& a : actions) {
    if (!a.is_run()) continue;
    ++runs;
    if (seen.insert(a.variant()).second) order.push_back(a.variant());
  }
  if (order.empty() || runs % order.size() != 0) return std::nullopt;
  const std::size_t n = runs / order.size();
  for (Approach approach : kAllApproaches) {
    ScheduleConfig config{order, n, 1, 20.0};
    if (approach == Approach::kR3) {
      if (n % order.size() != 0) continue;
      config.pi = n / order.size();
    }
    try {
      auto candidate = generate_schedule(config, approach);
      if (candidate.actions() == actions) return candidate;
    } catch (const ConfigError&) {
    }
  }
  return std::nullopt;
}

}  // namespace

Schedule read_schedule(std::istream& in, const std::string& source_name) {
  std::optional<Approach> approach;
  std::optional<std::size_t> samples;
  std::optional<std::size_t> pi;
  std::vector<ScheduleAction> actions;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string head;
    fields >> head;
    if (head.empty()) continue;
    if (head[0] == '#') {
      std::string key, value;
      if (head == "#") {
        fields >> key >> value;
      } else {
        key = head.substr(1);
        fields >> value;
      }
      if (key == "approach") {
        try {
          approach = parse_approach(value);
        } catch (const ConfigError& e) {
          throw ParseError(source_name, line_no, e.what());
        }
      } else if (key == "samples") {
        samples = parse_count(value, source_name, line_no);
      } else if (key == "pi") {
        pi = parse_count(value, source_name, line_no);
      }
      continue;
    }
    std::string extra;
    if (head == "SETUP") {
      if (fields >> extra) throw ParseError(source_name, line_no, "SETUP takes no argument");
      actions.push_back(ScheduleAction::setup());
    } else if (head == "RUN") {
      std::string name;
      if (!(fields >> name)) throw ParseError(source_name, line_no, "RUN needs a variant name");
      if (fields >> extra) throw ParseError(source_name, line_no, "RUN takes one variant name");
      try {
        actions.push_back(ScheduleAction::run(VariantId(name)));
      } catch (const ConfigError& e) {
        throw ParseError(source_name, line_no, e.what());
      }
    } else {
      throw ParseError(source_name, line_no,
                       fmt::format("expected SETUP or RUN <variant>, got '{}'", head));
    }
  }
  if (actions.empty()) throw ParseError(source_name, 0, "schedule has no actions");

  if (!approach || !samples) {
    auto inferred = infer_schedule(actions);
    if (!inferred) {
      throw ParseError(source_name, 0,
                       "schedule header missing and actions match no known approach");
    }
    return *inferred;
  }
  try {
    return Schedule(*approach, std::move(actions), *samples, pi.value_or(1));
  } catch (const ConfigError& e) {
    throw ParseError(source_name, 0, e.what());
  }
}

Schedule schedule_from_text(const std::string& text) {
  std::istringstream in(text);
  return read_schedule(in);
}

void save_schedule(const std::string& path, const Schedule& schedule) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot open '{}' for writing", path));
  write_schedule(out, schedule);
  if (!out) throw Error(fmt::format("failed writing '{}'", path));
}

Schedule load_schedule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open '{}'", path));
  return read_schedule(in, path);
}

}  // namespace r3v
