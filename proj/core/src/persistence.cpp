#include "r3val/persistence.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "r3val/corpus.hpp"
#include "r3val/error.hpp"
#include "r3val/schedule.hpp"

namespace r3v {

namespace {

std::string format_double(double v) { return fmt::format("{}", v); }

template <typename T>
std::string format_optional(const std::optional<T>& v) {
  return v ? fmt::format("{}", *v) : std::string();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

/// Header name -> column index, with an error naming any missing column.
class CsvHeader {
 public:
  CsvHeader(const std::string& line, const std::string& source) : source_(source) {
    const auto names = split_csv_line(line);
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (!index_.emplace(names[i], i).second) {
        throw ParseError(source, 1, fmt::format("duplicate column '{}'", names[i]));
      }
    }
    width_ = names.size();
  }

  std::size_t require(const std::string& name) const {
    const auto it = index_.find(name);
    if (it == index_.end()) throw ParseError(source_, 1, fmt::format("missing column '{}'", name));
    return it->second;
  }

  std::size_t width() const noexcept { return width_; }

 private:
  std::string source_;
  std::map<std::string, std::size_t> index_;
  std::size_t width_ = 0;
};

class FieldParser {
 public:
  FieldParser(const std::string& source, std::size_t line) : source_(source), line_(line) {}

  double real(const std::string& text, const char* column) const {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
      fail(text, column);
    }
    return v;
  }

  template <typename Int>
  Int integer(const std::string& text, const char* column) const {
    Int v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) fail(text, column);
    return v;
  }

  std::optional<double> optional_real(const std::string& text, const char* column) const {
    if (text.empty()) return std::nullopt;
    return real(text, column);
  }

  [[noreturn]] void fail(const std::string& text, const char* column) const {
    throw ParseError(source_, line_, fmt::format("bad value '{}' in column '{}'", text, column));
  }

 private:
  const std::string& source_;
  std::size_t line_;
};

}  // namespace

void write_samples_csv(std::ostream& out, const std::vector<MeasurementSample>& samples) {
  for (std::size_t i = 0; i < std::size(kSampleColumns); ++i) out << (i ? "," : "") << kSampleColumns[i];
  out << '\n';
  for (const auto& s : samples) {
    out << s.variant.name() << ',' << s.reboot_index << ',' << s.round_index << ',' << s.slot_index << ','
        << format_double(s.energy_j) << ',' << format_optional(s.runtime_s) << ','
        << format_optional(s.battery_pct) << ',' << format_optional(s.voltage_mv) << ','
        << format_optional(s.active_processes) << ',' << format_optional(s.memory_pct) << ','
        << format_optional(s.cpu_pct) << ',' << format_double(s.timestamp_s) << '\n';
  }
}

std::vector<MeasurementSample> read_samples_csv(std::istream& in, const std::string& source_name) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source_name, 1, "missing header line");
  strip_cr(line);
  const CsvHeader header(line, source_name);
  std::size_t col[std::size(kSampleColumns)];
  for (std::size_t i = 0; i < std::size(kSampleColumns); ++i) col[i] = header.require(kSampleColumns[i]);

  std::vector<MeasurementSample> samples;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.width()) {
      throw ParseError(source_name, line_no,
                       fmt::format("expected {} fields, found {}", header.width(), f.size()));
    }
    const FieldParser p(source_name, line_no);
    if (!is_valid_variant_name(f[col[0]])) p.fail(f[col[0]], "variant");
    MeasurementSample s{VariantId(f[col[0]]), 0.0, {}, 0, 0, 0, {}, {}, {}, {}, {}, 0.0};
    s.reboot_index = p.integer<std::size_t>(f[col[1]], "reboot_index");
    s.round_index = p.integer<std::size_t>(f[col[2]], "round_index");
    s.slot_index = p.integer<std::size_t>(f[col[3]], "slot_index");
    s.energy_j = p.real(f[col[4]], "energy_j");
    s.runtime_s = p.optional_real(f[col[5]], "runtime_s");
    s.battery_pct = p.optional_real(f[col[6]], "battery_pct");
    s.voltage_mv = p.optional_real(f[col[7]], "voltage_mv");
    if (!f[col[8]].empty()) s.active_processes = p.integer<std::int64_t>(f[col[8]], "active_processes");
    s.memory_pct = p.optional_real(f[col[9]], "memory_pct");
    s.cpu_pct = p.optional_real(f[col[10]], "cpu_pct");
    s.timestamp_s = p.real(f[col[11]], "timestamp_s");
    samples.push_back(std::move(s));
  }
  return samples;
}

// ---------------------------------------------------------------------------

void write_manifest(std::ostream& out, const Campaign& campaign) {
  const auto& schedule = campaign.schedule;
  nlohmann::ordered_json j;
  j["approach"] = std::string(to_string(schedule.approach()));
  j["samples"] = schedule.n_samples();
  j["pi"] = schedule.pi();
  auto& lines = j["schedule"] = nlohmann::ordered_json::array();
  for (const auto& action : schedule.actions()) {
    lines.push_back(action.is_setup() ? std::string("SETUP") : "RUN " + action.variant().name());
  }
  j["seed"] = campaign.seed ? nlohmann::ordered_json(*campaign.seed) : nlohmann::ordered_json(nullptr);
  j["backend"] = campaign.backend_descriptor;
  j["created_at"] = campaign.created_at;
  out << j.dump(2) << '\n';
}

namespace {

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

}  // namespace

Manifest read_manifest(std::istream& in, const std::string& source_name) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source_name, line_of_offset(text, e.byte), "malformed JSON");
  }
  auto field = [&](const char* key) -> const nlohmann::json& {
    if (!j.is_object() || !j.contains(key)) throw ParseError(source_name, 0, fmt::format("missing field '{}'", key));
    return j.at(key);
  };
  try {
    const Approach approach = parse_approach(field("approach").get<std::string>());
    const auto n_samples = field("samples").get<std::size_t>();
    const auto pi = field("pi").get<std::size_t>();
    std::vector<ScheduleAction> actions;
    for (const auto& line : field("schedule")) {
      const auto s = line.get<std::string>();
      if (s == "SETUP") {
        actions.push_back(ScheduleAction::setup());
      } else if (s.rfind("RUN ", 0) == 0 && is_valid_variant_name(s.substr(4))) {
        actions.push_back(ScheduleAction::run(VariantId(s.substr(4))));
      } else {
        throw ParseError(source_name, 0, fmt::format("bad schedule entry '{}'", s));
      }
    }
    Manifest m{Schedule(approach, std::move(actions), n_samples, pi), field("backend").get<std::string>(),
               std::nullopt, field("created_at").get<std::string>()};
    if (const auto& seed = field("seed"); !seed.is_null()) m.seed = seed.get<std::uint64_t>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source_name, 0, fmt::format("unexpected field type: {}", e.what()));
  } catch (const ConfigError& e) {
    throw ParseError(source_name, 0, e.what());
  }
}

void save_campaign(const std::string& dir, const Campaign& campaign) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    std::ofstream out(fs::path(dir) / kSamplesFileName);
    if (!out) throw Error(fmt::format("cannot write '{}'", (fs::path(dir) / kSamplesFileName).string()));
    write_samples_csv(out, campaign.samples);
  }
  std::ofstream out(fs::path(dir) / kManifestFileName);
  if (!out) throw Error(fmt::format("cannot write '{}'", (fs::path(dir) / kManifestFileName).string()));
  write_manifest(out, campaign);
}

Campaign load_campaign(const std::string& dir) {
  namespace fs = std::filesystem;
  const auto samples_path = (fs::path(dir) / kSamplesFileName).string();
  const auto manifest_path = (fs::path(dir) / kManifestFileName).string();
  std::ifstream manifest_in(manifest_path);
  if (!manifest_in) throw Error(fmt::format("cannot open '{}'", manifest_path));
  std::ifstream samples_in(samples_path);
  if (!samples_in) throw Error(fmt::format("cannot open '{}'", samples_path));
  Manifest m = read_manifest(manifest_in, manifest_path);
  Campaign c{std::move(m.schedule), read_samples_csv(samples_in, samples_path), std::move(m.backend_descriptor),
             m.seed, std::move(m.created_at)};
  check_campaign(c);
  return c;
}

// ---------------------------------------------------------------------------
// Corpus files

std::size_t Corpus::reading_count() const noexcept {
  std::size_t n = 0;
  for (const auto& b : reboots) n += b.size();
  return n;
}

void Corpus::validate() const {
  if (reboots.empty()) throw ConfigError(fmt::format("corpus '{}' has no reboot blocks", platform_label));
  for (std::size_t i = 0; i < reboots.size(); ++i) {
    if (reboots[i].empty()) throw ConfigError(fmt::format("corpus '{}' block {} is empty", platform_label, i));
  }
}

void write_corpora(std::ostream& out, const std::vector<Corpus>& corpora) {
  out << "platform,reboot_index,position,energy_j\n";
  for (const auto& c : corpora) {
    for (std::size_t b = 0; b < c.reboots.size(); ++b) {
      for (std::size_t p = 0; p < c.reboots[b].size(); ++p) {
        out << c.platform_label << ',' << b << ',' << p << ',' << format_double(c.reboots[b][p]) << '\n';
      }
    }
  }
}

std::vector<Corpus> read_corpora(std::istream& in, const std::string& source_name) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source_name, 1, "missing header line");
  strip_cr(line);
  const CsvHeader header(line, source_name);
  const std::size_t c_platform = header.require("platform");
  const std::size_t c_reboot = header.require("reboot_index");
  const std::size_t c_position = header.require("position");
  const std::size_t c_energy = header.require("energy_j");

  std::vector<Corpus> corpora;
  std::map<std::string, std::size_t> by_label;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.width()) {
      throw ParseError(source_name, line_no,
                       fmt::format("expected {} fields, found {}", header.width(), f.size()));
    }
    const FieldParser p(source_name, line_no);
    const std::string& label = f[c_platform];
    if (label.empty()) p.fail(label, "platform");
    const auto reboot = p.integer<std::size_t>(f[c_reboot], "reboot_index");
    const auto position = p.integer<std::size_t>(f[c_position], "position");
    const double energy = p.real(f[c_energy], "energy_j");
    if (energy < 0.0) p.fail(f[c_energy], "energy_j");

    auto [it, inserted] = by_label.emplace(label, corpora.size());
    if (inserted) corpora.push_back(Corpus{label, {}});
    auto& blocks = corpora[it->second].reboots;
    if (reboot == blocks.size()) blocks.emplace_back();
    if (reboot + 1 != blocks.size() || position != blocks.back().size()) {
      throw ParseError(source_name, line_no,
                       fmt::format("expected reboot {} position {} or reboot {} position 0 for platform '{}'",
                                   blocks.empty() ? 0 : blocks.size() - 1, blocks.empty() ? 0 : blocks.back().size(),
                                   blocks.size(), label));
    }
    blocks.back().push_back(energy);
  }
  if (corpora.empty()) throw ParseError(source_name, 0, "corpus file holds no readings");
  return corpora;
}

void save_corpora(const std::string& path, const std::vector<Corpus>& corpora) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write '{}'", path));
  write_corpora(out, corpora);
}

std::vector<Corpus> load_corpora(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open '{}'", path));
  return read_corpora(in, path);
}

}  // namespace r3v
