// r3val: schedule, run and evaluate energy measurement campaigns.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "r3val/backend.hpp"
#include "r3val/error.hpp"
#include "r3val/evaluation.hpp"
#include "r3val/persistence.hpp"
#include "r3val/replicate.hpp"
#include "r3val/report.hpp"
#include "r3val/runner.hpp"
#include "r3val/schedule.hpp"
#include "r3val/simulator.hpp"
#include "r3val/spectral.hpp"

namespace fs = std::filesystem;
using namespace r3v;

namespace {

constexpr int kExitError = 1;
constexpr int kExitCampaignFailed = 2;

struct ScheduleOptions {
  std::string approach;
  std::string variants;
  std::size_t samples = 33;
  std::size_t pi = 3;
  std::string out;
};

struct RunOptions {
  std::string schedule;
  std::string backend = "sim";
  std::string params;
  std::string corpus;
  std::string platform;
  std::string setup_cmd;
  std::string run_cmd;
  std::string pattern = "energy_j=(float)";
  double timeout_s = 60.0;
  std::optional<std::uint64_t> seed;
  double battery_floor = 20.0;
  std::string out;
};

struct SpectrumOptions {
  std::string campaign;
  std::string variant;
  std::string out;
  std::string window = "none";
  double spacing_s = 0.0;
  std::size_t top = 5;
};

struct SpecificityOptions {
  std::string corpus;
  std::string approaches = "a1,a2,a3,a4,r3";
  double alpha = kDefaultAlpha;
  std::string mapping = "phase";
  std::string out;
};

struct SensitivityOptions {
  std::vector<std::string> campaigns;
  std::string baseline = "original";
  double alpha = kDefaultAlpha;
  std::string out;
};

struct ReplicateOptions {
  std::optional<std::uint64_t> seed;
  std::string params;
  std::string out_dir;
};

struct CorpusOptions {
  std::string params;
  std::string variant = "original";
  std::size_t platforms = 7;
  std::size_t blocks = 7;
  std::size_t readings = 7;
  std::optional<std::uint64_t> seed;
  std::string out;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  return flag ? *flag : seed_from_env(kDefaultSeed);
}

DeviceParams params_from(const std::string& path) {
  return path.empty() ? DeviceParams::defaults() : load_device_params(path);
}

void ensure_parent(const std::string& path) {
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

std::vector<Approach> parse_approaches(const std::string& csv) {
  std::vector<Approach> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const auto comma = csv.find(',', start);
    const auto item = csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const Approach a = parse_approach(item);
    if (std::find(out.begin(), out.end(), a) != out.end()) {
      throw ConfigError(fmt::format("approach '{}' listed twice", item));
    }
    out.push_back(a);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------

int cmd_schedule(const ScheduleOptions& o) {
  ScheduleConfig config{parse_variant_list(o.variants), o.samples, o.pi};
  const Schedule schedule = generate_schedule(config, parse_approach(o.approach));
  if (o.out.empty()) {
    write_schedule(std::cout, schedule);
  } else {
    ensure_parent(o.out);
    save_schedule(o.out, schedule);
  }
  const auto summary = schedule_summary(schedule);
  std::cerr << fmt::format("{}: {} setups, {} runs, {} per variant\n", to_string(schedule.approach()),
                           summary.setup_count, schedule.run_count(), schedule.n_samples());
  return 0;
}

int cmd_run(const RunOptions& o) {
  const Schedule schedule = load_schedule(o.schedule);
  const std::uint64_t seed = resolve_seed(o.seed);
  std::unique_ptr<MeasurementBackend> backend;
  std::optional<std::uint64_t> recorded_seed;
  if (o.backend == "sim") {
    backend = std::make_unique<SimulatorBackend>(params_from(o.params), seed);
    recorded_seed = seed;
  } else if (o.backend == "replay") {
    if (o.corpus.empty()) throw ConfigError("--corpus is required for the replay backend");
    auto corpora = load_corpora(o.corpus);
    auto it = corpora.begin();
    if (!o.platform.empty()) {
      it = std::find_if(corpora.begin(), corpora.end(), [&](const Corpus& c) { return c.platform_label == o.platform; });
      if (it == corpora.end()) throw ConfigError(fmt::format("platform '{}' not found in '{}'", o.platform, o.corpus));
    } else if (corpora.size() > 1) {
      throw ConfigError(fmt::format("'{}' holds {} platforms; choose one with --platform", o.corpus, corpora.size()));
    }
    check_replay_compatible(*it, schedule);
    backend = std::make_unique<ReplayBackend>(std::move(*it));
  } else if (o.backend == "exec") {
    ExternalCommandConfig config;
    config.setup_command = o.setup_cmd;
    config.run_command = o.run_cmd;
    config.parse_pattern = o.pattern;
    config.timeout = std::chrono::milliseconds(static_cast<long long>(o.timeout_s * 1000.0));
    backend = std::make_unique<ExternalCommandBackend>(std::move(config));
  } else {
    throw ConfigError(fmt::format("unknown backend '{}'; expected sim, replay or exec", o.backend));
  }

  const auto result = execute_campaign(schedule, *backend, o.battery_floor, recorded_seed);
  save_campaign(o.out, result.campaign);
  if (!result.ok()) {
    std::cerr << fmt::format("error: campaign stopped after {} of {} runs: {}\n", result.campaign.samples.size(),
                             schedule.run_count(), result.failure->message);
    return kExitCampaignFailed;
  }
  std::cerr << fmt::format("{} samples written to {}\n", result.campaign.samples.size(), o.out);
  return 0;
}

int cmd_spectrum(const SpectrumOptions& o) {
  const Campaign campaign = load_campaign(o.campaign);
  const auto series = energies_of(campaign, VariantId(o.variant));
  std::optional<double> spacing;
  if (o.spacing_s > 0.0) {
    spacing = o.spacing_s;
  } else {
    double total = 0.0;
    std::size_t n = 0;
    for (const auto& s : samples_of(campaign, VariantId(o.variant))) {
      if (s.runtime_s) {
        total += *s.runtime_s;
        ++n;
      }
    }
    if (n > 0) spacing = total / static_cast<double>(n);
  }
  const auto window = o.window == "hann"   ? spectral::Window::kHann
                      : o.window == "none" ? spectral::Window::kNone
                                           : throw ConfigError(fmt::format("unknown window '{}'", o.window));
  const auto spectrum = spectral::periodogram(series, spacing, window);
  ensure_parent(o.out);
  spectral::save_spectrum_csv(o.out, spectrum);
  for (const auto& d : spectral::dominant_periods(spectrum, o.top)) {
    std::cerr << fmt::format("period {:.2f} samples{}: {:.1f}% of power\n", d.period_samples,
                             d.period_seconds ? fmt::format(" ({:.1f} min)", *d.period_seconds / 60.0) : "",
                             100.0 * d.power_share);
  }
  return 0;
}

int cmd_specificity(const SpecificityOptions& o) {
  const auto corpora = load_corpora(o.corpus);
  const auto approaches = parse_approaches(o.approaches);
  SingleChargeMapping mapping;
  if (o.mapping == "phase") {
    mapping = SingleChargeMapping::kPhaseAligned;
  } else if (o.mapping == "linear") {
    mapping = SingleChargeMapping::kLinear;
  } else {
    throw ConfigError(fmt::format("unknown mapping '{}'; expected phase or linear", o.mapping));
  }
  ReportInputs report;
  report.title = "Specificity report";
  report.alpha = o.alpha;
  for (const Approach approach : approaches) {
    std::vector<SpecificityMatrix> matrices;
    for (const auto& corpus : corpora) {
      const std::size_t blocks = corpus.reboots.size();
      const std::size_t readings = corpus.reboots.front().size();
      matrices.push_back(specificity_matrix(group_corpus(corpus, approach, blocks, readings, mapping), o.alpha));
    }
    const auto counts = aggregate_specificity(matrices);
    std::cerr << fmt::format("{}: {} false positives over {} corpora\n", to_string(approach), counts.total(),
                             corpora.size());
    report.specificity.push_back({approach, counts, corpora.size()});
  }
  render_report(report, o.out);
  return 0;
}

int cmd_sensitivity(const SensitivityOptions& o) {
  std::map<Approach, Campaign> campaigns;
  for (const auto& dir : o.campaigns) {
    Campaign c = load_campaign(dir);
    const Approach a = c.schedule.approach();
    if (!campaigns.emplace(a, std::move(c)).second) {
      throw ConfigError(fmt::format("two campaigns use approach {}", to_string(a)));
    }
  }
  ReportInputs report;
  report.title = "Sensitivity report";
  report.alpha = o.alpha;
  report.sensitivity = sensitivity_table(campaigns, VariantId(o.baseline), o.alpha);
  for (const auto& row : report.sensitivity) {
    std::cerr << fmt::format("{}: median A12 {:.3f}, {} with A12 >= 0.64, {} with p <= {}\n", to_string(row.approach),
                             row.median_es, row.count_es_ge_064, row.count_p_le_alpha, o.alpha);
  }
  render_report(report, o.out);
  return 0;
}

int cmd_replicate(const ReplicateOptions& o) {
  ReplicationConfig config;
  config.seed = resolve_seed(o.seed);
  config.params = params_from(o.params);
  const auto result = run_replication(config);
  const auto files = render_report(result.report, o.out_dir);
  std::cerr << fmt::format("seed {}: wrote {} files to {}\n", config.seed, files.size(), o.out_dir);
  return 0;
}

int cmd_simulate_corpus(const CorpusOptions& o) {
  const auto corpora = simulate_platforms(params_from(o.params), VariantId(o.variant), o.platforms, o.blocks,
                                          o.readings, resolve_seed(o.seed));
  ensure_parent(o.out);
  save_corpora(o.out, corpora);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schedule, run and evaluate energy measurement campaigns"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "r3val 0.1.0");

  ScheduleOptions sched;
  auto* c_sched = app.add_subcommand("schedule", "Generate a measurement schedule");
  c_sched->add_option("--approach", sched.approach, "a1, a2, a3, a4 or r3")->required();
  c_sched->add_option("--variants", sched.variants, "Comma-separated variant names")->required();
  c_sched->add_option("--samples", sched.samples, "Samples per variant")->capture_default_str();
  c_sched->add_option("--pi", sched.pi, "Rounds per discharge cycle (r3)")->capture_default_str();
  c_sched->add_option("--out", sched.out, "Schedule file; stdout when omitted");

  RunOptions run;
  auto* c_run = app.add_subcommand("run", "Execute a schedule against a backend");
  c_run->add_option("--schedule", run.schedule, "Schedule file")->required()->check(CLI::ExistingFile);
  c_run->add_option("--backend", run.backend, "sim, replay or exec")->capture_default_str();
  c_run->add_option("--params", run.params, "Device parameter file (sim)")->check(CLI::ExistingFile);
  c_run->add_option("--corpus", run.corpus, "Corpus CSV (replay)")->check(CLI::ExistingFile);
  c_run->add_option("--platform", run.platform, "Platform label inside the corpus (replay)");
  c_run->add_option("--setup-cmd", run.setup_cmd, "Shell command run at each setup (exec)");
  c_run->add_option("--run-cmd", run.run_cmd, "Shell command per run; {variant} is substituted (exec)");
  c_run->add_option("--pattern", run.pattern, "Regex locating the energy; (float) matches a number (exec)")
      ->capture_default_str();
  c_run->add_option("--timeout", run.timeout_s, "Per-command timeout in seconds (exec)")->capture_default_str();
  c_run->add_option("--seed", run.seed, "Simulator seed");
  c_run->add_option("--battery-floor", run.battery_floor, "Stop before a run below this charge (%)")
      ->capture_default_str();
  c_run->add_option("--out", run.out, "Campaign directory")->required();

  SpectrumOptions spec;
  auto* c_spec = app.add_subcommand("spectrum", "Periodogram of one variant's energy series");
  c_spec->add_option("--campaign", spec.campaign, "Campaign directory")->required()->check(CLI::ExistingDirectory);
  c_spec->add_option("--variant", spec.variant, "Variant to analyse")->required();
  c_spec->add_option("--out", spec.out, "Spectrum CSV")->required();
  c_spec->add_option("--window", spec.window, "none or hann")->capture_default_str();
  c_spec->add_option("--spacing", spec.spacing_s, "Seconds per sample; default is the mean runtime");
  c_spec->add_option("--top", spec.top, "Dominant periods to print")->capture_default_str();

  SpecificityOptions specificity;
  auto* c_specificity = app.add_subcommand("specificity", "False-positive matrices over a single-variant corpus");
  c_specificity->add_option("--corpus", specificity.corpus, "Corpus CSV")->required()->check(CLI::ExistingFile);
  c_specificity->add_option("--approaches", specificity.approaches, "Comma-separated approaches")
      ->capture_default_str();
  c_specificity->add_option("--alpha", specificity.alpha, "Significance level")->capture_default_str();
  c_specificity->add_option("--mapping", specificity.mapping, "Single-charge slot mapping: phase or linear")
      ->capture_default_str();
  c_specificity->add_option("--out", specificity.out, "Report directory")->required();

  SensitivityOptions sensitivity;
  auto* c_sensitivity = app.add_subcommand("sensitivity", "Effect sizes and tests against a baseline variant");
  c_sensitivity->add_option("--campaigns", sensitivity.campaigns, "Campaign directories, one per approach")
      ->required()
      ->delimiter(',')
      ->check(CLI::ExistingDirectory);
  c_sensitivity->add_option("--baseline", sensitivity.baseline, "Baseline variant")->capture_default_str();
  c_sensitivity->add_option("--alpha", sensitivity.alpha, "Significance level")->capture_default_str();
  c_sensitivity->add_option("--out", sensitivity.out, "Report directory")->required();

  ReplicateOptions repl;
  auto* c_repl = app.add_subcommand("replicate", "End-to-end replication on the simulator");
  c_repl->add_option("--seed", repl.seed, "Master seed (default: R3VAL_SEED or 1)");
  c_repl->add_option("--params", repl.params, "Device parameter file")->check(CLI::ExistingFile);
  c_repl->add_option("--out-dir", repl.out_dir, "Report directory")->required();

  CorpusOptions corpus;
  auto* c_corpus = app.add_subcommand("simulate-corpus", "Simulate single-variant corpora for specificity");
  c_corpus->add_option("--params", corpus.params, "Device parameter file")->check(CLI::ExistingFile);
  c_corpus->add_option("--variant", corpus.variant, "Variant measured")->capture_default_str();
  c_corpus->add_option("--platforms", corpus.platforms, "Number of simulated platforms")->capture_default_str();
  c_corpus->add_option("--blocks", corpus.blocks, "Reboot blocks per platform")->capture_default_str();
  c_corpus->add_option("--readings", corpus.readings, "Readings per block")->capture_default_str();
  c_corpus->add_option("--seed", corpus.seed, "Master seed");
  c_corpus->add_option("--out", corpus.out, "Corpus CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_sched->parsed()) return cmd_schedule(sched);
    if (c_run->parsed()) return cmd_run(run);
    if (c_spec->parsed()) return cmd_spectrum(spec);
    if (c_specificity->parsed()) return cmd_specificity(specificity);
    if (c_sensitivity->parsed()) return cmd_sensitivity(sensitivity);
    if (c_repl->parsed()) return cmd_replicate(repl);
    if (c_corpus->parsed()) return cmd_simulate_corpus(corpus);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
