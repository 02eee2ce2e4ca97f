#include "r3val/report.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "r3val/error.hpp"

namespace r3v {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << content;
}

void render_specificity(std::ostringstream& md, const ReportInputs& in) {
  md << "## Specificity\n\n";
  if (in.specificity.empty()) {
    md << "No data: no specificity matrices were provided.\n\n";
    return;
  }
  md << "False positives among pseudo-variants drawn from one true variant "
     << fmt::format("(two-sided Wilcoxon, alpha {}).\n\n", in.alpha);
  md << "| Approach | Corpora | Pairs tested | False positives | Rate per pair |\n";
  md << "|---|---:|---:|---:|---:|\n";
  for (const auto& s : in.specificity) {
    const std::size_t n = s.counts.labels.size();
    const std::size_t pairs = n * (n - 1) / 2 * s.corpora;
    const double rate = pairs ? static_cast<double>(s.counts.total()) / static_cast<double>(pairs) : 0.0;
    md << fmt::format("| {} | {} | {} | {} | {:.4f} |\n", to_string(s.approach), s.corpora, pairs,
                      s.counts.total(), rate);
  }
  md << '\n';
  for (const auto& s : in.specificity) {
    md << fmt::format("### {} false-positive counts\n\n", to_string(s.approach));
    md << "| |";
    for (const auto& l : s.counts.labels) md << ' ' << l << " |";
    md << "\n|---|";
    for (std::size_t i = 0; i < s.counts.labels.size(); ++i) md << "---:|";
    md << '\n';
    for (std::size_t i = 0; i < s.counts.labels.size(); ++i) {
      md << "| " << s.counts.labels[i] << " |";
      for (std::size_t j = 0; j < s.counts.labels.size(); ++j) {
        md << ' ' << (i == j ? std::string("-") : std::to_string(s.counts.counts[i][j])) << " |";
      }
      md << '\n';
    }
    md << '\n';
  }
}

void render_sensitivity(std::ostringstream& md, const ReportInputs& in) {
  md << "## Sensitivity\n\n";
  if (in.sensitivity.empty()) {
    md << "No data: no sensitivity campaigns were provided.\n\n";
    return;
  }
  md << fmt::format("Each variant against the baseline: A12 (higher means the variant uses less energy) and a "
                    "one-sided Wilcoxon test, alpha {}.\n\n",
                    in.alpha);
  md << "| Approach | Median A12 | A12 >= 0.64 | p <= alpha | Comparisons |\n";
  md << "|---|---:|---:|---:|---:|\n";
  for (const auto& r : in.sensitivity) {
    md << fmt::format("| {} | {:.4f} | {} | {} | {} |\n", to_string(r.approach), r.median_es, r.count_es_ge_064,
                      r.count_p_le_alpha, r.per_variant.size());
  }
  md << '\n';
  for (const auto& r : in.sensitivity) {
    md << fmt::format("### {} per variant\n\n", to_string(r.approach));
    md << "| Variant | A12 | Magnitude | p |\n|---|---:|---|---:|\n";
    for (const auto& c : r.per_variant) {
      md << fmt::format("| {} | {:.4f} | {} | {:.4g} |\n", c.variant.name(), c.a12,
                        stats::to_string(stats::classify_effect(c.a12)), c.p_value);
    }
    md << '\n';
  }
}

void render_spectrum(std::ostringstream& md, const ReportInputs& in) {
  md << "## Spectrum\n\n";
  if (!in.spectrum) {
    md << "No data: no energy series was analysed.\n\n";
    return;
  }
  const auto& s = *in.spectrum;
  md << fmt::format("Raw periodogram of {} consecutive runs{}.\n\n", s.n,
                    in.spectrum_variant.empty() ? "" : " of " + in.spectrum_variant);
  md << "| Rank | Period (samples) | Period (minutes) | Power share |\n|---:|---:|---:|---:|\n";
  const auto top = spectral::dominant_periods(s, 5);
  for (std::size_t i = 0; i < top.size(); ++i) {
    const auto& d = top[i];
    md << fmt::format("| {} | {:.2f} | {} | {:.4f} |\n", i + 1, d.period_samples,
                      d.period_seconds ? fmt::format("{:.1f}", *d.period_seconds / 60.0) : std::string("-"),
                      d.power_share);
  }
  md << '\n';
}

}  // namespace

std::string render_markdown(const ReportInputs& in) {
  std::ostringstream md;
  md << "# " << in.title << "\n\n";
  if (in.seed) md << "Seed: " << *in.seed << "\n\n";
  render_specificity(md, in);
  render_sensitivity(md, in);
  render_spectrum(md, in);
  return md.str();
}

std::string count_matrix_csv(const CountMatrix& counts) {
  std::string out = "label";
  for (const auto& l : counts.labels) out += "," + l;
  out += '\n';
  for (std::size_t i = 0; i < counts.labels.size(); ++i) {
    out += counts.labels[i];
    for (std::size_t j = 0; j < counts.labels.size(); ++j) out += "," + std::to_string(counts.counts[i][j]);
    out += '\n';
  }
  return out;
}

std::string sensitivity_csv(const std::vector<SensitivityRow>& rows, double alpha) {
  std::string out = "approach,median_es,count_es_ge_064,count_p_le_alpha,alpha,comparisons\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{}\n", to_string(r.approach), r.median_es, r.count_es_ge_064,
                       r.count_p_le_alpha, alpha, r.per_variant.size());
  }
  return out;
}

std::vector<std::string> render_report(const ReportInputs& in, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& content) {
    write_file(fs::path(out_dir) / name, content);
    written.push_back(name);
  };
  emit("report.md", render_markdown(in));
  for (const auto& s : in.specificity) {
    emit(fmt::format("specificity_{}.csv", lower(to_string(s.approach))), count_matrix_csv(s.counts));
  }
  if (!in.sensitivity.empty()) emit("sensitivity.csv", sensitivity_csv(in.sensitivity, in.alpha));
  if (in.spectrum) {
    std::ostringstream csv;
    spectral::write_spectrum_csv(csv, *in.spectrum);
    emit("spectrum.csv", csv.str());
  }
  return written;
}

}  // namespace r3v
