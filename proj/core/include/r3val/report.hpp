#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "r3val/evaluation.hpp"
#include "r3val/spectral.hpp"

namespace r3v {

struct SpecificitySection {
  Approach approach = Approach::kA1;
  CountMatrix counts;
  std::size_t corpora = 0;  // matrices summed into `counts`
};

struct ReportInputs {
  std::string title = "R3 validation report";
  std::optional<std::uint64_t> seed;
  double alpha = kDefaultAlpha;
  std::vector<SpecificitySection> specificity;
  std::vector<SensitivityRow> sensitivity;
  std::optional<spectral::Spectrum> spectrum;
  std::string spectrum_variant;
};

std::string render_markdown(const ReportInputs& inputs);

/// Square matrix with a leading label column: "label,v1,...,vN".
std::string count_matrix_csv(const CountMatrix& counts);

/// Columns approach,median_es,count_es_ge_064,count_p_le_alpha,alpha,comparisons.
std::string sensitivity_csv(const std::vector<SensitivityRow>& rows, double alpha);

/// Writes report.md, specificity_<approach>.csv per section, sensitivity.csv
/// when rows exist and spectrum.csv when a spectrum exists. Returns the file names written.
std::vector<std::string> render_report(const ReportInputs& inputs, const std::string& out_dir);

}  // namespace r3v
