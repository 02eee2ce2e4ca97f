#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace r3v::spectral {

enum class Window { kNone, kHann };

/// One-sided raw periodogram of a uniformly spaced series.
///
/// `frequencies` are in cycles per sample, k/n for k = 1..floor(n/2);
/// `power[k-1]` is |X_k|^2 / n of the mean-removed (optionally windowed) series.
struct Spectrum {
  std::vector<double> frequencies;
  std::vector<double> power;
  std::size_t n = 0;
  /// Seconds per sample. Real runs are not evenly spaced, so periods derived
  /// from this are approximate.
  std::optional<double> sample_spacing_s;
};

Spectrum periodogram(std::span<const double> series, std::optional<double> sample_spacing_s = {},
                     Window window = Window::kNone);

/// Sum of power over the full two-sided spectrum (interior bins counted twice,
/// the Nyquist bin once). Equals n times the population variance of the
/// mean-removed input when no window is applied.
double two_sided_power(const Spectrum& spectrum);

struct DominantPeriod {
  double frequency = 0.0;
  double period_samples = 0.0;
  std::optional<double> period_seconds;
  double power = 0.0;
  double power_share = 0.0;  // bin power / one-sided total
};

/// Top-k bins by power, strongest first. Equal powers keep the lower frequency first.
std::vector<DominantPeriod> dominant_periods(const Spectrum& spectrum, std::size_t k);

/// CSV with columns frequency,period_samples,period_seconds,power.
void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum);
void save_spectrum_csv(const std::string& path, const Spectrum& spectrum);

}  // namespace r3v::spectral
