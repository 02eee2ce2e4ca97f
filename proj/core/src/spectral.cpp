#include "r3val/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <fftw3.h>
#include <fmt/format.h>

#include "r3val/error.hpp"

namespace r3v::spectral {

namespace {

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwPlan {
  fftw_plan plan = nullptr;
  ~FftwPlan() {
    if (plan) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

struct FftwBuffer {
  explicit FftwBuffer(std::size_t bytes) : ptr(fftw_malloc(bytes)) {
    if (!ptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  void* ptr;
};

std::string format_double(double v) { return fmt::format("{}", v); }

}  // namespace

Spectrum periodogram(std::span<const double> series, std::optional<double> sample_spacing_s,
                     Window window) {
  const std::size_t n = series.size();
  if (n < 4) throw std::invalid_argument("periodogram needs at least 4 samples");
  for (double v : series) {
    if (!std::isfinite(v)) throw std::invalid_argument("periodogram input has a non-finite value");
  }
  if (sample_spacing_s && !(*sample_spacing_s > 0.0)) {
    throw std::invalid_argument("sample spacing must be positive");
  }

  FftwBuffer in_buf(sizeof(double) * n);
  FftwBuffer out_buf(sizeof(fftw_complex) * (n / 2 + 1));
  auto* in = static_cast<double*>(in_buf.ptr);
  auto* out = static_cast<fftw_complex*>(out_buf.ptr);

  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) in[i] = series[i] - mean;
  if (window == Window::kHann) {
    for (std::size_t i = 0; i < n; ++i) {
      const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                            static_cast<double>(n - 1));
      in[i] *= w;
    }
  }

  FftwPlan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
  }
  fftw_execute(plan.plan);

  Spectrum spectrum;
  spectrum.n = n;
  spectrum.sample_spacing_s = sample_spacing_s;
  const std::size_t bins = n / 2;
  spectrum.frequencies.reserve(bins);
  spectrum.power.reserve(bins);
  for (std::size_t k = 1; k <= bins; ++k) {
    const double re = out[k][0];
    const double im = out[k][1];
    spectrum.frequencies.push_back(static_cast<double>(k) / static_cast<double>(n));
    spectrum.power.push_back((re * re + im * im) / static_cast<double>(n));
  }
  return spectrum;
}

double two_sided_power(const Spectrum& spectrum) {
  double total = 0.0;
  for (std::size_t i = 0; i < spectrum.power.size(); ++i) {
    const std::size_t k = i + 1;
    const bool nyquist = spectrum.n % 2 == 0 && 2 * k == spectrum.n;
    total += nyquist ? spectrum.power[i] : 2.0 * spectrum.power[i];
  }
  return total;
}

std::vector<DominantPeriod> dominant_periods(const Spectrum& spectrum, std::size_t k) {
  std::vector<std::size_t> order(spectrum.power.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return spectrum.power[a] > spectrum.power[b];
  });
  const double total = std::accumulate(spectrum.power.begin(), spectrum.power.end(), 0.0);
  std::vector<DominantPeriod> out;
  for (std::size_t i = 0; i < std::min(k, order.size()); ++i) {
    const std::size_t bin = order[i];
    DominantPeriod d;
    d.frequency = spectrum.frequencies[bin];
    d.period_samples = 1.0 / d.frequency;
    if (spectrum.sample_spacing_s) d.period_seconds = *spectrum.sample_spacing_s / d.frequency;
    d.power = spectrum.power[bin];
    d.power_share = total > 0.0 ? d.power / total : 0.0;
    out.push_back(d);
  }
  return out;
}

void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum) {
  out << "frequency,period_samples,period_seconds,power\n";
  for (std::size_t i = 0; i < spectrum.power.size(); ++i) {
    const double f = spectrum.frequencies[i];
    out << format_double(f) << ',' << format_double(1.0 / f) << ',';
    if (spectrum.sample_spacing_s) out << format_double(*spectrum.sample_spacing_s / f);
    out << ',' << format_double(spectrum.power[i]) << '\n';
  }
}

void save_spectrum_csv(const std::string& path, const Spectrum& spectrum) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot open '{}' for writing", path));
  write_spectrum_csv(out, spectrum);
}

}  // namespace r3v::spectral
