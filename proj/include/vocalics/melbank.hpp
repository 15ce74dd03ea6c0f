#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace vocalics {

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// Triangular mel filterbank over FFT power bins, unit-peak triangles.
// One instance is shared by the auditory band energies, loudness, and MFCC.
class MelFilterbank {
 public:
  MelFilterbank(int n_filters, std::size_t n_fft, int sample_rate, double f_lo = 20.0,
                double f_hi = 8000.0)
      : n_filters_(n_filters), n_bins_(n_fft / 2 + 1) {
    const double nyquist = sample_rate / 2.0;
    if (f_hi > nyquist) f_hi = nyquist;
    const double mel_lo = hz_to_mel(f_lo);
    const double mel_hi = hz_to_mel(f_hi);
    std::vector<double> edges(static_cast<std::size_t>(n_filters) + 2);
    for (std::size_t m = 0; m < edges.size(); ++m) {
      edges[m] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(m) /
                                        (n_filters + 1));
    }
    weights_.assign(static_cast<std::size_t>(n_filters) * n_bins_, 0.0);
    const double bin_hz = static_cast<double>(sample_rate) / static_cast<double>(n_fft);
    for (int f = 0; f < n_filters; ++f) {
      const double lo = edges[static_cast<std::size_t>(f)];
      const double center = edges[static_cast<std::size_t>(f) + 1];
      const double hi = edges[static_cast<std::size_t>(f) + 2];
      for (std::size_t k = 0; k < n_bins_; ++k) {
        const double hz = k * bin_hz;
        double w = 0.0;
        if (hz > lo && hz < center) {
          w = (hz - lo) / (center - lo);
        } else if (hz >= center && hz < hi) {
          w = (hi - hz) / (hi - center);
        }
        weights_[static_cast<std::size_t>(f) * n_bins_ + k] = w;
      }
    }
  }

  int n_filters() const { return n_filters_; }

  // power spectrum (n_fft/2+1 bins) -> per-filter energies
  void apply(const std::vector<double>& power, std::vector<double>& out) const {
    out.assign(static_cast<std::size_t>(n_filters_), 0.0);
    for (int f = 0; f < n_filters_; ++f) {
      double acc = 0.0;
      const double* w = &weights_[static_cast<std::size_t>(f) * n_bins_];
      for (std::size_t k = 0; k < n_bins_ && k < power.size(); ++k) {
        acc += w[k] * power[k];
      }
      out[static_cast<std::size_t>(f)] = acc;
    }
  }

 private:
  int n_filters_;
  std::size_t n_bins_;
  std::vector<double> weights_;
};

}  // namespace vocalics
