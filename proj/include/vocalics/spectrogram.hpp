#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "vocalics/audio.hpp"
#include "vocalics/errors.hpp"
#include "vocalics/fft.hpp"
#include "vocalics/framing.hpp"
#include "vocalics/util.hpp"

namespace vocalics {

// Log-magnitude STFT in dB relative to the clip's spectral peak, floored at
// -80 dB. Rows are frames, columns FFT bins 0..n_fft/2.
struct Spectrogram {
  std::size_t n_frames = 0;
  std::size_t n_bins = 0;
  double bin_hz = 0.0;
  double hop_seconds = 0.0;
  std::vector<double> db;  // row-major

  double at(std::size_t frame, std::size_t bin) const { return db[frame * n_bins + bin]; }
};

constexpr double kSpectrogramFloorDb = -80.0;

inline Spectrogram compute_spectrogram(const AudioClip& clip, double frame_ms = 25.0,
                                       double hop_ms = 10.0) {
  const FrameGrid grid = make_grid(clip, frame_ms, hop_ms, WindowKind::Hamming);
  const std::size_t n_fft = next_pow2(grid.frame_len);

  Spectrogram sg;
  sg.n_frames = grid.n_frames;
  sg.n_bins = n_fft / 2 + 1;
  sg.bin_hz = static_cast<double>(clip.sample_rate) / static_cast<double>(n_fft);
  sg.hop_seconds = grid.hop_seconds();
  sg.db.assign(sg.n_frames * sg.n_bins, kSpectrogramFloorDb);

  const std::vector<double> window = hamming_window(grid.frame_len);
  std::vector<double> frame, windowed(grid.frame_len);
  std::vector<double> mag(sg.n_frames * sg.n_bins, 0.0);
  double peak = 0.0;
  for (std::size_t i = 0; i < grid.n_frames; ++i) {
    copy_frame(clip, grid, i, frame);
    for (std::size_t k = 0; k < grid.frame_len; ++k) windowed[k] = frame[k] * window[k];
    const std::vector<double> m = magnitude_spectrum(windowed.data(), windowed.size(), n_fft);
    for (std::size_t k = 0; k < sg.n_bins; ++k) {
      mag[i * sg.n_bins + k] = m[k];
      peak = std::max(peak, m[k]);
    }
  }
  if (peak <= 1e-12) return sg;  // silence: everything stays at the floor

  for (std::size_t j = 0; j < mag.size(); ++j) {
    const double rel = mag[j] / peak;
    sg.db[j] = std::max(kSpectrogramFloorDb, 20.0 * std::log10(std::max(rel, 1e-12)));
  }
  return sg;
}

// P5 graymap, low frequencies at the bottom; [-80, 0] dB maps to [0, 255].
inline void write_spectrogram_pgm(const std::string& path, const Spectrogram& sg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot write '" + path + "'");
  out << "P5\n" << sg.n_frames << ' ' << sg.n_bins << "\n255\n";
  for (std::size_t row = 0; row < sg.n_bins; ++row) {
    const std::size_t bin = sg.n_bins - 1 - row;
    for (std::size_t f = 0; f < sg.n_frames; ++f) {
      const double v = (sg.at(f, bin) - kSpectrogramFloorDb) / -kSpectrogramFloorDb;
      out.put(static_cast<char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
    }
  }
  if (!out) throw IoFailure("write failed for '" + path + "'");
}

// CSV mirror of the matrix: one row per frame, one column per bin.
inline void write_spectrogram_csv(const std::string& path, const Spectrogram& sg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot write '" + path + "'");
  out << "frame";
  for (std::size_t k = 0; k < sg.n_bins; ++k) {
    out << ",bin" << k << "_" << format_double(k * sg.bin_hz) << "hz";
  }
  out << '\n';
  for (std::size_t f = 0; f < sg.n_frames; ++f) {
    out << f;
    for (std::size_t k = 0; k < sg.n_bins; ++k) out << ',' << format_double(sg.at(f, k));
    out << '\n';
  }
  if (!out) throw IoFailure("write failed for '" + path + "'");
}

}  // namespace vocalics
