#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "vocalics/audio.hpp"
#include "vocalics/errors.hpp"
#include "vocalics/fft.hpp"
#include "vocalics/framing.hpp"
#include "vocalics/melbank.hpp"
#include "vocalics/pitch.hpp"

namespace vocalics {

struct LldConfig {
  double frame_ms = 25.0;   // Hamming frames for spectral/cepstral/energy
  double hop_ms = 10.0;
  double f0_window_ms = 60.0;  // Gaussian analysis window for F0/voice quality
  double fmin = 55.0;
  double fmax = 500.0;
  int n_bands = 26;
  int n_coeffs = 14;
  bool deltas = false;
  double energy_floor_db = -45.0;  // trim_silence floor (CLI plumbing)
  double voicing_threshold = 0.5;
};

// Frame-indexed matrix of named descriptors plus per-frame voicing flags.
struct LldContour {
  FrameGrid grid;
  std::vector<std::string> names;
  std::vector<double> values;  // row-major, n_frames x names.size()
  std::vector<std::uint8_t> voiced;

  std::size_t n_frames() const { return grid.n_frames; }
  std::size_t n_descriptors() const { return names.size(); }
  double at(std::size_t frame, std::size_t col) const {
    return values[frame * names.size() + col];
  }
  long col_index(const std::string& name) const {
    for (std::size_t j = 0; j < names.size(); ++j) {
      if (names[j] == name) return static_cast<long>(j);
    }
    return -1;
  }
  std::vector<double> column(const std::string& name) const {
    const long j = col_index(name);
    if (j < 0) throw UnknownDescriptor("no descriptor named '" + name + "'");
    std::vector<double> out(n_frames());
    for (std::size_t i = 0; i < n_frames(); ++i) out[i] = at(i, static_cast<std::size_t>(j));
    return out;
  }
};

struct EnergyTrack {
  FrameGrid grid;
  std::vector<double> rms_energy, loudness, zcr;
};

struct SpectralTrack {
  FrameGrid grid;
  int n_bands = 0;
  std::vector<double> bands;  // row-major, relative band energies
  std::vector<double> centroid, slope, flux, rolloff_85, sharpness;
};

struct VoiceQualityTrack {
  FrameGrid grid;
  std::vector<double> jitter_local, shimmer_local, hnr_db;
};

namespace detail {

constexpr double kLogFloor = 1e-10;  // applied before any log/divide

// Specific loudness per band (Stevens power law), shared by the loudness sum
// and spectral sharpness.
inline double specific_loudness(double band_energy) {
  return std::pow(std::max(band_energy, 0.0), 0.3);
}

}  // namespace detail

// RMS, a perceptual loudness proxy (sum of per-band specific loudness), and
// zero-crossing rate per frame. RMS/ZCR run on the raw frame; loudness on the
// Hamming-windowed power spectrum through the auditory filterbank.
inline EnergyTrack compute_energy_prosodic(const AudioClip& clip,
                                           const LldConfig& cfg = {}) {
  const FrameGrid grid = make_grid(clip, cfg.frame_ms, cfg.hop_ms, WindowKind::Hamming);
  EnergyTrack track;
  track.grid = grid;
  track.rms_energy.assign(grid.n_frames, 0.0);
  track.loudness.assign(grid.n_frames, 0.0);
  track.zcr.assign(grid.n_frames, 0.0);

  const std::size_t n_fft = next_pow2(grid.frame_len);
  const MelFilterbank bank(cfg.n_bands, n_fft, clip.sample_rate);
  const std::vector<double> window = hamming_window(grid.frame_len);

  std::vector<double> frame, windowed(grid.frame_len), energies;
  for (std::size_t i = 0; i < grid.n_frames; ++i) {
    copy_frame(clip, grid, i, frame);

    double acc = 0.0;
    std::size_t crossings = 0;
    for (std::size_t k = 0; k < grid.frame_len; ++k) {
      acc += frame[k] * frame[k];
      if (k > 0 && frame[k - 1] * frame[k] < 0.0) ++crossings;
    }
    track.rms_energy[i] = std::sqrt(acc / static_cast<double>(grid.frame_len));
    track.zcr[i] =
        static_cast<double>(crossings) / static_cast<double>(grid.frame_len - 1);

    for (std::size_t k = 0; k < grid.frame_len; ++k) windowed[k] = frame[k] * window[k];
    const std::vector<double> power = power_spectrum(windowed.data(), windowed.size(), n_fft);
    bank.apply(power, energies);
    double loud = 0.0;
    for (double e : energies) loud += detail::specific_loudness(e);
    track.loudness[i] = loud;
  }
  return track;
}

// Relative auditory band energies plus centroid, slope, flux, 85% rolloff and
// sharpness. All values guarded to 0 on silent frames.
inline SpectralTrack compute_spectral(const AudioClip& clip, const LldConfig& cfg = {}) {
  const FrameGrid grid = make_grid(clip, cfg.frame_ms, cfg.hop_ms, WindowKind::Hamming);
  SpectralTrack track;
  track.grid = grid;
  track.n_bands = cfg.n_bands;
  track.bands.assign(grid.n_frames * static_cast<std::size_t>(cfg.n_bands), 0.0);
  track.centroid.assign(grid.n_frames, 0.0);
  track.slope.assign(grid.n_frames, 0.0);
  track.flux.assign(grid.n_frames, 0.0);
  track.rolloff_85.assign(grid.n_frames, 0.0);
  track.sharpness.assign(grid.n_frames, 0.0);

  const std::size_t n_fft = next_pow2(grid.frame_len);
  const std::size_t n_bins = n_fft / 2 + 1;
  const double bin_hz = static_cast<double>(clip.sample_rate) / static_cast<double>(n_fft);
  const MelFilterbank bank(cfg.n_bands, n_fft, clip.sample_rate);
  const std::vector<double> window = hamming_window(grid.frame_len);

  std::vector<double> frame, windowed(grid.frame_len), energies;
  std::vector<double> prev_mag;
  for (std::size_t i = 0; i < grid.n_frames; ++i) {
    copy_frame(clip, grid, i, frame);
    for (std::size_t k = 0; k < grid.frame_len; ++k) windowed[k] = frame[k] * window[k];
    const std::vector<double> power = power_spectrum(windowed.data(), windowed.size(), n_fft);

    double total = 0.0, weighted = 0.0;
    for (std::size_t k = 0; k < n_bins; ++k) {
      total += power[k];
      weighted += power[k] * (k * bin_hz);
    }
    track.centroid[i] = total > detail::kLogFloor ? weighted / total : 0.0;

    // least-squares slope of the dB spectrum vs frequency in kHz (skip DC)
    if (total > detail::kLogFloor) {
      double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
      const double m = static_cast<double>(n_bins - 1);
      for (std::size_t k = 1; k < n_bins; ++k) {
        const double x = k * bin_hz / 1000.0;
        const double y = 10.0 * std::log10(std::max(power[k], detail::kLogFloor));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
      }
      const double denom = m * sxx - sx * sx;
      track.slope[i] = std::abs(denom) > 1e-12 ? (m * sxy - sx * sy) / denom : 0.0;
    }

    if (total > detail::kLogFloor) {
      double cum = 0.0;
      for (std::size_t k = 0; k < n_bins; ++k) {
        cum += power[k];
        if (cum >= 0.85 * total) {
          track.rolloff_85[i] = k * bin_hz;
          break;
        }
      }
    }

    std::vector<double> mag(n_bins);
    for (std::size_t k = 0; k < n_bins; ++k) mag[k] = std::sqrt(power[k]);
    if (i > 0) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n_bins; ++k) {
        const double d = mag[k] - prev_mag[k];
        acc += d * d;
      }
      track.flux[i] = std::sqrt(acc) / static_cast<double>(n_bins);
    }
    prev_mag = std::move(mag);

    bank.apply(power, energies);
    double e_sum = 0.0;
    for (double e : energies) e_sum += e;
    for (int b = 0; b < cfg.n_bands; ++b) {
      track.bands[i * static_cast<std::size_t>(cfg.n_bands) + static_cast<std::size_t>(b)] =
          e_sum > detail::kLogFloor ? energies[static_cast<std::size_t>(b)] / e_sum : 0.0;
    }

    // loudness-weighted band centroid with emphasis above band 18
    double l_sum = 0.0, l_weighted = 0.0;
    for (int b = 0; b < cfg.n_bands; ++b) {
      const double l = detail::specific_loudness(energies[static_cast<std::size_t>(b)]);
      const double band = static_cast<double>(b + 1);
      const double g = band <= 18.0 ? 1.0 : 1.0 + 0.3 * (band - 18.0);
      l_sum += l;
      l_weighted += g * band * l;
    }
    track.sharpness[i] = l_sum > detail::kLogFloor ? l_weighted / l_sum : 0.0;
  }
  return track;
}

// MFCC 1..n_coeffs: orthonormal DCT-II of log mel energies, coefficient 0
// excluded so overall gain never leaks in.
inline std::vector<double> compute_mfcc(const AudioClip& clip, const LldConfig& cfg = {}) {
  const FrameGrid grid = make_grid(clip, cfg.frame_ms, cfg.hop_ms, WindowKind::Hamming);
  const std::size_t n_fft = next_pow2(grid.frame_len);
  const MelFilterbank bank(cfg.n_bands, n_fft, clip.sample_rate);
  const std::vector<double> window = hamming_window(grid.frame_len);
  const int B = cfg.n_bands;
  const int K = cfg.n_coeffs;
  const double pi = 3.14159265358979323846;

  // DCT-II basis rows for coefficients 1..K
  std::vector<double> dct(static_cast<std::size_t>(K) * static_cast<std::size_t>(B));
  for (int k = 1; k <= K; ++k) {
    for (int b = 0; b < B; ++b) {
      dct[static_cast<std::size_t>(k - 1) * B + static_cast<std::size_t>(b)] =
          std::sqrt(2.0 / B) * std::cos(pi * k * (2.0 * b + 1.0) / (2.0 * B));
    }
  }

  std::vector<double> out(grid.n_frames * static_cast<std::size_t>(K), 0.0);
  std::vector<double> frame, windowed(grid.frame_len), energies, log_e(static_cast<std::size_t>(B));
  for (std::size_t i = 0; i < grid.n_frames; ++i) {
    copy_frame(clip, grid, i, frame);
    for (std::size_t k = 0; k < grid.frame_len; ++k) windowed[k] = frame[k] * window[k];
    const std::vector<double> power = power_spectrum(windowed.data(), windowed.size(), n_fft);
    bank.apply(power, energies);
    for (int b = 0; b < B; ++b) {
      log_e[static_cast<std::size_t>(b)] =
          std::log(std::max(energies[static_cast<std::size_t>(b)], detail::kLogFloor));
    }
    for (int k = 0; k < K; ++k) {
      double acc = 0.0;
      const double* row = &dct[static_cast<std::size_t>(k) * B];
      for (int b = 0; b < B; ++b) acc += row[b] * log_e[static_cast<std::size_t>(b)];
      out[i * static_cast<std::size_t>(K) + static_cast<std::size_t>(k)] = acc;
    }
  }
  return out;
}

namespace detail {

// Pitch-synchronous peak picking: walk outward from the strongest sample in
// steps of ~one period, keeping the local maximum in each step window.
inline std::vector<std::size_t> pick_pulse_peaks(const std::vector<double>& x,
                                                 double period) {
  std::vector<std::size_t> peaks;
  if (x.size() < static_cast<std::size_t>(period * 2.0)) return peaks;

  std::size_t anchor = 0;
  for (std::size_t t = 1; t < x.size(); ++t) {
    if (x[t] > x[anchor]) anchor = t;
  }
  if (x[anchor] <= 0.0) return peaks;

  peaks.push_back(anchor);
  // forward
  double pos = static_cast<double>(anchor);
  while (true) {
    const auto lo = static_cast<long>(std::lround(pos + 0.7 * period));
    const auto hi = static_cast<long>(std::lround(pos + 1.3 * period));
    if (lo >= static_cast<long>(x.size())) break;
    long best = -1;
    for (long t = std::max<long>(0, lo); t <= std::min<long>(static_cast<long>(x.size()) - 1, hi); ++t) {
      if (best < 0 || x[static_cast<std::size_t>(t)] > x[static_cast<std::size_t>(best)]) best = t;
    }
    if (best < 0 || x[static_cast<std::size_t>(best)] < 0.1 * x[anchor]) break;
    peaks.push_back(static_cast<std::size_t>(best));
    pos = static_cast<double>(best);
  }
  // backward
  pos = static_cast<double>(anchor);
  while (true) {
    const auto hi = static_cast<long>(std::lround(pos - 0.7 * period));
    const auto lo = static_cast<long>(std::lround(pos - 1.3 * period));
    if (hi < 0) break;
    long best = -1;
    for (long t = std::max<long>(0, lo); t <= std::min<long>(static_cast<long>(x.size()) - 1, hi); ++t) {
      if (best < 0 || x[static_cast<std::size_t>(t)] > x[static_cast<std::size_t>(best)]) best = t;
    }
    if (best < 0 || x[static_cast<std::size_t>(best)] < 0.1 * x[anchor]) break;
    peaks.push_back(static_cast<std::size_t>(best));
    pos = static_cast<double>(best);
  }
  std::sort(peaks.begin(), peaks.end());
  return peaks;
}

}  // namespace detail

// Local jitter (mean |consecutive period difference| / mean period), local
// shimmer (same on pulse peak amplitudes) and HNR from the normalized
// autocorrelation at the pitch lag. All three are 0 on unvoiced frames.
inline VoiceQualityTrack compute_voice_quality(const AudioClip& clip,
                                               const PitchTrack& pitch,
                                               const LldConfig& cfg = {}) {
  const FrameGrid expected = make_grid(clip, cfg.frame_ms, cfg.hop_ms, WindowKind::Hamming);
  if (!(pitch.grid == expected) || pitch.f0.size() != expected.n_frames) {
    throw GridMismatch("compute_voice_quality: F0 contour from a different framing");
  }

  VoiceQualityTrack track;
  track.grid = expected;
  track.jitter_local.assign(expected.n_frames, 0.0);
  track.shimmer_local.assign(expected.n_frames, 0.0);
  track.hnr_db.assign(expected.n_frames, 0.0);

  const auto win_len = static_cast<std::size_t>(
      std::lround(clip.sample_rate * cfg.f0_window_ms / 1000.0));

  std::vector<double> raw;
  for (std::size_t i = 0; i < expected.n_frames; ++i) {
    if (!pitch.voiced[i] || pitch.f0[i] <= 0.0) continue;
    copy_centered_clamped(clip, expected, i, win_len, raw);
    const double period = clip.sample_rate / pitch.f0[i];

    // HNR from autocorrelation: r is the harmonic fraction of total power
    double r = detail::periodicity_strength(raw, period);
    r = std::clamp(r, 1e-4, 1.0 - 1e-4);
    track.hnr_db[i] = 10.0 * std::log10(r / (1.0 - r));

    const std::vector<std::size_t> peaks = detail::pick_pulse_peaks(raw, period);
    if (peaks.size() >= 3) {
      std::vector<double> periods(peaks.size() - 1);
      for (std::size_t p = 0; p + 1 < peaks.size(); ++p) {
        periods[p] = static_cast<double>(peaks[p + 1] - peaks[p]);
      }
      double mean_period = 0.0;
      for (double d : periods) mean_period += d;
      mean_period /= static_cast<double>(periods.size());
      if (periods.size() >= 2 && mean_period > 1e-12) {
        double acc = 0.0;
        for (std::size_t p = 0; p + 1 < periods.size(); ++p) {
          acc += std::abs(periods[p + 1] - periods[p]);
        }
        track.jitter_local[i] = acc / static_cast<double>(periods.size() - 1) / mean_period;
      }

      double mean_amp = 0.0;
      for (std::size_t p : peaks) mean_amp += raw[p];
      mean_amp /= static_cast<double>(peaks.size());
      if (mean_amp > 1e-12) {
        double acc = 0.0;
        for (std::size_t p = 0; p + 1 < peaks.size(); ++p) {
          acc += std::abs(raw[peaks[p + 1]] - raw[peaks[p]]);
        }
        track.shimmer_local[i] = acc / static_cast<double>(peaks.size() - 1) / mean_amp;
      }
    }
  }
  return track;
}

namespace detail {

inline std::string band_name(int b) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "audspec_band%02d", b);
  return buf;
}
inline std::string mfcc_name(int k) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "mfcc%02d", k);
  return buf;
}

}  // namespace detail

// Fixed, documented column order of a default extraction. With the default
// config that is 26 + 5 + 14 + 3 + 2 + 3 = 53 descriptors.
inline std::vector<std::string> lld_column_names(const LldConfig& cfg) {
  std::vector<std::string> names;
  for (int b = 1; b <= cfg.n_bands; ++b) names.push_back(detail::band_name(b));
  names.insert(names.end(), {"spectral_centroid", "spectral_slope", "spectral_flux",
                             "spectral_rolloff85", "spectral_sharpness"});
  for (int k = 1; k <= cfg.n_coeffs; ++k) names.push_back(detail::mfcc_name(k));
  names.insert(names.end(), {"rms_energy", "loudness", "zcr"});
  names.insert(names.end(), {"f0", "voicing_prob"});
  names.insert(names.end(), {"jitter_local", "shimmer_local", "hnr_db"});
  if (cfg.deltas) {
    const std::size_t base = names.size();
    for (std::size_t j = 0; j < base; ++j) names.push_back("del_" + names[j]);
  }
  return names;
}

// Descriptors whose functionals are computed over voiced frames only.
inline bool is_voiced_only_descriptor(const std::string& name) {
  const std::string base = name.rfind("del_", 0) == 0 ? name.substr(4) : name;
  return base == "f0" || base == "jitter_local" || base == "shimmer_local" ||
         base == "hnr_db";
}

// Runs every descriptor family on one shared grid and concatenates the
// columns in the pinned order, appending first-order deltas when configured.
inline LldContour extract_llds(const AudioClip& clip, const LldConfig& cfg = {}) {
  const PitchTrack pitch = compute_f0_voicing(clip, cfg.fmin, cfg.fmax, cfg.frame_ms,
                                              cfg.hop_ms, cfg.f0_window_ms,
                                              cfg.voicing_threshold);
  const SpectralTrack spec = compute_spectral(clip, cfg);
  const std::vector<double> mfcc = compute_mfcc(clip, cfg);
  const EnergyTrack energy = compute_energy_prosodic(clip, cfg);
  const VoiceQualityTrack vq = compute_voice_quality(clip, pitch, cfg);

  LldContour contour;
  contour.grid = pitch.grid;
  contour.names = lld_column_names(cfg);
  contour.voiced = pitch.voiced;

  const std::size_t n = contour.grid.n_frames;
  const std::size_t base_cols = static_cast<std::size_t>(cfg.n_bands) + 5 +
                                static_cast<std::size_t>(cfg.n_coeffs) + 3 + 2 + 3;
  const std::size_t total_cols = cfg.deltas ? base_cols * 2 : base_cols;
  contour.values.assign(n * total_cols, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = 0;
    double* row = &contour.values[i * total_cols];
    for (int b = 0; b < cfg.n_bands; ++b) {
      row[j++] = spec.bands[i * static_cast<std::size_t>(cfg.n_bands) + static_cast<std::size_t>(b)];
    }
    row[j++] = spec.centroid[i];
    row[j++] = spec.slope[i];
    row[j++] = spec.flux[i];
    row[j++] = spec.rolloff_85[i];
    row[j++] = spec.sharpness[i];
    for (int k = 0; k < cfg.n_coeffs; ++k) {
      row[j++] = mfcc[i * static_cast<std::size_t>(cfg.n_coeffs) + static_cast<std::size_t>(k)];
    }
    row[j++] = energy.rms_energy[i];
    row[j++] = energy.loudness[i];
    row[j++] = energy.zcr[i];
    row[j++] = pitch.f0[i];
    row[j++] = pitch.voicing_prob[i];
    row[j++] = vq.jitter_local[i];
    row[j++] = vq.shimmer_local[i];
    row[j++] = vq.hnr_db[i];
  }

  if (cfg.deltas) {
    // central differences with clamped edges; delta of a constant is zero
    for (std::size_t j = 0; j < base_cols; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t prev = i > 0 ? i - 1 : 0;
        const std::size_t next = i + 1 < n ? i + 1 : n - 1;
        contour.values[i * total_cols + base_cols + j] =
            (contour.values[next * total_cols + j] - contour.values[prev * total_cols + j]) / 2.0;
      }
    }
  }

  for (double v : contour.values) {
    if (!std::isfinite(v)) throw Error("extract_llds: non-finite descriptor value");
  }
  return contour;
}

}  // namespace vocalics
