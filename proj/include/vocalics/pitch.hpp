#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "vocalics/audio.hpp"
#include "vocalics/errors.hpp"
#include "vocalics/fft.hpp"
#include "vocalics/framing.hpp"

namespace vocalics {

// Per-frame F0 and voicing, on the shared master grid. F0 is 0 on unvoiced
// frames; a frame is voiced iff voicing_prob >= the configured threshold.
struct PitchTrack {
  FrameGrid grid;
  std::vector<double> f0;
  std::vector<double> voicing_prob;
  std::vector<std::uint8_t> voiced;
};

namespace detail {

// Normalized cross-correlation of a frame with itself at the given lag.
inline double normalized_autocorr(const std::vector<double>& x, std::size_t lag) {
  if (lag == 0 || lag >= x.size()) return 0.0;
  const std::size_t n = x.size() - lag;
  double num = 0.0, e0 = 0.0, e1 = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    num += x[t] * x[t + lag];
    e0 += x[t] * x[t];
    e1 += x[t + lag] * x[t + lag];
  }
  const double den = std::sqrt(e0 * e1);
  return den > 1e-12 ? num / den : 0.0;
}

// Best normalized autocorrelation near the expected period, searching a few
// integer lags either side (the period is rarely an integer sample count).
inline double periodicity_strength(const std::vector<double>& x, double period_samples) {
  const auto lag0 = static_cast<long>(std::lround(period_samples));
  const long radius = std::max<long>(2, lag0 / 32);
  double best = 0.0;
  for (long lag = std::max<long>(1, lag0 - radius); lag <= lag0 + radius; ++lag) {
    if (lag >= static_cast<long>(x.size())) break;
    best = std::max(best, normalized_autocorr(x, static_cast<std::size_t>(lag)));
  }
  return std::clamp(best, 0.0, 1.0);
}

inline double interp_bin(const std::vector<double>& mag, double bin) {
  if (bin < 0.0 || bin >= static_cast<double>(mag.size() - 1)) return 0.0;
  const auto k = static_cast<std::size_t>(bin);
  const double frac = bin - static_cast<double>(k);
  return mag[k] * (1.0 - frac) + mag[k + 1] * frac;
}

}  // namespace detail

// Subharmonic-summation pitch for one analysis window. Candidates live on a
// log-frequency grid; each sums compression-weighted magnitudes at its
// harmonic positions. Near-ties (a flat harmonic comb scores the octave the
// same) are resolved by periodicity strength, then by the lower frequency.
inline void shs_pitch_frame(const std::vector<double>& windowed,
                            const std::vector<double>& raw, int sample_rate,
                            double fmin, double fmax, double* f0_out,
                            double* strength_out) {
  static constexpr int kHarmonics = 15;
  static constexpr double kCompression = 0.84;
  static constexpr int kStepsPerOctave = 96;

  const std::size_t n_fft = std::max<std::size_t>(2048, next_pow2(windowed.size()));
  const std::vector<double> mag = magnitude_spectrum(windowed.data(), windowed.size(), n_fft);
  const double bin_hz = static_cast<double>(sample_rate) / static_cast<double>(n_fft);

  const int n_steps = static_cast<int>(
      std::ceil(std::log2(fmax / fmin) * kStepsPerOctave)) + 1;
  std::vector<double> score(static_cast<std::size_t>(n_steps));
  double best_score = 0.0;
  for (int s = 0; s < n_steps; ++s) {
    const double f = fmin * std::pow(2.0, static_cast<double>(s) / kStepsPerOctave);
    double acc = 0.0;
    double w = 1.0;
    for (int h = 1; h <= kHarmonics; ++h, w *= kCompression) {
      const double hf = f * h;
      if (hf >= sample_rate / 2.0) break;
      acc += w * detail::interp_bin(mag, hf / bin_hz);
    }
    score[static_cast<std::size_t>(s)] = acc;
    best_score = std::max(best_score, acc);
  }

  if (best_score <= 1e-12) {
    *f0_out = 0.0;
    *strength_out = 0.0;
    return;
  }

  // local maxima within 5% of the best are candidate pitches
  double best_f = 0.0, best_strength = -1.0;
  for (int s = 0; s < n_steps; ++s) {
    const double sc = score[static_cast<std::size_t>(s)];
    if (sc < 0.95 * best_score) continue;
    const bool left_ok = s == 0 || score[static_cast<std::size_t>(s - 1)] <= sc;
    const bool right_ok = s == n_steps - 1 || score[static_cast<std::size_t>(s + 1)] < sc;
    if (!left_ok || !right_ok) continue;

    // parabolic refinement in the log-frequency domain
    double step_refined = static_cast<double>(s);
    if (s > 0 && s < n_steps - 1) {
      const double a = score[static_cast<std::size_t>(s - 1)];
      const double b = sc;
      const double c = score[static_cast<std::size_t>(s + 1)];
      const double denom = a - 2.0 * b + c;
      if (std::abs(denom) > 1e-12) {
        step_refined += 0.5 * (a - c) / denom;
      }
    }
    double f = fmin * std::pow(2.0, step_refined / kStepsPerOctave);
    f = std::clamp(f, fmin, fmax);
    const double strength = detail::periodicity_strength(raw, sample_rate / f);
    if (strength > best_strength + 1e-9 ||
        (std::abs(strength - best_strength) <= 1e-9 && f < best_f)) {
      best_strength = strength;
      best_f = f;
    }
  }
  if (best_strength < 0.0) {  // no local maximum survived; fall back to argmax
    int s_best = 0;
    for (int s = 1; s < n_steps; ++s) {
      if (score[static_cast<std::size_t>(s)] > score[static_cast<std::size_t>(s_best)]) s_best = s;
    }
    best_f = fmin * std::pow(2.0, static_cast<double>(s_best) / kStepsPerOctave);
    best_strength = detail::periodicity_strength(raw, sample_rate / best_f);
  }
  *f0_out = best_f;
  *strength_out = best_strength;
}

// F0 and voicing probability per frame of the 25 ms master grid, analyzed
// through long Gaussian windows centered on each frame. Frames whose RMS sits
// below -60 dBFS are unvoiced outright.
inline PitchTrack compute_f0_voicing(const AudioClip& clip, double fmin = 55.0,
                                     double fmax = 500.0, double frame_ms = 25.0,
                                     double hop_ms = 10.0, double f0_window_ms = 60.0,
                                     double voicing_threshold = 0.5) {
  const FrameGrid grid = make_grid(clip, frame_ms, hop_ms, WindowKind::Hamming);
  if (clip.samples.size() < 3 * grid.frame_len) {
    throw ClipTooShort("compute_f0_voicing: need at least 3 frame lengths of audio");
  }

  PitchTrack track;
  track.grid = grid;
  track.f0.assign(grid.n_frames, 0.0);
  track.voicing_prob.assign(grid.n_frames, 0.0);
  track.voiced.assign(grid.n_frames, 0);

  const auto win_len = static_cast<std::size_t>(
      std::lround(clip.sample_rate * f0_window_ms / 1000.0));
  const std::vector<double> gauss = gaussian_window(win_len);
  const double energy_gate = 1e-3;  // -60 dBFS

  std::vector<double> padded, clamped, windowed(win_len);
  for (std::size_t i = 0; i < grid.n_frames; ++i) {
    copy_centered(clip, grid, i, win_len, padded);
    copy_centered_clamped(clip, grid, i, win_len, clamped);
    double rms = 0.0;
    for (double v : clamped) rms += v * v;
    rms = std::sqrt(rms / static_cast<double>(clamped.size()));
    if (rms <= energy_gate) continue;

    for (std::size_t k = 0; k < win_len; ++k) windowed[k] = padded[k] * gauss[k];
    double f0 = 0.0, strength = 0.0;
    shs_pitch_frame(windowed, clamped, clip.sample_rate, fmin, fmax, &f0, &strength);

    track.voicing_prob[i] = strength;
    if (strength >= voicing_threshold && f0 > 0.0) {
      track.f0[i] = f0;
      track.voiced[i] = 1;
    }
  }
  return track;
}

}  // namespace vocalics
