#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "vocalics/audio.hpp"
#include "vocalics/errors.hpp"

namespace vocalics {

enum class WindowKind { Hamming, Gaussian };

// Framing substrate shared by every descriptor of one extraction run.
struct FrameGrid {
  double frame_len_ms = 25.0;
  double hop_ms = 10.0;
  std::size_t frame_len = 0;  // samples
  std::size_t hop = 0;        // samples
  std::size_t n_frames = 0;
  int sample_rate = 0;
  WindowKind window = WindowKind::Hamming;

  double hop_seconds() const { return hop_ms / 1000.0; }
  // time of the center of frame i, in seconds
  double frame_center_s(std::size_t i) const {
    return (static_cast<double>(i) * hop + frame_len / 2.0) /
           static_cast<double>(sample_rate);
  }

  bool operator==(const FrameGrid& o) const {
    return frame_len == o.frame_len && hop == o.hop && n_frames == o.n_frames &&
           sample_rate == o.sample_rate && window == o.window;
  }
};

inline FrameGrid make_grid(const AudioClip& clip, double frame_ms = 25.0,
                           double hop_ms = 10.0,
                           WindowKind window = WindowKind::Hamming) {
  FrameGrid g;
  g.frame_len_ms = frame_ms;
  g.hop_ms = hop_ms;
  g.sample_rate = clip.sample_rate;
  g.window = window;
  g.frame_len = static_cast<std::size_t>(
      std::lround(clip.sample_rate * frame_ms / 1000.0));
  g.hop = static_cast<std::size_t>(std::lround(clip.sample_rate * hop_ms / 1000.0));
  if (g.frame_len == 0 || g.hop == 0 || clip.samples.size() < g.frame_len) {
    throw ClipTooShort("clip shorter than one analysis frame");
  }
  g.n_frames = (clip.samples.size() - g.frame_len) / g.hop + 1;
  return g;
}

inline std::vector<double> hamming_window(std::size_t n) {
  std::vector<double> w(n);
  const double pi = 3.14159265358979323846;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.54 - 0.46 * std::cos(2.0 * pi * i / (n - 1));
  }
  return w;
}

inline std::vector<double> gaussian_window(std::size_t n, double sigma_frac = 0.4) {
  std::vector<double> w(n);
  const double mid = (n - 1) / 2.0;
  const double sigma = sigma_frac * mid;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (i - mid) / sigma;
    w[i] = std::exp(-0.5 * d * d);
  }
  return w;
}

// Copies the raw frame i of the grid (no window applied).
inline void copy_frame(const AudioClip& clip, const FrameGrid& g, std::size_t i,
                       std::vector<double>& out) {
  out.resize(g.frame_len);
  const std::size_t off = i * g.hop;
  for (std::size_t k = 0; k < g.frame_len; ++k) out[k] = clip.samples[off + k];
}

// Copies a window of `len` samples centered on frame i's center, zero-padding
// past the clip edges. Used for the long pitch/voice-quality analysis frames.
inline void copy_centered(const AudioClip& clip, const FrameGrid& g, std::size_t i,
                          std::size_t len, std::vector<double>& out) {
  out.assign(len, 0.0);
  const auto center =
      static_cast<long>(i * g.hop) + static_cast<long>(g.frame_len) / 2;
  const long start = center - static_cast<long>(len) / 2;
  for (std::size_t k = 0; k < len; ++k) {
    const long idx = start + static_cast<long>(k);
    if (idx >= 0 && idx < static_cast<long>(clip.samples.size())) {
      out[k] = clip.samples[static_cast<std::size_t>(idx)];
    }
  }
}

// Same window but clipped to the clip bounds instead of zero-padded; edge
// zeros would bias autocorrelation-based measures, so those use this variant.
inline void copy_centered_clamped(const AudioClip& clip, const FrameGrid& g,
                                  std::size_t i, std::size_t len,
                                  std::vector<double>& out) {
  const auto center =
      static_cast<long>(i * g.hop) + static_cast<long>(g.frame_len) / 2;
  const long start = std::max<long>(0, center - static_cast<long>(len) / 2);
  const long end = std::min<long>(static_cast<long>(clip.samples.size()),
                                  start + static_cast<long>(len));
  out.assign(clip.samples.begin() + start, clip.samples.begin() + end);
}

}  // namespace vocalics
