#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "vocalics/audio.hpp"
#include "vocalics/rng.hpp"

namespace testutil {

inline constexpr double kPi = 3.14159265358979323846;

inline vocalics::AudioClip sine(double freq_hz, double seconds, double amp = 0.5,
                                int sample_rate = 16000) {
  vocalics::AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.channels = 1;
  clip.samples.resize(static_cast<std::size_t>(seconds * sample_rate));
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    clip.samples[i] = amp * std::sin(2.0 * kPi * freq_hz * static_cast<double>(i) /
                                     sample_rate);
  }
  return clip;
}

inline vocalics::AudioClip white_noise(double seconds, double amp = 0.3,
                                       std::uint64_t seed = 99, int sample_rate = 16000) {
  vocalics::AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.channels = 1;
  clip.samples.resize(static_cast<std::size_t>(seconds * sample_rate));
  vocalics::Rng rng(seed);
  for (auto& s : clip.samples) {
    s = std::clamp(amp * 0.33 * rng.gaussian(), -1.0, 1.0);
  }
  return clip;
}

inline vocalics::AudioClip silence(double seconds, int sample_rate = 16000) {
  vocalics::AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.channels = 1;
  clip.samples.assign(static_cast<std::size_t>(seconds * sample_rate), 0.0);
  return clip;
}

// Impulse train at a fixed rate; every period lands on an integer sample when
// sample_rate/freq does.
inline vocalics::AudioClip pulse_train(double freq_hz, double seconds, double amp = 0.8,
                                       int sample_rate = 16000) {
  vocalics::AudioClip clip = silence(seconds, sample_rate);
  const double period = sample_rate / freq_hz;
  for (double p = 0.0; p < static_cast<double>(clip.samples.size()); p += period) {
    clip.samples[static_cast<std::size_t>(p)] = amp;
  }
  return clip;
}

// Impulse train with explicit per-pulse spacing and amplitudes.
inline vocalics::AudioClip pulse_train_explicit(const std::vector<std::size_t>& periods,
                                                const std::vector<double>& amps,
                                                std::size_t lead, std::size_t n,
                                                int sample_rate = 16000) {
  vocalics::AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.channels = 1;
  clip.samples.assign(n, 0.0);
  std::size_t pos = lead, k = 0;
  while (pos < n) {
    clip.samples[pos] = amps[k % amps.size()];
    pos += periods[k % periods.size()];
    ++k;
  }
  return clip;
}

inline std::string scratch_dir(const std::string& name) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::path("vocalics_test_scratch") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

inline std::vector<unsigned char> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::vector<unsigned char>((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace testutil
