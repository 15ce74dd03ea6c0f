#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "vocalics/errors.hpp"

namespace vocalics {

// Decoded waveform. Samples are interleaved when channels > 1 and always lie
// in [-1, 1]. After normalize() a clip is mono at the target rate.
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 0;
  int channels = 1;

  std::size_t frames() const {
    return channels > 0 ? samples.size() / static_cast<std::size_t>(channels) : 0;
  }
  double duration_seconds() const {
    return sample_rate > 0 && channels > 0
               ? static_cast<double>(samples.size()) /
                     (static_cast<double>(sample_rate) * channels)
               : 0.0;
  }
};

namespace detail {

inline std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}
inline std::uint16_t read_u16le(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace detail

// Reads a RIFF/WAVE file holding 16-bit PCM or 32-bit IEEE float samples.
// Sample rate and channel count are preserved; PCM is rescaled by 1/32768.
inline AudioClip load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedFile("cannot open '" + path + "'");
  std::vector<unsigned char> raw((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (raw.size() < 12 || std::memcmp(raw.data(), "RIFF", 4) != 0 ||
      std::memcmp(raw.data() + 8, "WAVE", 4) != 0) {
    throw MalformedFile("'" + path + "' is not a RIFF/WAVE file");
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::size_t data_off = 0, data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= raw.size()) {
    const char* id = reinterpret_cast<const char*>(raw.data() + pos);
    const std::uint32_t len = detail::read_u32le(raw.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + len > raw.size()) throw MalformedFile("truncated chunk in '" + path + "'");
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (len < 16) throw MalformedFile("fmt chunk too small in '" + path + "'");
      format = detail::read_u16le(raw.data() + body);
      channels = detail::read_u16le(raw.data() + body + 2);
      rate = detail::read_u32le(raw.data() + body + 4);
      bits = detail::read_u16le(raw.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_off = body;
      data_len = len;
    }
    pos = body + len + (len & 1);  // chunks are word aligned
  }
  if (!have_fmt || data_off == 0) throw MalformedFile("missing fmt/data chunk in '" + path + "'");
  if (channels < 1 || rate < 1) throw MalformedFile("bad fmt fields in '" + path + "'");

  AudioClip clip;
  clip.sample_rate = static_cast<int>(rate);
  clip.channels = channels;

  if (format == 1 && bits == 16) {
    const std::size_t n = data_len / 2;
    clip.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto u = detail::read_u16le(raw.data() + data_off + 2 * i);
      const auto s = static_cast<std::int16_t>(u);
      clip.samples[i] = static_cast<double>(s) / 32768.0;
    }
  } else if (format == 3 && bits == 32) {
    const std::size_t n = data_len / 4;
    clip.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t u = detail::read_u32le(raw.data() + data_off + 4 * i);
      float f;
      std::memcpy(&f, &u, 4);
      clip.samples[i] = std::clamp(static_cast<double>(f), -1.0, 1.0);
    }
  } else {
    throw UnsupportedEncoding("'" + path + "': only PCM16 and float32 WAV are supported");
  }
  return clip;
}

// Writes mono/multichannel PCM16. Values are clamped to [-1, 1].
inline void save_wav_pcm16(const std::string& path, const AudioClip& clip) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot write '" + path + "'");
  const std::uint32_t n = static_cast<std::uint32_t>(clip.samples.size());
  const std::uint32_t data_len = n * 2;
  const std::uint16_t ch = static_cast<std::uint16_t>(clip.channels);
  const std::uint32_t rate = static_cast<std::uint32_t>(clip.sample_rate);
  const std::uint32_t byte_rate = rate * ch * 2;
  const std::uint16_t block_align = ch * 2;

  auto w16 = [&](std::uint16_t v) { out.put(char(v & 0xff)).put(char(v >> 8)); };
  auto w32 = [&](std::uint32_t v) {
    out.put(char(v & 0xff)).put(char((v >> 8) & 0xff));
    out.put(char((v >> 16) & 0xff)).put(char((v >> 24) & 0xff));
  };

  out.write("RIFF", 4);
  w32(36 + data_len);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  w32(16);
  w16(1);  // PCM
  w16(ch);
  w32(rate);
  w32(byte_rate);
  w16(block_align);
  w16(16);
  out.write("data", 4);
  w32(data_len);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::clamp(clip.samples[i], -1.0, 1.0);
    const auto s = static_cast<std::int16_t>(std::lround(x * 32767.0));
    w16(static_cast<std::uint16_t>(s));
  }
  if (!out) throw IoFailure("write failed for '" + path + "'");
}

namespace detail {

// Blackman-windowed sinc interpolation, 24 zero crossings per side. When
// decimating, the kernel is stretched so its cutoff sits below the output
// Nyquist (anti-aliasing).
inline std::vector<double> resample_sinc(const std::vector<double>& x, int in_rate,
                                         int out_rate) {
  if (in_rate == out_rate) return x;
  const double ratio = static_cast<double>(out_rate) / in_rate;
  const double stretch = std::min(1.0, ratio);
  const double fc = 0.46 * stretch;  // cycles per input sample, 92% of the lower Nyquist
  const int half_taps = 24;
  const double kernel_half = half_taps / stretch;  // input samples per side

  const auto n_out = static_cast<std::size_t>(
      std::llround(static_cast<double>(x.size()) * ratio));
  std::vector<double> y(n_out, 0.0);

  const double pi = 3.14159265358979323846;
  for (std::size_t n = 0; n < n_out; ++n) {
    const double t = static_cast<double>(n) / ratio;  // position in input samples
    const auto k0 = static_cast<long>(std::ceil(t - kernel_half));
    const auto k1 = static_cast<long>(std::floor(t + kernel_half));
    double acc = 0.0;
    for (long k = std::max<long>(0, k0);
         k <= std::min<long>(static_cast<long>(x.size()) - 1, k1); ++k) {
      const double d = t - static_cast<double>(k);
      const double u = d / kernel_half;  // in [-1, 1]
      const double wnd = 0.42 + 0.5 * std::cos(pi * u) + 0.08 * std::cos(2.0 * pi * u);
      const double arg = 2.0 * fc * d;
      const double s = std::abs(arg) < 1e-12
                           ? 2.0 * fc
                           : 2.0 * fc * std::sin(pi * arg) / (pi * arg);
      acc += x[static_cast<std::size_t>(k)] * s * wnd;
    }
    y[n] = std::clamp(acc, -1.0, 1.0);
  }
  return y;
}

}  // namespace detail

// Downmixes to mono by channel mean and resamples (band-limited) to
// target_rate. Already-mono clips at the target rate pass through unchanged.
inline AudioClip normalize(const AudioClip& clip, int target_rate = 16000) {
  if (clip.samples.empty()) throw EmptyClip("normalize: empty clip");

  AudioClip mono;
  mono.sample_rate = clip.sample_rate;
  mono.channels = 1;
  if (clip.channels == 1) {
    mono.samples = clip.samples;
  } else {
    const std::size_t frames = clip.frames();
    mono.samples.resize(frames);
    for (std::size_t f = 0; f < frames; ++f) {
      double acc = 0.0;
      for (int c = 0; c < clip.channels; ++c)
        acc += clip.samples[f * clip.channels + c];
      mono.samples[f] = acc / clip.channels;
    }
  }

  if (mono.sample_rate == target_rate) return mono;
  AudioClip out;
  out.channels = 1;
  out.sample_rate = target_rate;
  out.samples = detail::resample_sinc(mono.samples, mono.sample_rate, target_rate);
  return out;
}

// Removes leading/trailing low-energy regions. A frame counts as voiced when
// its RMS exceeds energy_floor_db re full scale; the kept span runs from the
// first to the last run of >= min_voiced_frames voiced frames. Interior quiet
// regions are preserved.
inline AudioClip trim_silence(const AudioClip& clip, double frame_ms = 25.0,
                              double hop_ms = 10.0, double energy_floor_db = -45.0,
                              int min_voiced_frames = 3) {
  if (clip.samples.empty()) throw EmptyClip("trim_silence: empty clip");
  const std::size_t n = clip.samples.size();
  const auto frame = static_cast<std::size_t>(clip.sample_rate * frame_ms / 1000.0);
  const auto hop = static_cast<std::size_t>(clip.sample_rate * hop_ms / 1000.0);
  const auto keep_if_audible = [&]() -> AudioClip {
    // too short for run detection: keep it if anything is above the floor
    double rms = 0.0;
    for (double s : clip.samples) rms += s * s;
    rms = std::sqrt(rms / static_cast<double>(n));
    if (rms <= std::pow(10.0, energy_floor_db / 20.0))
      throw NoVoicedContent("trim_silence: no samples above energy floor");
    return clip;
  };
  if (frame == 0 || hop == 0 || n < frame) return keep_if_audible();

  const std::size_t n_frames = (n - frame) / hop + 1;
  if (n_frames < static_cast<std::size_t>(min_voiced_frames)) return keep_if_audible();
  const double thr = std::pow(10.0, energy_floor_db / 20.0);
  std::vector<bool> voiced(n_frames);
  for (std::size_t i = 0; i < n_frames; ++i) {
    double acc = 0.0;
    const std::size_t off = i * hop;
    for (std::size_t k = 0; k < frame; ++k) acc += clip.samples[off + k] * clip.samples[off + k];
    voiced[i] = std::sqrt(acc / static_cast<double>(frame)) > thr;
  }

  // first and last run of >= min_voiced_frames consecutive voiced frames
  long first = -1, last = -1;
  long run = 0;
  for (std::size_t i = 0; i < n_frames; ++i) {
    run = voiced[i] ? run + 1 : 0;
    if (run >= min_voiced_frames) {
      if (first < 0) first = static_cast<long>(i) - (min_voiced_frames - 1);
      last = static_cast<long>(i);
    }
  }
  if (first < 0) throw NoVoicedContent("trim_silence: entire clip below energy floor");

  const std::size_t begin = static_cast<std::size_t>(first) * hop;
  // one hop cell per frame; a run touching the final frame keeps the tail
  const std::size_t end = (last == static_cast<long>(n_frames) - 1)
                              ? n
                              : (static_cast<std::size_t>(last) + 1) * hop;

  AudioClip out;
  out.sample_rate = clip.sample_rate;
  out.channels = clip.channels;
  out.samples.assign(clip.samples.begin() + static_cast<long>(begin),
                     clip.samples.begin() + static_cast<long>(end));
  return out;
}

}  // namespace vocalics
