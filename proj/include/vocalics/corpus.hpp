#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vocalics/audio.hpp"
#include "vocalics/csv.hpp"
#include "vocalics/errors.hpp"
#include "vocalics/rng.hpp"
#include "vocalics/util.hpp"

namespace vocalics {

// Three-level self-report scale, also used for derived severity labels.
enum class Level { Low, Mid, High };

inline const char* level_name(Level l) {
  switch (l) {
    case Level::Low: return "low";
    case Level::Mid: return "mid";
    case Level::High: return "high";
  }
  return "?";
}

inline Level parse_level(const std::string& s) {
  const std::string v = to_lower(trim_ws(s));
  if (v == "low") return Level::Low;
  if (v == "mid") return Level::Mid;
  if (v == "high") return Level::High;
  throw BadLevel("bad level '" + s + "' (expected low|mid|high)");
}

// One manifest row.
struct RecordingMeta {
  std::string recording_id;
  std::string path;
  std::string speaker_id;
  int sentence_id = 0;       // 1..5
  int days_in_hospital = 0;  // >= 1
  Level sleep = Level::Mid;
  Level fatigue = Level::Mid;
  Level anxiety = Level::Mid;
  std::string gender;              // optional
  std::optional<int> age;          // optional
  std::optional<double> height_cm; // optional
  std::optional<double> weight_kg; // optional
};

inline const char* kManifestHeader =
    "recording_id,path,speaker_id,sentence_id,days_in_hospital,sleep,fatigue,"
    "anxiety,gender,age,height,weight";

inline std::vector<RecordingMeta> parse_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open manifest '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw MissingColumn("manifest '" + path + "' is empty");

  const auto header = split_csv_line(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[to_lower(trim_ws(header[i]))] = i;
  for (const char* required : {"recording_id", "path", "speaker_id", "sentence_id",
                               "days_in_hospital", "sleep", "fatigue", "anxiety"}) {
    if (!col.count(required)) {
      throw MissingColumn("manifest '" + path + "' lacks column '" +
                          std::string(required) + "'");
    }
  }

  auto get = [&col](const std::vector<std::string>& fields, const char* name) {
    const auto it = col.find(name);
    if (it == col.end() || it->second >= fields.size()) return std::string();
    return trim_ws(fields[it->second]);
  };

  std::vector<RecordingMeta> rows;
  std::set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim_ws(line).empty()) continue;
    const auto fields = split_csv_line(line);
    RecordingMeta m;
    m.recording_id = get(fields, "recording_id");
    if (m.recording_id.empty()) {
      throw MalformedFile("manifest line " + std::to_string(line_no) + ": empty recording_id");
    }
    if (!seen.insert(m.recording_id).second) {
      throw DuplicateId("manifest line " + std::to_string(line_no) +
                        ": duplicate recording_id '" + m.recording_id + "'");
    }
    m.path = get(fields, "path");
    m.speaker_id = get(fields, "speaker_id");
    const std::string sent = get(fields, "sentence_id");
    m.sentence_id = std::atoi(sent.c_str());
    if (m.sentence_id < 1 || m.sentence_id > 5) {
      throw BadSentenceId("manifest line " + std::to_string(line_no) +
                          ": sentence_id '" + sent + "' not in 1..5");
    }
    m.days_in_hospital = std::atoi(get(fields, "days_in_hospital").c_str());
    if (m.days_in_hospital < 1) {
      throw NonPositiveDays("manifest line " + std::to_string(line_no) +
                            ": days_in_hospital must be >= 1");
    }
    m.sleep = parse_level(get(fields, "sleep"));
    m.fatigue = parse_level(get(fields, "fatigue"));
    m.anxiety = parse_level(get(fields, "anxiety"));
    m.gender = get(fields, "gender");
    const std::string age = get(fields, "age");
    if (!age.empty()) m.age = std::atoi(age.c_str());
    const std::string height = get(fields, "height");
    if (!height.empty()) m.height_cm = std::strtod(height.c_str(), nullptr);
    const std::string weight = get(fields, "weight");
    if (!weight.empty()) m.weight_kg = std::strtod(weight.c_str(), nullptr);
    rows.push_back(std::move(m));
  }
  return rows;
}

inline void write_manifest(const std::string& path, const std::vector<RecordingMeta>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot write manifest '" + path + "'");
  out << kManifestHeader << '\n';
  for (const auto& m : rows) {
    std::string quoted_path = "\"";
    for (char ch : m.path) {
      if (ch == '"') quoted_path += "\"\"";
      else quoted_path.push_back(ch);
    }
    quoted_path += "\"";
    out << csv_escape(m.recording_id) << ',' << quoted_path << ','
        << csv_escape(m.speaker_id) << ',' << m.sentence_id << ','
        << m.days_in_hospital << ',' << level_name(m.sleep) << ','
        << level_name(m.fatigue) << ',' << level_name(m.anxiety) << ','
        << csv_escape(m.gender) << ',';
    if (m.age) out << *m.age;
    out << ',';
    if (m.height_cm) out << format_double(*m.height_cm);
    out << ',';
    if (m.weight_kg) out << format_double(*m.weight_kg);
    out << '\n';
  }
  if (!out) throw IoFailure("write failed for manifest '" + path + "'");
}

// Acoustic profile of one synthetic class. Bands of different classes should
// not overlap if the corpus is meant to be separable.
struct ClassProfile {
  std::string name;
  double f0_low = 100.0, f0_high = 140.0;    // Hz
  double amp_low = 0.3, amp_high = 0.6;      // peak amplitude of voiced spans
  double pause_rate = 0.3;                   // pauses per second of speech
  double noise_floor_db = -40.0;             // additive noise re full scale
  int days_low = 1, days_high = 25;          // hospitalization-day range
  Level sleep = Level::Mid;
  Level fatigue = Level::Mid;
  Level anxiety = Level::Mid;
};

struct SynthSpec {
  int speakers_per_class = 10;
  int clips_per_speaker = 5;
  int sample_rate = 16000;
  double clip_seconds = 2.5;
  std::uint64_t seed = 0;
  std::vector<ClassProfile> classes;
};

// Three well-separated classes: low-pitched slow noisy voices for the severe
// end, clear high-pitched ones for the recovered end.
inline SynthSpec default_synth_spec() {
  SynthSpec spec;
  spec.classes = {
      {"severe", 80.0, 120.0, 0.20, 0.40, 0.50, -25.0, 1, 25,
       Level::Low, Level::High, Level::High},
      {"moderate", 150.0, 190.0, 0.30, 0.60, 0.25, -35.0, 26, 50,
       Level::Mid, Level::Mid, Level::Mid},
      {"recovered", 220.0, 280.0, 0.50, 0.80, 0.10, -50.0, 51, 80,
       Level::High, Level::Low, Level::Low},
  };
  return spec;
}

namespace detail {

// Two-pole resonator (formant filter).
struct Resonator {
  double a1 = 0.0, a2 = 0.0, y1 = 0.0, y2 = 0.0, gain = 1.0;

  Resonator(double freq_hz, double bw_hz, int sample_rate) {
    const double pi = 3.14159265358979323846;
    const double r = std::exp(-pi * bw_hz / sample_rate);
    a1 = 2.0 * r * std::cos(2.0 * pi * freq_hz / sample_rate);
    a2 = -r * r;
    gain = 1.0 - r;  // rough level control
  }

  double process(double x) {
    const double y = gain * x + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

// One pulse-train "vowel phrase" clip for (class, speaker, clip).
inline AudioClip synth_clip(const SynthSpec& spec, const ClassProfile& profile,
                            Rng& rng) {
  const int fs = spec.sample_rate;
  const double duration = spec.clip_seconds * rng.uniform(0.9, 1.15);
  const auto n = static_cast<std::size_t>(duration * fs);
  AudioClip clip;
  clip.sample_rate = fs;
  clip.channels = 1;
  clip.samples.assign(n, 0.0);

  // speaker/clip pitch stays inside the class band with margin
  const double band = profile.f0_high - profile.f0_low;
  const double f0_center = rng.uniform(profile.f0_low + 0.15 * band,
                                       profile.f0_high - 0.15 * band);
  const double amp = rng.uniform(profile.amp_low, profile.amp_high);

  // phrase layout: voiced spans separated by pauses
  const double lead = rng.uniform(0.25, 0.40);
  const double tail = rng.uniform(0.25, 0.40);
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  double t = lead;
  const double speech_end = duration - tail;
  while (t < speech_end - 0.2) {
    const double span_len = std::min(rng.uniform(0.4, 0.9), speech_end - t);
    spans.emplace_back(static_cast<std::size_t>(t * fs),
                       static_cast<std::size_t>((t + span_len) * fs));
    t += span_len;
    if (profile.pause_rate > 0.0 && rng.uniform() < profile.pause_rate * span_len) {
      t += rng.uniform(0.15, 0.35);
    }
  }
  if (spans.empty()) {
    spans.emplace_back(static_cast<std::size_t>(lead * fs),
                       static_cast<std::size_t>(speech_end * fs));
  }

  // per-speaker formants around schwa-ish targets
  Resonator f1(rng.uniform(550.0, 750.0), 90.0, fs);
  Resonator f2(rng.uniform(1050.0, 1350.0), 120.0, fs);

  for (const auto& [begin, end] : spans) {
    if (end <= begin || end > n) continue;
    const std::size_t len = end - begin;
    std::vector<double> voiced(len, 0.0);

    // glottal source: impulse train with mild period/amplitude perturbation
    double pos = 0.0;
    while (pos < static_cast<double>(len)) {
      const double vibrato = 1.0 + 0.015 * std::sin(2.0 * 3.14159265358979323846 *
                                                    5.0 * pos / fs);
      const double f0 = f0_center * vibrato * (1.0 + 0.003 * rng.gaussian());
      const double period = fs / f0;
      const auto idx = static_cast<std::size_t>(pos);
      if (idx < len) voiced[idx] = 1.0 * (1.0 + 0.04 * rng.gaussian());
      pos += period;
    }
    for (std::size_t i = 0; i < len; ++i) {
      voiced[i] = f2.process(f1.process(voiced[i]));
    }
    double peak = 0.0;
    for (double v : voiced) peak = std::max(peak, std::abs(v));
    const double scale = peak > 1e-9 ? amp / peak : 0.0;
    // short fade to avoid clicks at span edges
    const std::size_t fade = std::min<std::size_t>(len / 10, static_cast<std::size_t>(0.02 * fs));
    for (std::size_t i = 0; i < len; ++i) {
      double env = 1.0;
      if (i < fade) env = static_cast<double>(i) / static_cast<double>(fade);
      if (len - 1 - i < fade) {
        env = std::min(env, static_cast<double>(len - 1 - i) / static_cast<double>(fade));
      }
      clip.samples[begin + i] += scale * env * voiced[i];
    }
  }

  const double noise_rms = std::pow(10.0, profile.noise_floor_db / 20.0);
  for (auto& s : clip.samples) {
    s += noise_rms * rng.gaussian();
    s = std::clamp(s, -0.98, 0.98);
  }
  return clip;
}

}  // namespace detail

struct GeneratedCorpus {
  std::string manifest_path;
  std::vector<RecordingMeta> rows;
};

// Writes the synthetic corpus: one WAV per (class, speaker, clip) plus a
// manifest whose labels are functions of the generating class. Everything is
// derived from the seed, so a rerun is byte-identical.
inline GeneratedCorpus generate_corpus(const SynthSpec& spec, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoFailure("cannot create output dir '" + out_dir + "'");

  GeneratedCorpus result;
  for (std::size_t cls = 0; cls < spec.classes.size(); ++cls) {
    const ClassProfile& profile = spec.classes[cls];
    for (int spk = 0; spk < spec.speakers_per_class; ++spk) {
      char speaker_buf[32];
      std::snprintf(speaker_buf, sizeof(speaker_buf), "c%zus%02d", cls, spk);
      const std::string speaker_id = speaker_buf;

      Rng spk_rng = Rng::derive(spec.seed, 1000 + cls, static_cast<std::uint64_t>(spk));
      const bool skip_body_stats = spk % 7 == 3;  // mirror missing demographics
      const std::string gender = spk % 2 == 0 ? "f" : "m";
      const int age = static_cast<int>(spk_rng.uniform_int(45, 80));
      const double height = spk_rng.uniform(152.0, 185.0);
      const double weight = spk_rng.uniform(50.0, 90.0);
      const int days = static_cast<int>(
          spk_rng.uniform_int(profile.days_low, profile.days_high));

      for (int c = 0; c < spec.clips_per_speaker; ++c) {
        Rng rng = Rng::derive(spec.seed, (cls * 1000 + static_cast<std::size_t>(spk)) * 100,
                              static_cast<std::uint64_t>(c) + 1);
        const AudioClip clip = detail::synth_clip(spec, profile, rng);

        char file_buf[64];
        std::snprintf(file_buf, sizeof(file_buf), "%s_clip%d.wav", speaker_id.c_str(), c + 1);
        const std::string filename = file_buf;
        save_wav_pcm16((fs::path(out_dir) / filename).string(), clip);

        RecordingMeta m;
        m.recording_id = speaker_id + "_r" + std::to_string(c + 1);
        m.path = filename;  // relative to the manifest directory
        m.speaker_id = speaker_id;
        m.sentence_id = c % 5 + 1;
        m.days_in_hospital = days;
        m.sleep = profile.sleep;
        m.fatigue = profile.fatigue;
        m.anxiety = profile.anxiety;
        m.gender = gender;
        m.age = age;
        if (!skip_body_stats) {
          m.height_cm = std::round(height * 10.0) / 10.0;
          m.weight_kg = std::round(weight * 10.0) / 10.0;
        }
        result.rows.push_back(std::move(m));
      }
    }
  }

  result.manifest_path = (fs::path(out_dir) / "manifest.csv").string();
  write_manifest(result.manifest_path, result.rows);
  return result;
}

// Resolves a manifest-relative recording path against the manifest location.
inline std::string resolve_recording_path(const std::string& manifest_path,
                                          const std::string& recording_path) {
  namespace fs = std::filesystem;
  fs::path p(recording_path);
  if (p.is_absolute()) return recording_path;
  return (fs::path(manifest_path).parent_path() / p).string();
}

}  // namespace vocalics
