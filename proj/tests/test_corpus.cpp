#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <map>

#include "test_helpers.hpp"
#include "vocalics/corpus.hpp"
#include "vocalics/pitch.hpp"
#include "vocalics/util.hpp"

using namespace vocalics;

namespace {

std::string write_file(const std::string& dir, const std::string& name,
                       const std::string& content) {
  const std::string path = dir + "/" + name;
  std::ofstream(path, std::ios::binary) << content;
  return path;
}

}  // namespace

TEST_CASE("parse_manifest maps fields and tolerates missing demographics") {
  const std::string dir = testutil::scratch_dir("manifest_basic");
  const std::string path = write_file(
      dir, "m.csv",
      "recording_id,path,speaker_id,sentence_id,days_in_hospital,sleep,fatigue,anxiety,gender,age,height,weight\n"
      "r1,\"a.wav\",spk07,3,12,low,mid,high,f,64,158.5,59\n"
      "r2,\"b.wav\",spk07,4,12,LOW,Mid,HIGH,,,,\n");
  const auto rows = parse_manifest(path);
  REQUIRE(rows.size() == 2);
  REQUIRE(rows[0].recording_id == "r1");
  REQUIRE(rows[0].path == "a.wav");
  REQUIRE(rows[0].speaker_id == "spk07");
  REQUIRE(rows[0].sentence_id == 3);
  REQUIRE(rows[0].days_in_hospital == 12);
  REQUIRE(rows[0].sleep == Level::Low);
  REQUIRE(rows[0].fatigue == Level::Mid);
  REQUIRE(rows[0].anxiety == Level::High);
  REQUIRE(rows[0].age.has_value());
  REQUIRE(*rows[0].height_cm == 158.5);
  // levels are case-insensitive, demographics optional
  REQUIRE(rows[1].sleep == Level::Low);
  REQUIRE_FALSE(rows[1].age.has_value());
  REQUIRE_FALSE(rows[1].height_cm.has_value());
  REQUIRE_FALSE(rows[1].weight_kg.has_value());
}

TEST_CASE("parse_manifest validation errors") {
  const std::string dir = testutil::scratch_dir("manifest_bad");
  const std::string header =
      "recording_id,path,speaker_id,sentence_id,days_in_hospital,sleep,fatigue,anxiety,gender,age,height,weight\n";

  REQUIRE_THROWS_AS(
      parse_manifest(write_file(dir, "dup.csv",
                                header + "r1,a.wav,s1,1,10,low,low,low,,,,\n"
                                         "r1,b.wav,s2,2,10,low,low,low,,,,\n")),
      DuplicateId);

  REQUIRE_THROWS_AS(
      parse_manifest(write_file(dir, "missing.csv",
                                "recording_id,path,speaker_id,sentence_id,days_in_hospital,sleep,fatigue\n"
                                "r1,a.wav,s1,1,10,low,low\n")),
      MissingColumn);

  REQUIRE_THROWS_AS(
      parse_manifest(write_file(dir, "level.csv",
                                header + "r1,a.wav,s1,1,10,never,low,low,,,,\n")),
      BadLevel);

  REQUIRE_THROWS_AS(
      parse_manifest(write_file(dir, "sentence.csv",
                                header + "r1,a.wav,s1,9,10,low,low,low,,,,\n")),
      BadSentenceId);

  REQUIRE_THROWS_AS(
      parse_manifest(write_file(dir, "days.csv",
                                header + "r1,a.wav,s1,1,0,low,low,low,,,,\n")),
      NonPositiveDays);
}

TEST_CASE("a 260-row 51-speaker manifest with imbalanced sentences parses") {
  // sentence distribution 53/47/60/51/49 = 260
  const std::vector<int> per_sentence = {53, 47, 60, 51, 49};
  std::vector<RecordingMeta> rows;
  int made = 0;
  for (int s = 0; s < 5; ++s) {
    for (int i = 0; i < per_sentence[static_cast<std::size_t>(s)]; ++i, ++made) {
      RecordingMeta m;
      m.recording_id = "r" + std::to_string(made);
      m.path = m.recording_id + ".wav";
      m.speaker_id = "p" + std::to_string(made % 51);
      m.sentence_id = s + 1;
      m.days_in_hospital = made % 80 + 1;
      m.sleep = Level::Low;
      m.fatigue = Level::Mid;
      m.anxiety = Level::High;
      rows.push_back(m);
    }
  }
  REQUIRE(rows.size() == 260);

  const std::string dir = testutil::scratch_dir("manifest_260");
  write_manifest(dir + "/m.csv", rows);
  const auto parsed = parse_manifest(dir + "/m.csv");
  REQUIRE(parsed.size() == 260);
  std::map<int, int> counts;
  std::set<std::string> speakers;
  for (const auto& m : parsed) {
    counts[m.sentence_id]++;
    speakers.insert(m.speaker_id);
  }
  REQUIRE(speakers.size() == 51);
  REQUIRE(counts[1] == 53);
  REQUIRE(counts[3] == 60);
}

TEST_CASE("manifest round trip preserves every field") {
  const std::string dir = testutil::scratch_dir("manifest_rt");
  Rng rng(71);
  std::vector<RecordingMeta> rows;
  for (int i = 0; i < 25; ++i) {
    RecordingMeta m;
    m.recording_id = "rec" + std::to_string(i);
    m.path = "audio, files/clip " + std::to_string(i) + ".wav";  // comma in path
    m.speaker_id = "spk" + std::to_string(i / 3);
    m.sentence_id = i % 5 + 1;
    m.days_in_hospital = static_cast<int>(rng.uniform_int(1, 80));
    m.sleep = static_cast<Level>(rng.uniform_int(0, 2));
    m.fatigue = static_cast<Level>(rng.uniform_int(0, 2));
    m.anxiety = static_cast<Level>(rng.uniform_int(0, 2));
    if (i % 3 != 0) {
      m.gender = i % 2 ? "m" : "f";
      m.age = static_cast<int>(rng.uniform_int(40, 85));
      m.height_cm = std::round(rng.uniform(150.0, 190.0) * 10.0) / 10.0;
      m.weight_kg = std::round(rng.uniform(45.0, 95.0) * 10.0) / 10.0;
    }
    rows.push_back(m);
  }
  write_manifest(dir + "/m.csv", rows);
  const auto parsed = parse_manifest(dir + "/m.csv");
  REQUIRE(parsed.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    REQUIRE(parsed[i].recording_id == rows[i].recording_id);
    REQUIRE(parsed[i].path == rows[i].path);
    REQUIRE(parsed[i].speaker_id == rows[i].speaker_id);
    REQUIRE(parsed[i].sentence_id == rows[i].sentence_id);
    REQUIRE(parsed[i].days_in_hospital == rows[i].days_in_hospital);
    REQUIRE(parsed[i].sleep == rows[i].sleep);
    REQUIRE(parsed[i].fatigue == rows[i].fatigue);
    REQUIRE(parsed[i].anxiety == rows[i].anxiety);
    REQUIRE(parsed[i].gender == rows[i].gender);
    REQUIRE(parsed[i].age == rows[i].age);
    REQUIRE(parsed[i].height_cm == rows[i].height_cm);
    REQUIRE(parsed[i].weight_kg == rows[i].weight_kg);
  }
}

TEST_CASE("generate_corpus: counts, labels, and day ranges follow the spec") {
  SynthSpec spec = default_synth_spec();
  spec.speakers_per_class = 2;
  spec.clips_per_speaker = 3;
  spec.clip_seconds = 1.2;
  spec.seed = 11;
  const std::string dir = testutil::scratch_dir("gen_counts");
  const GeneratedCorpus corpus = generate_corpus(spec, dir);

  REQUIRE(corpus.rows.size() == 3 * 2 * 3);
  std::size_t wavs = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".wav") ++wavs;
  }
  REQUIRE(wavs == corpus.rows.size());

  for (const auto& m : corpus.rows) {
    // class index is embedded in the speaker id: c<cls>s<nn>
    const auto cls = static_cast<std::size_t>(m.speaker_id[1] - '0');
    const ClassProfile& p = spec.classes[cls];
    REQUIRE(m.days_in_hospital >= p.days_low);
    REQUIRE(m.days_in_hospital <= p.days_high);
    REQUIRE(m.sleep == p.sleep);
    REQUIRE(m.fatigue == p.fatigue);
    REQUIRE(m.anxiety == p.anxiety);
    REQUIRE(m.sentence_id >= 1);
    REQUIRE(m.sentence_id <= 5);
    REQUIRE(std::filesystem::exists(std::filesystem::path(dir) / m.path));
  }
}

TEST_CASE("generate_corpus is byte-identical for the same seed") {
  SynthSpec spec = default_synth_spec();
  spec.speakers_per_class = 1;
  spec.clips_per_speaker = 2;
  spec.clip_seconds = 1.0;
  spec.seed = 42;

  const std::string dir1 = testutil::scratch_dir("gen_seed_a");
  const std::string dir2 = testutil::scratch_dir("gen_seed_b");
  const GeneratedCorpus c1 = generate_corpus(spec, dir1);
  const GeneratedCorpus c2 = generate_corpus(spec, dir2);

  for (const auto& m : c1.rows) {
    const auto b1 = testutil::read_bytes(dir1 + "/" + m.path);
    const auto b2 = testutil::read_bytes(dir2 + "/" + m.path);
    REQUIRE_FALSE(b1.empty());
    REQUIRE(b1 == b2);
  }
  REQUIRE(testutil::read_bytes(c1.manifest_path) == testutil::read_bytes(c2.manifest_path));

  SECTION("a different seed changes the audio") {
    SynthSpec other = spec;
    other.seed = 43;
    const std::string dir3 = testutil::scratch_dir("gen_seed_c");
    const GeneratedCorpus c3 = generate_corpus(other, dir3);
    REQUIRE(testutil::read_bytes(dir1 + "/" + c1.rows[0].path) !=
            testutil::read_bytes(dir3 + "/" + c3.rows[0].path));
  }
}

TEST_CASE("generated classes separate by median F0 with zero overlap") {
  SynthSpec spec = default_synth_spec();
  spec.speakers_per_class = 2;
  spec.clips_per_speaker = 2;
  spec.clip_seconds = 1.5;
  spec.seed = 3;
  const std::string dir = testutil::scratch_dir("gen_f0");
  const GeneratedCorpus corpus = generate_corpus(spec, dir);

  std::map<std::size_t, std::vector<double>> class_medians;
  for (const auto& m : corpus.rows) {
    const AudioClip clip = load_wav(resolve_recording_path(corpus.manifest_path, m.path));
    const PitchTrack track = compute_f0_voicing(clip);
    std::vector<double> f0;
    for (std::size_t i = 0; i < track.f0.size(); ++i) {
      if (track.voiced[i]) f0.push_back(track.f0[i]);
    }
    REQUIRE_FALSE(f0.empty());
    const auto cls = static_cast<std::size_t>(m.speaker_id[1] - '0');
    class_medians[cls].push_back(testutil::median(f0));
  }
  // every clip's median inside its class band
  for (const auto& [cls, medians] : class_medians) {
    for (double med : medians) {
      REQUIRE(med >= spec.classes[cls].f0_low - 5.0);
      REQUIRE(med <= spec.classes[cls].f0_high + 5.0);
    }
  }
}
