#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "test_helpers.hpp"
#include "vocalics/evaluation.hpp"
#include "vocalics/serialize.hpp"
#include "vocalics/spectrogram.hpp"

using namespace vocalics;

namespace {

RecordingMeta meta_row(const std::string& id, const std::string& speaker, int days,
                       Level sleep = Level::Mid, Level fatigue = Level::Mid,
                       Level anxiety = Level::Mid) {
  RecordingMeta m;
  m.recording_id = id;
  m.path = id + ".wav";
  m.speaker_id = speaker;
  m.sentence_id = 1;
  m.days_in_hospital = days;
  m.sleep = sleep;
  m.fatigue = fatigue;
  m.anxiety = anxiety;
  return m;
}

// Separable synthetic features: one informative dimension per class plus noise.
struct FakeData {
  FeatureTable features;
  std::vector<RecordingMeta> meta;
};

FakeData fake_corpus(std::size_t speakers_per_class, std::size_t clips_per_speaker,
                     double noise, std::uint64_t seed) {
  const std::vector<int> class_days = {10, 40, 70};  // high / mid / low
  Rng rng(seed);
  FakeData d;
  d.features.feature_names = {"x0", "x1", "x2", "x3"};
  std::vector<double> values;
  for (std::size_t cls = 0; cls < class_days.size(); ++cls) {
    for (std::size_t spk = 0; spk < speakers_per_class; ++spk) {
      const std::string speaker = "c" + std::to_string(cls) + "s" + std::to_string(spk);
      const double speaker_shift = 0.3 * rng.gaussian();
      for (std::size_t clip = 0; clip < clips_per_speaker; ++clip) {
        const std::string id = speaker + "_r" + std::to_string(clip);
        d.meta.push_back(meta_row(id, speaker, class_days[cls]));
        d.features.recording_ids.push_back(id);
        for (std::size_t f = 0; f < 4; ++f) {
          const double signal = f == cls ? 4.0 : 0.0;
          values.push_back(signal + speaker_shift + noise * rng.gaussian());
        }
      }
    }
  }
  d.features.values.rows = d.features.recording_ids.size();
  d.features.values.cols = 4;
  d.features.values.data = std::move(values);
  return d;
}

}  // namespace

TEST_CASE("severity_from_days implements the day bands") {
  REQUIRE(severity_from_days(12) == Level::High);
  REQUIRE(severity_from_days(30) == Level::Mid);
  REQUIRE(severity_from_days(60) == Level::Low);
  // boundary pinning: <=25 high, <=50 mid
  REQUIRE(severity_from_days(1) == Level::High);
  REQUIRE(severity_from_days(25) == Level::High);
  REQUIRE(severity_from_days(26) == Level::Mid);
  REQUIRE(severity_from_days(50) == Level::Mid);
  REQUIRE(severity_from_days(51) == Level::Low);
  REQUIRE_THROWS_AS(severity_from_days(0), NonPositiveDays);
  REQUIRE_THROWS_AS(severity_from_days(-3), NonPositiveDays);
}

TEST_CASE("make_loso_folds: 51 speakers / 260 instances") {
  std::vector<RecordingMeta> meta;
  std::size_t made = 0;
  for (int spk = 0; spk < 51; ++spk) {
    const std::string speaker = "p" + std::to_string(spk);
    const int clips = spk == 0 ? 5 : (made + 5 * (50 - spk) < 255 ? 6 : 5);
    for (int c = 0; c < clips && made < 260; ++c, ++made) {
      meta.push_back(meta_row(speaker + "_" + std::to_string(c), speaker, 10));
    }
  }
  while (made < 260) {
    meta.push_back(meta_row("p50_x" + std::to_string(made), "p50", 10));
    ++made;
  }
  REQUIRE(meta.size() == 260);

  const CvPlan plan = make_loso_folds(meta);
  REQUIRE(plan.folds.size() == 51);

  std::set<std::size_t> covered;
  for (const auto& fold : plan.folds) {
    std::set<std::string> train_speakers, test_speakers;
    for (auto i : fold.test_indices) {
      REQUIRE(covered.insert(i).second);  // each instance in exactly one test fold
      test_speakers.insert(meta[i].speaker_id);
    }
    for (auto i : fold.train_indices) train_speakers.insert(meta[i].speaker_id);
    REQUIRE(test_speakers == std::set<std::string>{fold.speaker});
    REQUIRE(train_speakers.count(fold.speaker) == 0);
    REQUIRE(fold.test_indices.size() + fold.train_indices.size() == meta.size());
  }
  REQUIRE(covered.size() == 260);
}

TEST_CASE("make_loso_folds: a 5-recording speaker gets a 5-instance test fold") {
  std::vector<RecordingMeta> meta;
  for (int c = 0; c < 5; ++c) meta.push_back(meta_row("a" + std::to_string(c), "spk_a", 10));
  for (int c = 0; c < 3; ++c) meta.push_back(meta_row("b" + std::to_string(c), "spk_b", 10));
  const CvPlan plan = make_loso_folds(meta);
  REQUIRE(plan.folds.size() == 2);
  REQUIRE(plan.folds[0].speaker == "spk_a");
  REQUIRE(plan.folds[0].test_indices.size() == 5);
  REQUIRE(plan.folds[1].test_indices.size() == 3);
}

TEST_CASE("make_loso_folds rejects a single speaker") {
  std::vector<RecordingMeta> meta = {meta_row("a", "only", 10), meta_row("b", "only", 10)};
  REQUIRE_THROWS_AS(make_loso_folds(meta), TooFewSpeakers);
}

TEST_CASE("metrics: perfect diagonal gives 1.0 everywhere") {
  ConfusionMatrix conf({"a", "b", "c"});
  conf.add("a", "a");
  conf.add("b", "b");
  conf.add("b", "b");
  conf.add("c", "c");
  const MetricSet m = metrics(conf);
  REQUIRE(m.uar == Catch::Approx(1.0));
  REQUIRE(m.war == Catch::Approx(1.0));
  REQUIRE(m.f1_macro == Catch::Approx(1.0));
  REQUIRE(m.excluded_classes.empty());
}

TEST_CASE("metrics: the [[1,1],[0,2]] hand case") {
  ConfusionMatrix conf({"a", "b"});
  conf.add("a", "a");
  conf.add("a", "b");
  conf.add("b", "b");
  conf.add("b", "b");
  const MetricSet m = metrics(conf);
  REQUIRE(m.uar == Catch::Approx(0.75).margin(1e-12));
  REQUIRE(m.war == Catch::Approx(0.75).margin(1e-12));
  // per-class F1: (2/3, 0.8) -> macro 11/15
  REQUIRE(m.f1_macro == Catch::Approx(11.0 / 15.0).margin(1e-12));
}

TEST_CASE("metrics: zero-true-instance classes are excluded and flagged") {
  ConfusionMatrix conf({"a", "b", "ghost"});
  conf.add("a", "a");
  conf.add("b", "ghost");
  const MetricSet m = metrics(conf);
  REQUIRE(m.excluded_classes == std::vector<std::string>{"ghost"});
  REQUIRE(m.uar == Catch::Approx(0.5));  // recalls 1 and 0
}

TEST_CASE("metrics: empty matrix fails") {
  ConfusionMatrix conf({"a", "b"});
  REQUIRE_THROWS_AS(metrics(conf), EmptyMatrix);
}

TEST_CASE("metrics match a brute-force definitional oracle on random matrices") {
  Rng rng(404);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = static_cast<std::size_t>(rng.uniform_int(2, 5));
    std::vector<std::string> classes;
    for (std::size_t i = 0; i < k; ++i) classes.push_back("c" + std::to_string(i));
    ConfusionMatrix conf(classes);
    bool any = false;
    for (std::size_t t = 0; t < k; ++t) {
      if (rng.uniform() < 0.15) continue;  // sometimes a class has no instances
      for (std::size_t p = 0; p < k; ++p) {
        const auto n = static_cast<std::size_t>(rng.uniform_int(0, 9));
        for (std::size_t rep = 0; rep < n; ++rep) conf.add(classes[t], classes[p]);
        any = any || n > 0;
      }
    }
    if (!any) continue;

    // independent recomputation straight from the definitions
    double recall_sum = 0.0, f1_sum = 0.0, f1w_sum = 0.0;
    std::size_t present = 0, total = 0, diag = 0;
    for (std::size_t t = 0; t < k; ++t) {
      for (std::size_t p = 0; p < k; ++p) total += conf.at(t, p);
    }
    for (std::size_t c = 0; c < k; ++c) {
      std::size_t row = 0, col = 0;
      for (std::size_t j = 0; j < k; ++j) {
        row += conf.at(c, j);
        col += conf.at(j, c);
      }
      diag += conf.at(c, c);
      if (row == 0) continue;
      ++present;
      const double rec = double(conf.at(c, c)) / double(row);
      const double prec = col > 0 ? double(conf.at(c, c)) / double(col) : 0.0;
      const double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
      recall_sum += rec;
      f1_sum += f1;
      f1w_sum += f1 * double(row) / double(total);
    }
    const MetricSet m = metrics(conf);
    REQUIRE(std::abs(m.uar - recall_sum / double(present)) <= 1e-12);
    REQUIRE(std::abs(m.war - double(diag) / double(total)) <= 1e-12);
    REQUIRE(std::abs(m.f1_macro - f1_sum / double(present)) <= 1e-12);
    REQUIRE(std::abs(m.f1_weighted - f1w_sum) <= 1e-12);
  }
}

TEST_CASE("run_loso: default grid has 8 entries and separable data scores high") {
  const FakeData d = fake_corpus(4, 3, 0.4, 77);
  const EvalReport report = run_loso(d.features, d.meta, Task::Severity);
  REQUIRE(report.entries.size() == 8);
  REQUIRE(report.entries.front().c == 1e-7);
  REQUIRE(report.entries.back().c == 1.0);
  REQUIRE(report.entries[report.best_index].metric.uar >= 0.9);
  REQUIRE(report.fold_audits.size() == 12);
  // every instance predicted exactly once per C
  for (const auto& entry : report.entries) {
    REQUIRE(entry.predictions.size() == d.features.recording_ids.size());
  }
}

TEST_CASE("run_loso: best C attains the maximum UAR with smallest-C tie break") {
  const FakeData d = fake_corpus(3, 3, 0.5, 99);
  const EvalReport report = run_loso(d.features, d.meta, Task::Severity);
  double best = -1.0;
  for (const auto& entry : report.entries) best = std::max(best, entry.metric.uar);
  REQUIRE(report.entries[report.best_index].metric.uar == best);
  for (const auto& entry : report.entries) {
    if (entry.metric.uar == best) {
      REQUIRE(report.best_c <= entry.c);
    }
  }
}

TEST_CASE("run_loso: permuted labels fall to chance") {
  FakeData d = fake_corpus(4, 3, 0.4, 31);
  // permute days (and hence severity labels) across rows with a fixed seed
  Rng rng(555);
  for (std::size_t i = d.meta.size() - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)));
    std::swap(d.meta[i].days_in_hospital, d.meta[j].days_in_hospital);
  }
  const EvalReport report = run_loso(d.features, d.meta, Task::Severity);
  const double uar = report.entries[report.best_index].metric.uar;
  REQUIRE(uar >= 0.15);
  REQUIRE(uar <= 0.55);
}

TEST_CASE("run_loso: fold training statistics ignore test-fold corruption") {
  const FakeData clean = fake_corpus(3, 3, 0.4, 52);
  const EvalReport base = run_loso(clean.features, clean.meta, Task::Severity, {1e-3});

  // corrupt every feature of one speaker's rows (fold 'c1s1')
  FakeData dirty = clean;
  std::size_t corrupted_fold = 0;
  for (std::size_t f = 0; f < base.fold_audits.size(); ++f) {
    if (base.fold_audits[f].speaker == "c1s1") corrupted_fold = f;
  }
  for (std::size_t r = 0; r < dirty.features.recording_ids.size(); ++r) {
    if (dirty.meta[r].speaker_id == "c1s1") {
      for (std::size_t c = 0; c < dirty.features.values.cols; ++c) {
        dirty.features.values.at(r, c) = 1e6 + static_cast<double>(r + c);
      }
    }
  }
  const EvalReport poisoned = run_loso(dirty.features, dirty.meta, Task::Severity, {1e-3});

  REQUIRE(poisoned.fold_audits[corrupted_fold].train_stats_checksum ==
          base.fold_audits[corrupted_fold].train_stats_checksum);
  // other folds train on the corrupted rows, so their stats must move
  bool someone_changed = false;
  for (std::size_t f = 0; f < base.fold_audits.size(); ++f) {
    if (f != corrupted_fold &&
        poisoned.fold_audits[f].train_stats_checksum !=
            base.fold_audits[f].train_stats_checksum) {
      someone_changed = true;
    }
  }
  REQUIRE(someone_changed);
}

TEST_CASE("run_loso: single-class training partition propagates cleanly") {
  // two speakers, one label each: every fold trains on a single class
  FeatureTable features;
  features.feature_names = {"x"};
  features.recording_ids = {"a1", "a2", "b1", "b2"};
  features.values = Matrix(4, 1);
  for (std::size_t r = 0; r < 4; ++r) features.values.at(r, 0) = static_cast<double>(r);
  std::vector<RecordingMeta> meta = {
      meta_row("a1", "spk_a", 10), meta_row("a2", "spk_a", 10),
      meta_row("b1", "spk_b", 60), meta_row("b2", "spk_b", 60)};
  REQUIRE_THROWS_AS(run_loso(features, meta, Task::Severity, {1e-3}, 2), Error);
}

TEST_CASE("run_loso: misaligned features raise") {
  FakeData d = fake_corpus(2, 2, 0.4, 5);
  d.features.recording_ids[0] = "missing_from_manifest";
  REQUIRE_THROWS_AS(run_loso(d.features, d.meta, Task::Severity, {1e-3}),
                    MisalignedManifest);
}

TEST_CASE("run_loso: manifest rows without features produce a warning") {
  FakeData d = fake_corpus(2, 2, 0.4, 6);
  d.meta.push_back(meta_row("extra_row", "c0s0", 10));
  const EvalReport report = run_loso(d.features, d.meta, Task::Severity, {1e-3});
  REQUIRE_FALSE(report.warnings.empty());
}

TEST_CASE("run_loso report serialization is byte-stable across reruns") {
  const FakeData d = fake_corpus(3, 2, 0.4, 10);
  const std::string dir = testutil::scratch_dir("eval_repro");
  const EvalReport r1 = run_loso(d.features, d.meta, Task::Severity, {}, 1, "TEST");
  const EvalReport r2 = run_loso(d.features, d.meta, Task::Severity, {}, 3, "TEST");
  save_report(dir + "/r1.json", r1);
  save_report(dir + "/r2.json", r2);
  REQUIRE(testutil::read_bytes(dir + "/r1.json") == testutil::read_bytes(dir + "/r2.json"));
}

TEST_CASE("run_loso works on the sleep/fatigue/anxiety label fields") {
  FakeData d = fake_corpus(3, 2, 0.4, 12);
  // tie the three self-report labels to the class encoded in the speaker id
  for (auto& m : d.meta) {
    const int cls = m.speaker_id[1] - '0';
    m.sleep = cls == 0 ? Level::Low : cls == 1 ? Level::Mid : Level::High;
    m.fatigue = cls == 0 ? Level::High : cls == 1 ? Level::Mid : Level::Low;
    m.anxiety = cls == 0 ? Level::High : cls == 1 ? Level::Mid : Level::Low;
  }
  for (Task task : {Task::Sleep, Task::Fatigue, Task::Anxiety}) {
    const EvalReport report = run_loso(d.features, d.meta, task, {1e-2});
    REQUIRE(report.entries[0].metric.uar >= 0.9);
  }
}

TEST_CASE("spectrogram: 440 Hz tone dominates the right bin") {
  const Spectrogram sg = compute_spectrogram(testutil::sine(440.0, 1.0));
  REQUIRE(sg.n_bins == 257);  // 512-point FFT
  const auto expected_bin = static_cast<std::size_t>(std::lround(440.0 / sg.bin_hz));
  for (std::size_t f = 0; f < sg.n_frames; ++f) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < sg.n_bins; ++k) {
      if (sg.at(f, k) > sg.at(f, best)) best = k;
    }
    REQUIRE(best == expected_bin);
  }
}

TEST_CASE("spectrogram: silence sits at the floor; dims follow the framing") {
  const AudioClip clip = testutil::silence(1.0);
  const Spectrogram sg = compute_spectrogram(clip);
  const std::size_t expected_frames = (16000 - 400) / 160 + 1;
  REQUIRE(sg.n_frames == expected_frames);
  for (double v : sg.db) REQUIRE(v == kSpectrogramFloorDb);
}

TEST_CASE("spectrogram files are written") {
  const std::string dir = testutil::scratch_dir("spectrogram_io");
  const Spectrogram sg = compute_spectrogram(testutil::sine(440.0, 0.5));
  write_spectrogram_pgm(dir + "/sg.pgm", sg);
  write_spectrogram_csv(dir + "/sg.csv", sg);
  const auto pgm = testutil::read_bytes(dir + "/sg.pgm");
  REQUIRE(pgm.size() > sg.n_frames * sg.n_bins);
  REQUIRE(pgm[0] == 'P');
  REQUIRE(pgm[1] == '5');
}
