#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "vocalics/corpus.hpp"
#include "vocalics/csv.hpp"
#include "vocalics/errors.hpp"
#include "vocalics/matrix.hpp"
#include "vocalics/svm.hpp"
#include "vocalics/util.hpp"

namespace vocalics {

enum class Task { Severity, Sleep, Fatigue, Anxiety };

inline const char* task_name(Task t) {
  switch (t) {
    case Task::Severity: return "severity";
    case Task::Sleep: return "sleep";
    case Task::Fatigue: return "fatigue";
    case Task::Anxiety: return "anxiety";
  }
  return "?";
}

inline Task parse_task(const std::string& s) {
  const std::string v = to_lower(trim_ws(s));
  if (v == "severity") return Task::Severity;
  if (v == "sleep") return Task::Sleep;
  if (v == "fatigue") return Task::Fatigue;
  if (v == "anxiety") return Task::Anxiety;
  throw Error("unknown task '" + s + "' (expected severity|sleep|fatigue|anxiety)");
}

// Day-band severity rule: first 25 days high, 26..50 mid, beyond that low.
inline Level severity_from_days(int days) {
  if (days < 1) throw NonPositiveDays("severity_from_days: days must be >= 1");
  if (days <= 25) return Level::High;
  if (days <= 50) return Level::Mid;
  return Level::Low;
}

inline std::string task_label(const RecordingMeta& m, Task task) {
  switch (task) {
    case Task::Severity: return level_name(severity_from_days(m.days_in_hospital));
    case Task::Sleep: return level_name(m.sleep);
    case Task::Fatigue: return level_name(m.fatigue);
    case Task::Anxiety: return level_name(m.anxiety);
  }
  return "?";
}

// Speaker-independent folds: one per distinct speaker.
struct CvPlan {
  struct Fold {
    std::string speaker;
    std::vector<std::size_t> test_indices;
    std::vector<std::size_t> train_indices;
  };
  std::vector<Fold> folds;
};

inline CvPlan make_loso_folds(const std::vector<std::string>& speaker_ids) {
  std::set<std::string> speakers(speaker_ids.begin(), speaker_ids.end());
  if (speakers.size() < 2) {
    throw TooFewSpeakers("make_loso_folds: need at least 2 distinct speakers");
  }
  CvPlan plan;
  for (const auto& spk : speakers) {
    CvPlan::Fold fold;
    fold.speaker = spk;
    for (std::size_t i = 0; i < speaker_ids.size(); ++i) {
      (speaker_ids[i] == spk ? fold.test_indices : fold.train_indices).push_back(i);
    }
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

inline CvPlan make_loso_folds(const std::vector<RecordingMeta>& meta) {
  std::vector<std::string> speakers(meta.size());
  for (std::size_t i = 0; i < meta.size(); ++i) speakers[i] = meta[i].speaker_id;
  return make_loso_folds(speakers);
}

struct ConfusionMatrix {
  std::vector<std::string> classes;
  std::vector<std::size_t> counts;  // K x K, rows = true, cols = predicted

  explicit ConfusionMatrix(std::vector<std::string> cls = {})
      : classes(std::move(cls)), counts(classes.size() * classes.size(), 0) {}

  std::size_t index_of(const std::string& label) const {
    for (std::size_t k = 0; k < classes.size(); ++k) {
      if (classes[k] == label) return k;
    }
    throw Error("confusion matrix: unknown class '" + label + "'");
  }
  void add(const std::string& true_label, const std::string& predicted) {
    counts[index_of(true_label) * classes.size() + index_of(predicted)]++;
  }
  std::size_t at(std::size_t t, std::size_t p) const {
    return counts[t * classes.size() + p];
  }
  std::size_t total() const {
    std::size_t n = 0;
    for (auto c : counts) n += c;
    return n;
  }
};

struct MetricSet {
  double uar = 0.0;
  double war = 0.0;
  double f1_macro = 0.0;
  double f1_weighted = 0.0;
  std::vector<std::string> excluded_classes;  // no true instances
};

// UAR = mean per-class recall; WAR = trace/total; F1 = macro mean of per-class
// harmonic means (0 where precision+recall is 0). Classes with no true
// instances are excluded from the UAR/F1 averages and flagged.
inline MetricSet metrics(const ConfusionMatrix& conf) {
  const std::size_t k = conf.classes.size();
  const std::size_t total = conf.total();
  if (k == 0 || total == 0) throw EmptyMatrix("metrics: empty confusion matrix");

  MetricSet m;
  double recall_sum = 0.0, f1_sum = 0.0, f1_weighted_sum = 0.0, diag = 0.0;
  std::size_t present = 0;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t row_sum = 0, col_sum = 0;
    for (std::size_t j = 0; j < k; ++j) {
      row_sum += conf.at(c, j);
      col_sum += conf.at(j, c);
    }
    diag += static_cast<double>(conf.at(c, c));
    if (row_sum == 0) {
      m.excluded_classes.push_back(conf.classes[c]);
      continue;
    }
    ++present;
    const double recall = static_cast<double>(conf.at(c, c)) / static_cast<double>(row_sum);
    const double precision =
        col_sum > 0 ? static_cast<double>(conf.at(c, c)) / static_cast<double>(col_sum) : 0.0;
    const double f1 = precision + recall > 0.0
                          ? 2.0 * precision * recall / (precision + recall)
                          : 0.0;
    recall_sum += recall;
    f1_sum += f1;
    f1_weighted_sum += f1 * static_cast<double>(row_sum) / static_cast<double>(total);
  }
  if (present == 0) throw EmptyMatrix("metrics: no class has true instances");
  m.uar = recall_sum / static_cast<double>(present);
  m.war = diag / static_cast<double>(total);
  m.f1_macro = f1_sum / static_cast<double>(present);
  m.f1_weighted = f1_weighted_sum;
  return m;
}

struct Prediction {
  std::string recording_id;
  std::string true_label;
  std::string predicted;
};

struct FoldAudit {
  std::string speaker;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  // FNV-1a over the training standardizer's means and stds; training-side
  // statistics must not move when test-fold data is corrupted
  std::uint64_t train_stats_checksum = 0;
};

struct EvalReport {
  std::string task;
  std::string feature_set;
  struct Entry {
    double c = 0.0;
    MetricSet metric;
    ConfusionMatrix confusion;
    std::vector<Prediction> predictions;  // pooled, fold order
  };
  std::vector<Entry> entries;  // ascending C
  double best_c = 0.0;
  std::size_t best_index = 0;
  std::vector<FoldAudit> fold_audits;
  std::vector<std::string> warnings;
};

inline std::vector<double> default_c_grid() {
  return {1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1e0};
}

// LOSO driver: per C and fold, fit the standardizer and class weights on the
// training partition only, train, predict the held-out speaker, pool all
// predictions into one confusion matrix per C, and pick the best C by UAR
// (ties toward the smaller C).
inline EvalReport run_loso(const FeatureTable& features,
                           const std::vector<RecordingMeta>& meta, Task task,
                           std::vector<double> c_grid = default_c_grid(),
                           int jobs = 1, const std::string& feature_set = "") {
  if (c_grid.empty()) c_grid = default_c_grid();
  std::sort(c_grid.begin(), c_grid.end());

  std::map<std::string, const RecordingMeta*> by_id;
  for (const auto& m : meta) by_id[m.recording_id] = &m;

  const std::size_t n = features.recording_ids.size();
  std::vector<std::string> labels(n), speakers(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = by_id.find(features.recording_ids[i]);
    if (it == by_id.end()) {
      throw MisalignedManifest("feature row '" + features.recording_ids[i] +
                               "' has no manifest entry");
    }
    labels[i] = task_label(*it->second, task);
    speakers[i] = it->second->speaker_id;
  }

  EvalReport report;
  report.task = task_name(task);
  report.feature_set = feature_set;
  if (meta.size() > n) {
    report.warnings.push_back(std::to_string(meta.size() - n) +
                              " manifest row(s) without features were skipped");
  }

  const CvPlan plan = make_loso_folds(speakers);

  std::set<std::string> class_set(labels.begin(), labels.end());
  if (class_set.size() < 2) throw SingleClass("run_loso: task has a single label");
  const std::vector<std::string> classes(class_set.begin(), class_set.end());

  // fold-level artifacts are independent of C: fit once, audit once
  std::vector<Standardizer> fold_std(plan.folds.size());
  std::vector<Matrix> fold_train_x(plan.folds.size()), fold_test_x(plan.folds.size());
  bool missing_class_warned = false;
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    const auto& fold = plan.folds[f];
    const Matrix train_raw = features.values.select_rows(fold.train_indices);
    fold_std[f] = fit_standardizer(train_raw);
    fold_train_x[f] = fold_std[f].transform(train_raw);
    fold_test_x[f] = fold_std[f].transform(features.values.select_rows(fold.test_indices));

    FoldAudit audit;
    audit.speaker = fold.speaker;
    audit.n_train = fold.train_indices.size();
    audit.n_test = fold.test_indices.size();
    audit.train_stats_checksum = fnv1a64(fold_std[f].stds, fnv1a64(fold_std[f].means));
    report.fold_audits.push_back(audit);

    std::set<std::string> train_classes;
    for (std::size_t i : fold.train_indices) train_classes.insert(labels[i]);
    if (train_classes.size() < classes.size() && !missing_class_warned) {
      report.warnings.push_back("fold '" + fold.speaker +
                                "': training partition lacks some class; "
                                "training proceeds with the classes present");
      missing_class_warned = true;
    }
  }

  for (double c_value : c_grid) {
    EvalReport::Entry entry;
    entry.c = c_value;
    entry.confusion = ConfusionMatrix(classes);

    std::vector<std::vector<Prediction>> fold_preds(plan.folds.size());
    std::vector<std::string> fold_errors(plan.folds.size());
    parallel_for(plan.folds.size(), jobs, [&](std::size_t f) {
      try {
        const auto& fold = plan.folds[f];
        std::vector<std::string> train_y(fold.train_indices.size());
        for (std::size_t i = 0; i < fold.train_indices.size(); ++i) {
          train_y[i] = labels[fold.train_indices[i]];
        }
        const auto weights = class_weights(train_y);
        const LinearSvmModel model = fit(fold_train_x[f], train_y, c_value, weights);
        auto& preds = fold_preds[f];
        preds.reserve(fold.test_indices.size());
        for (std::size_t i = 0; i < fold.test_indices.size(); ++i) {
          const std::size_t row = fold.test_indices[i];
          Prediction p;
          p.recording_id = features.recording_ids[row];
          p.true_label = labels[row];
          p.predicted = predict(model, fold_test_x[f].row_vec(i));
          preds.push_back(std::move(p));
        }
      } catch (const std::exception& e) {
        fold_errors[f] = e.what();
      }
    });
    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
      if (!fold_errors[f].empty()) {
        throw Error("fold '" + plan.folds[f].speaker + "': " + fold_errors[f]);
      }
    }

    for (auto& preds : fold_preds) {
      for (auto& p : preds) {
        entry.confusion.add(p.true_label, p.predicted);
        entry.predictions.push_back(std::move(p));
      }
    }
    entry.metric = metrics(entry.confusion);
    report.entries.push_back(std::move(entry));
  }

  report.best_index = 0;
  for (std::size_t e = 1; e < report.entries.size(); ++e) {
    if (report.entries[e].metric.uar > report.entries[report.best_index].metric.uar) {
      report.best_index = e;  // strict >: ties stay with the smaller C
    }
  }
  report.best_c = report.entries[report.best_index].c;
  return report;
}

}  // namespace vocalics
