#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vocalics/errors.hpp"
#include "vocalics/evaluation.hpp"
#include "vocalics/svm.hpp"

namespace vocalics {

using ordered_json = nlohmann::ordered_json;

constexpr int kModelFormatVersion = 1;

inline ordered_json model_to_json(const LinearSvmModel& model) {
  ordered_json j;
  j["format_version"] = kModelFormatVersion;
  j["task"] = model.task;
  j["feature_set"] = model.feature_set;
  j["classes"] = model.classes;
  j["c"] = model.C;
  j["feature_names"] = model.feature_names;
  j["standardizer"] = {{"means", model.standardizer.means},
                       {"stds", model.standardizer.stds}};
  ordered_json weights = ordered_json::array();
  for (std::size_t k = 0; k < model.classes.size(); ++k) {
    weights.push_back(model.weights.row_vec(k));
  }
  j["weights"] = weights;
  j["biases"] = model.biases;
  return j;
}

inline LinearSvmModel model_from_json(const ordered_json& j) {
  if (!j.contains("format_version") || j["format_version"].get<int>() != kModelFormatVersion) {
    throw MalformedFile("model file: missing or unsupported format_version");
  }
  LinearSvmModel model;
  model.task = j.at("task").get<std::string>();
  model.feature_set = j.at("feature_set").get<std::string>();
  model.classes = j.at("classes").get<std::vector<std::string>>();
  model.C = j.at("c").get<double>();
  model.feature_names = j.value("feature_names", std::vector<std::string>{});
  model.standardizer.means = j.at("standardizer").at("means").get<std::vector<double>>();
  model.standardizer.stds = j.at("standardizer").at("stds").get<std::vector<double>>();
  model.biases = j.at("biases").get<std::vector<double>>();
  const auto rows = j.at("weights").get<std::vector<std::vector<double>>>();
  if (rows.size() != model.classes.size() || model.biases.size() != rows.size()) {
    throw MalformedFile("model file: weights/biases shape mismatch");
  }
  const std::size_t d = rows.empty() ? 0 : rows[0].size();
  model.weights = Matrix(rows.size(), d);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k].size() != d) throw MalformedFile("model file: ragged weight rows");
    for (std::size_t c = 0; c < d; ++c) model.weights.at(k, c) = rows[k][c];
  }
  return model;
}

inline void save_model(const std::string& path, const LinearSvmModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot write model '" + path + "'");
  out << model_to_json(model).dump(2) << '\n';
  if (!out) throw IoFailure("write failed for model '" + path + "'");
}

inline LinearSvmModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open model '" + path + "'");
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedFile("model '" + path + "': " + e.what());
  }
  return model_from_json(j);
}

inline ordered_json report_to_json(const EvalReport& report) {
  ordered_json j;
  j["task"] = report.task;
  j["feature_set"] = report.feature_set;
  j["best_c"] = report.best_c;
  j["warnings"] = report.warnings;

  ordered_json entries = ordered_json::array();
  for (const auto& entry : report.entries) {
    ordered_json e;
    e["c"] = entry.c;
    e["uar"] = entry.metric.uar;
    e["war"] = entry.metric.war;
    e["f1_macro"] = entry.metric.f1_macro;
    e["f1_weighted"] = entry.metric.f1_weighted;
    e["excluded_classes"] = entry.metric.excluded_classes;
    ordered_json conf;
    conf["classes"] = entry.confusion.classes;
    ordered_json counts = ordered_json::array();
    const std::size_t k = entry.confusion.classes.size();
    for (std::size_t t = 0; t < k; ++t) {
      ordered_json row = ordered_json::array();
      for (std::size_t p = 0; p < k; ++p) row.push_back(entry.confusion.at(t, p));
      counts.push_back(row);
    }
    conf["counts"] = counts;
    e["confusion"] = conf;
    ordered_json preds = ordered_json::array();
    for (const auto& p : entry.predictions) {
      preds.push_back({{"recording_id", p.recording_id},
                       {"true", p.true_label},
                       {"predicted", p.predicted}});
    }
    e["predictions"] = preds;
    entries.push_back(e);
  }
  j["results"] = entries;

  ordered_json audits = ordered_json::array();
  for (const auto& audit : report.fold_audits) {
    audits.push_back({{"speaker", audit.speaker},
                      {"n_train", audit.n_train},
                      {"n_test", audit.n_test},
                      {"train_stats_checksum", audit.train_stats_checksum}});
  }
  j["folds"] = audits;
  return j;
}

inline void save_report(const std::string& path, const EvalReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot write report '" + path + "'");
  out << report_to_json(report).dump(2) << '\n';
  if (!out) throw IoFailure("write failed for report '" + path + "'");
}

}  // namespace vocalics
