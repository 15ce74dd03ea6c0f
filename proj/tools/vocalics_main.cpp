// vocalics command-line tool: synthetic corpus generation, acoustic feature
// extraction, LOSO evaluation over a C grid, train/predict, spectrograms.
//
// Exit codes: 0 success, 2 input/config error, 3 I/O error, 4 contract
// mismatch (e.g. model feature set vs requested extraction set).

#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vocalics/vocalics.hpp"

namespace {

using vocalics::AudioClip;
using vocalics::FeatureTable;
using vocalics::FeatureVector;
using vocalics::LldConfig;
using vocalics::RecordingMeta;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitIo = 3;
constexpr int kExitContract = 4;

// key = value lines, '#' comments; unknown keys are rejected
LldConfig load_lld_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw vocalics::IoFailure("cannot open config '" + path + "'");
  LldConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = vocalics::trim_ws(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw vocalics::Error("config '" + path + "' line " + std::to_string(line_no) +
                            ": expected key = value");
    }
    const std::string key = vocalics::trim_ws(line.substr(0, eq));
    const std::string value = vocalics::trim_ws(line.substr(eq + 1));
    if (key == "frame_ms") cfg.frame_ms = std::stod(value);
    else if (key == "hop_ms") cfg.hop_ms = std::stod(value);
    else if (key == "f0_window_ms") cfg.f0_window_ms = std::stod(value);
    else if (key == "fmin") cfg.fmin = std::stod(value);
    else if (key == "fmax") cfg.fmax = std::stod(value);
    else if (key == "n_bands") cfg.n_bands = std::stoi(value);
    else if (key == "n_coeffs") cfg.n_coeffs = std::stoi(value);
    else if (key == "deltas") cfg.deltas = value == "true" || value == "1";
    else if (key == "energy_floor_db") cfg.energy_floor_db = std::stod(value);
    else if (key == "voicing_threshold") cfg.voicing_threshold = std::stod(value);
    else {
      throw vocalics::Error("config '" + path + "' line " + std::to_string(line_no) +
                            ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

vocalics::SynthSpec load_synth_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw vocalics::Error("spec file '" + path + "' does not exist or is unreadable");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw vocalics::Error("spec file '" + path + "': " + e.what());
  }
  vocalics::SynthSpec spec = vocalics::default_synth_spec();
  spec.speakers_per_class = j.value("speakers_per_class", spec.speakers_per_class);
  spec.clips_per_speaker = j.value("clips_per_speaker", spec.clips_per_speaker);
  spec.sample_rate = j.value("sample_rate", spec.sample_rate);
  spec.clip_seconds = j.value("clip_seconds", spec.clip_seconds);
  if (j.contains("classes")) {
    spec.classes.clear();
    for (const auto& cj : j["classes"]) {
      vocalics::ClassProfile p;
      p.name = cj.value("name", std::string("class") + std::to_string(spec.classes.size()));
      p.f0_low = cj.value("f0_low", p.f0_low);
      p.f0_high = cj.value("f0_high", p.f0_high);
      p.amp_low = cj.value("amp_low", p.amp_low);
      p.amp_high = cj.value("amp_high", p.amp_high);
      p.pause_rate = cj.value("pause_rate", p.pause_rate);
      p.noise_floor_db = cj.value("noise_floor_db", p.noise_floor_db);
      p.days_low = cj.value("days_low", p.days_low);
      p.days_high = cj.value("days_high", p.days_high);
      p.sleep = vocalics::parse_level(cj.value("sleep", "mid"));
      p.fatigue = vocalics::parse_level(cj.value("fatigue", "mid"));
      p.anxiety = vocalics::parse_level(cj.value("anxiety", "mid"));
      spec.classes.push_back(p);
    }
  }
  if (spec.classes.size() < 2) {
    throw vocalics::Error("spec file '" + path + "': need at least 2 classes");
  }
  return spec;
}

// load -> mono 16 kHz -> trim -> LLDs -> functionals, for one recording
FeatureVector extract_one(const std::string& wav_path, const std::string& set_name,
                          const LldConfig& cfg) {
  const AudioClip raw = vocalics::load_wav(wav_path);
  const AudioClip mono = vocalics::normalize(raw);
  const AudioClip trimmed = vocalics::trim_silence(mono, cfg.frame_ms, cfg.hop_ms,
                                                   cfg.energy_floor_db);
  LldConfig used = cfg;
  used.deltas = set_name == "brute";
  const vocalics::LldContour contour = vocalics::extract_llds(trimmed, used);
  return set_name == "brute" ? vocalics::brute_force_vector(contour)
                             : vocalics::egemaps_vector(contour, used);
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir,
              std::uint64_t seed) {
  vocalics::SynthSpec spec =
      spec_path.empty() ? vocalics::default_synth_spec() : load_synth_spec(spec_path);
  spec.seed = seed;
  const auto corpus = vocalics::generate_corpus(spec, out_dir);
  std::cout << corpus.manifest_path << "\n";
  return kExitOk;
}

int cmd_extract(const std::string& manifest_path, const std::string& set_name,
                const std::string& out_path, const std::string& config_path,
                double energy_floor_db, int jobs) {
  LldConfig cfg = config_path.empty() ? LldConfig{} : load_lld_config(config_path);
  if (std::isfinite(energy_floor_db)) cfg.energy_floor_db = energy_floor_db;
  const std::vector<RecordingMeta> meta = vocalics::parse_manifest(manifest_path);

  std::vector<FeatureVector> vectors(meta.size());
  std::vector<std::string> failures(meta.size());
  vocalics::parallel_for(meta.size(), jobs, [&](std::size_t i) {
    const std::string wav =
        vocalics::resolve_recording_path(manifest_path, meta[i].path);
    try {
      vectors[i] = extract_one(wav, set_name, cfg);
      vectors[i].recording_id = meta[i].recording_id;
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  });

  FeatureTable table;
  for (std::size_t i = 0; i < meta.size(); ++i) {
    if (!failures[i].empty()) {
      std::cerr << "skipped " << meta[i].recording_id << ": " << failures[i] << "\n";
      continue;
    }
    for (const auto& w : vectors[i].warnings) {
      std::cerr << "warning " << meta[i].recording_id << ": " << w << "\n";
    }
    if (table.feature_names.empty()) table.feature_names = vectors[i].names;
    table.recording_ids.push_back(vectors[i].recording_id);
    table.values.rows++;
    table.values.cols = table.feature_names.size();
    table.values.data.insert(table.values.data.end(), vectors[i].values.begin(),
                             vectors[i].values.end());
  }
  if (table.recording_ids.empty()) {
    throw vocalics::Error("extract: no recording could be processed");
  }
  vocalics::write_feature_csv(out_path, table);
  std::cout << out_path << ": " << table.recording_ids.size() << " rows x "
            << table.feature_names.size() << " features\n";
  return kExitOk;
}

std::vector<double> parse_c_grid(const std::string& text) {
  std::vector<double> grid;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string tok = vocalics::trim_ws(text.substr(pos, comma - pos));
    if (!tok.empty()) {
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || v <= 0.0) {
        throw vocalics::Error("bad C value '" + tok + "' in --c-grid");
      }
      grid.push_back(v);
    }
    pos = comma + 1;
  }
  if (grid.empty()) throw vocalics::Error("--c-grid is empty");
  return grid;
}

std::vector<std::string> canonical_feature_names(const std::string& set_name) {
  LldConfig cfg;
  if (set_name == "egemaps") {
    std::vector<std::string> names;
    for (const auto& e : vocalics::egemaps_spec(cfg).entries) {
      names.push_back(e.column + "_" + vocalics::functional_name(e.fn));
    }
    return names;
  }
  cfg.deltas = true;
  std::vector<std::string> names;
  for (const auto& col : vocalics::lld_column_names(cfg)) {
    for (auto fn : vocalics::brute_functional_list()) {
      names.push_back(col + "_" + vocalics::functional_name(fn));
    }
  }
  return names;
}

std::string feature_set_of(const FeatureTable& table) {
  if (table.feature_names == canonical_feature_names("egemaps")) return "EGEMAPS88";
  if (table.feature_names == canonical_feature_names("brute")) return "BRUTE";
  throw vocalics::Error(
      "feature CSV header does not match the EGEMAPS88 or BRUTE catalog");
}

int cmd_evaluate(const std::string& features_path, const std::string& manifest_path,
                 const std::string& task_name, const std::string& c_grid_text,
                 const std::string& report_path, int jobs) {
  const FeatureTable features = vocalics::read_feature_csv(features_path);
  const std::vector<RecordingMeta> meta = vocalics::parse_manifest(manifest_path);
  const vocalics::Task task = vocalics::parse_task(task_name);
  const std::vector<double> grid = c_grid_text.empty() ? vocalics::default_c_grid()
                                                       : parse_c_grid(c_grid_text);
  const std::string set_tag = feature_set_of(features);
  const vocalics::EvalReport report =
      vocalics::run_loso(features, meta, task, grid, jobs, set_tag);
  if (!report_path.empty()) vocalics::save_report(report_path, report);
  const auto& best = report.entries[report.best_index];
  std::printf("best C=%g UAR=%.4f WAR=%.4f F1=%.4f\n", best.c, best.metric.uar,
              best.metric.war, best.metric.f1_macro);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  return kExitOk;
}

int cmd_train(const std::string& features_path, const std::string& manifest_path,
              const std::string& task_name, double c_value,
              const std::string& model_path) {
  const FeatureTable features = vocalics::read_feature_csv(features_path);
  const std::vector<RecordingMeta> meta = vocalics::parse_manifest(manifest_path);
  const vocalics::Task task = vocalics::parse_task(task_name);
  const std::string set_tag = feature_set_of(features);

  std::map<std::string, const RecordingMeta*> by_id;
  for (const auto& m : meta) by_id[m.recording_id] = &m;
  std::vector<std::string> labels(features.recording_ids.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto it = by_id.find(features.recording_ids[i]);
    if (it == by_id.end()) {
      throw vocalics::MisalignedManifest("feature row '" + features.recording_ids[i] +
                                         "' has no manifest entry");
    }
    labels[i] = vocalics::task_label(*it->second, task);
  }

  const vocalics::Standardizer standardizer = vocalics::fit_standardizer(features.values);
  const vocalics::Matrix x = standardizer.transform(features.values);
  const auto weights = vocalics::class_weights(labels);
  vocalics::LinearSvmModel model = vocalics::fit(x, labels, c_value, weights);
  model.task = vocalics::task_name(task);
  model.feature_set = set_tag;
  model.standardizer = standardizer;
  model.feature_names = features.feature_names;
  vocalics::save_model(model_path, model);
  std::cout << model_path << "\n";
  return kExitOk;
}

int cmd_predict(const std::string& model_path, const std::string& wav_path,
                const std::string& set_override) {
  const vocalics::LinearSvmModel model = vocalics::load_model(model_path);
  if (!set_override.empty()) {
    const std::string requested = set_override == "brute" ? "BRUTE" : "EGEMAPS88";
    if (requested != model.feature_set) {
      throw vocalics::ContractMismatch("model was trained on " + model.feature_set +
                                       " but --set requests " + requested);
    }
  }
  const std::string set_name = model.feature_set == "BRUTE" ? "brute" : "egemaps";
  FeatureVector vec = extract_one(wav_path, set_name, LldConfig{});
  if (vec.values.size() != model.weights.cols) {
    throw vocalics::ContractMismatch("extracted width " + std::to_string(vec.values.size()) +
                                     " does not match model width " +
                                     std::to_string(model.weights.cols));
  }
  std::vector<double> x = vec.values;
  model.standardizer.transform_row(x.data(), x.size());
  const std::vector<double> scores = vocalics::decision_scores(model, x);
  const std::string label = vocalics::predict(model, x);
  std::cout << label << "\n";
  for (std::size_t k = 0; k < model.classes.size(); ++k) {
    std::cout << model.classes[k] << " " << vocalics::format_double(scores[k]) << "\n";
  }
  return kExitOk;
}

int cmd_spectrogram(const std::string& wav_path, const std::string& out_prefix) {
  const AudioClip clip = vocalics::normalize(vocalics::load_wav(wav_path));
  const vocalics::Spectrogram sg = vocalics::compute_spectrogram(clip);
  vocalics::write_spectrogram_pgm(out_prefix + ".pgm", sg);
  vocalics::write_spectrogram_csv(out_prefix + ".csv", sg);
  std::cout << out_prefix << ".pgm " << out_prefix << ".csv\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"audio-based patient-state pipeline: features, SVMs, LOSO evaluation"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  int jobs = 1;
  app.add_option("--seed", seed, "seed for all randomness (default 0)");
  app.add_option("--jobs", jobs, "worker threads for extraction/evaluation");

  auto* synth = app.add_subcommand("synth", "generate a synthetic labeled corpus");
  std::string synth_spec, synth_out;
  synth->add_option("--spec", synth_spec, "synthesis spec JSON (built-in default if omitted)");
  synth->add_option("--out", synth_out, "output directory")->required();

  auto* extract = app.add_subcommand("extract", "extract per-recording feature vectors");
  std::string ex_manifest, ex_set = "egemaps", ex_out, ex_config;
  double ex_floor = std::numeric_limits<double>::quiet_NaN();
  extract->add_option("--manifest", ex_manifest, "manifest CSV")->required();
  extract->add_option("--set", ex_set, "feature set: egemaps | brute")
      ->check(CLI::IsMember({"egemaps", "brute"}));
  extract->add_option("--out", ex_out, "output feature CSV")->required();
  extract->add_option("--config", ex_config, "LLD config file (key = value lines)");
  extract->add_option("--energy-floor-db", ex_floor,
                      "silence-trim threshold re full scale (default -45)");

  auto* evaluate = app.add_subcommand("evaluate", "LOSO cross-validation over a C grid");
  std::string ev_features, ev_manifest, ev_task, ev_grid, ev_report;
  evaluate->add_option("--features", ev_features, "feature CSV")->required();
  evaluate->add_option("--manifest", ev_manifest, "manifest CSV")->required();
  evaluate->add_option("--task", ev_task, "severity | sleep | fatigue | anxiety")->required();
  evaluate->add_option("--c-grid", ev_grid, "comma-separated C values (default 1e-7..1)");
  evaluate->add_option("--report", ev_report, "output report JSON");

  auto* train = app.add_subcommand("train", "fit one model on all rows");
  std::string tr_features, tr_manifest, tr_task, tr_model;
  double tr_c = 1e-6;
  train->add_option("--features", tr_features, "feature CSV")->required();
  train->add_option("--manifest", tr_manifest, "manifest CSV")->required();
  train->add_option("--task", tr_task, "severity | sleep | fatigue | anxiety")->required();
  train->add_option("--c", tr_c, "complexity constant")->required();
  train->add_option("--model", tr_model, "output model JSON")->required();

  auto* predict = app.add_subcommand("predict", "classify one WAV with a saved model");
  std::string pr_model, pr_wav, pr_set;
  predict->add_option("--model", pr_model, "model JSON")->required();
  predict->add_option("--wav", pr_wav, "input WAV")->required();
  predict->add_option("--set", pr_set, "expected feature set (must match the model)")
      ->check(CLI::IsMember({"egemaps", "brute"}));

  auto* spectrogram = app.add_subcommand("spectrogram", "export log-magnitude STFT");
  std::string sp_wav, sp_out;
  spectrogram->add_option("--wav", sp_wav, "input WAV")->required();
  spectrogram->add_option("--out", sp_out, "output prefix (.pgm/.csv)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInput;
  }

  try {
    if (synth->parsed()) return cmd_synth(synth_spec, synth_out, seed);
    if (extract->parsed())
      return cmd_extract(ex_manifest, ex_set, ex_out, ex_config, ex_floor, jobs);
    if (evaluate->parsed())
      return cmd_evaluate(ev_features, ev_manifest, ev_task, ev_grid, ev_report, jobs);
    if (train->parsed()) return cmd_train(tr_features, tr_manifest, tr_task, tr_c, tr_model);
    if (predict->parsed()) return cmd_predict(pr_model, pr_wav, pr_set);
    if (spectrogram->parsed()) return cmd_spectrogram(sp_wav, sp_out);
  } catch (const vocalics::ContractMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitContract;
  } catch (const vocalics::IoFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
