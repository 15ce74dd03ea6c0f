#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "vocalics/errors.hpp"
#include "vocalics/matrix.hpp"

namespace vocalics {

// Per-feature shift/scale fitted on a training partition only. Zero-variance
// columns map to 0 instead of dividing by zero.
struct Standardizer {
  std::vector<double> means;
  std::vector<double> stds;

  bool empty() const { return means.empty(); }

  void transform_row(double* row, std::size_t n) const {
    if (n != means.size()) throw DimensionMismatch("standardizer: wrong width");
    for (std::size_t c = 0; c < n; ++c) {
      row[c] = stds[c] > 0.0 ? (row[c] - means[c]) / stds[c] : 0.0;
    }
  }

  Matrix transform(const Matrix& X) const {
    Matrix out = X;
    for (std::size_t r = 0; r < out.rows; ++r) transform_row(out.row(r), out.cols);
    return out;
  }
};

inline Standardizer fit_standardizer(const Matrix& X) {
  if (X.rows == 0 || X.cols == 0) throw EmptyMatrix("fit_standardizer: empty matrix");
  Standardizer s;
  s.means.assign(X.cols, 0.0);
  s.stds.assign(X.cols, 0.0);
  for (std::size_t r = 0; r < X.rows; ++r) {
    for (std::size_t c = 0; c < X.cols; ++c) s.means[c] += X.at(r, c);
  }
  for (std::size_t c = 0; c < X.cols; ++c) s.means[c] /= static_cast<double>(X.rows);
  for (std::size_t r = 0; r < X.rows; ++r) {
    for (std::size_t c = 0; c < X.cols; ++c) {
      const double d = X.at(r, c) - s.means[c];
      s.stds[c] += d * d;
    }
  }
  for (std::size_t c = 0; c < X.cols; ++c) {
    s.stds[c] = std::sqrt(s.stds[c] / static_cast<double>(X.rows));  // population
    if (s.stds[c] < 1e-12) s.stds[c] = 0.0;
  }
  return s;
}

inline Matrix apply_standardizer(const Standardizer& s, const Matrix& X) {
  return s.transform(X);
}

// weight_c = N / (K * N_c): inverse-frequency balancing. The effective
// per-sample penalty during training is C * weight of the sample's own class.
inline std::map<std::string, double> class_weights(const std::vector<std::string>& labels) {
  std::map<std::string, std::size_t> counts;
  for (const auto& l : labels) ++counts[l];
  if (counts.size() < 2) throw SingleClass("class_weights: need at least 2 classes");
  const double n = static_cast<double>(labels.size());
  const double k = static_cast<double>(counts.size());
  std::map<std::string, double> w;
  for (const auto& [label, count] : counts) {
    w[label] = n / (k * static_cast<double>(count));
  }
  return w;
}

// One-vs-rest linear SVM. weights is K x D; decision for x is the argmax of
// w_k . x + b_k with ties broken by class order (classes are sorted).
struct LinearSvmModel {
  std::vector<std::string> classes;
  Matrix weights;  // K x D
  std::vector<double> biases;
  double C = 1.0;
  std::string task;
  std::string feature_set;
  Standardizer standardizer;
  std::vector<std::string> feature_names;  // optional, for contract checks
};

struct FitOptions {
  double tol = 1e-6;             // stop when max |projected gradient| falls below
  std::size_t max_epochs = 10000;
};

struct FitTrace {
  // solver objective (dual in minimization form) after each epoch
  std::vector<double> objective;
};

namespace detail {

// Dual coordinate descent on the weighted L1-hinge objective (LIBLINEAR
// style). The bias rides along as an implicit augmented constant feature.
// Fixed traversal order keeps the fit deterministic.
inline void solve_binary_hinge(const Matrix& X, const std::vector<int>& sign,
                               const std::vector<double>& penalty,
                               const FitOptions& opt, std::vector<double>* w_out,
                               double* b_out, FitTrace* trace) {
  const std::size_t n = X.rows;
  const std::size_t d = X.cols;
  std::vector<double> w(d, 0.0);
  double b = 0.0;
  std::vector<double> alpha(n, 0.0);
  double alpha_sum = 0.0;

  std::vector<double> qii(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* x = X.row(i);
    double q = 1.0;  // bias feature
    for (std::size_t c = 0; c < d; ++c) q += x[c] * x[c];
    qii[i] = q;
  }

  for (std::size_t epoch = 0; epoch < opt.max_epochs; ++epoch) {
    double max_pg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* x = X.row(i);
      const double s = static_cast<double>(sign[i]);
      double score = b;
      for (std::size_t c = 0; c < d; ++c) score += w[c] * x[c];
      const double g = s * score - 1.0;

      double pg = g;
      if (alpha[i] <= 0.0 && g > 0.0) pg = 0.0;
      if (alpha[i] >= penalty[i] && g < 0.0) pg = 0.0;
      max_pg = std::max(max_pg, std::abs(pg));
      if (std::abs(pg) < 1e-14) continue;

      const double a_new = std::clamp(alpha[i] - g / qii[i], 0.0, penalty[i]);
      const double delta = a_new - alpha[i];
      if (delta == 0.0) continue;
      alpha[i] = a_new;
      alpha_sum += delta;
      const double step = delta * s;
      for (std::size_t c = 0; c < d; ++c) w[c] += step * x[c];
      b += step;
    }
    if (trace) {
      double wsq = b * b;
      for (double v : w) wsq += v * v;
      trace->objective.push_back(0.5 * wsq - alpha_sum);
    }
    if (max_pg < opt.tol) break;
  }
  *w_out = std::move(w);
  *b_out = b;
}

}  // namespace detail

// Primal value of the weighted hinge objective for one binary problem
// (bias regularized via the augmented-feature convention).
inline double weighted_hinge_objective(const Matrix& X, const std::vector<int>& sign,
                                       const std::vector<double>& penalty,
                                       const std::vector<double>& w, double b) {
  double obj = 0.5 * b * b;
  for (double v : w) obj += 0.5 * v * v;
  for (std::size_t i = 0; i < X.rows; ++i) {
    const double* x = X.row(i);
    double score = b;
    for (std::size_t c = 0; c < X.cols; ++c) score += w[c] * x[c];
    obj += penalty[i] * std::max(0.0, 1.0 - sign[i] * score);
  }
  return obj;
}

// Trains one-vs-rest classifiers on already-standardized features.
inline LinearSvmModel fit(const Matrix& X, const std::vector<std::string>& y, double C,
                          const std::map<std::string, double>& class_weight,
                          const FitOptions& opt = {}, FitTrace* trace = nullptr) {
  if (X.rows == 0) throw EmptyMatrix("fit: no rows");
  if (X.rows != y.size()) throw DimensionMismatch("fit: X rows != labels");
  std::set<std::string> distinct(y.begin(), y.end());
  if (distinct.size() < 2) throw SingleClass("fit: need at least 2 classes");

  LinearSvmModel model;
  model.classes.assign(distinct.begin(), distinct.end());  // sorted
  model.C = C;
  model.weights = Matrix(model.classes.size(), X.cols);
  model.biases.assign(model.classes.size(), 0.0);

  std::vector<double> penalty(X.rows);
  for (std::size_t i = 0; i < X.rows; ++i) {
    const auto it = class_weight.find(y[i]);
    penalty[i] = C * (it != class_weight.end() ? it->second : 1.0);
  }

  std::vector<int> sign(X.rows);
  for (std::size_t k = 0; k < model.classes.size(); ++k) {
    for (std::size_t i = 0; i < X.rows; ++i) {
      sign[i] = y[i] == model.classes[k] ? 1 : -1;
    }
    std::vector<double> w;
    double b = 0.0;
    detail::solve_binary_hinge(X, sign, penalty, opt, &w, &b,
                               k == 0 ? trace : nullptr);
    for (std::size_t c = 0; c < X.cols; ++c) model.weights.at(k, c) = w[c];
    model.biases[k] = b;
  }
  return model;
}

// Per-class decision scores for one already-standardized row.
inline std::vector<double> decision_scores(const LinearSvmModel& model,
                                           const std::vector<double>& x) {
  if (x.size() != model.weights.cols) {
    throw DimensionMismatch("predict: feature vector has wrong length");
  }
  std::vector<double> scores(model.classes.size());
  for (std::size_t k = 0; k < model.classes.size(); ++k) {
    double s = model.biases[k];
    const double* w = model.weights.row(k);
    for (std::size_t c = 0; c < x.size(); ++c) s += w[c] * x[c];
    scores[k] = s;
  }
  return scores;
}

inline std::string predict(const LinearSvmModel& model, const std::vector<double>& x) {
  const std::vector<double> scores = decision_scores(model, x);
  std::size_t best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k) {
    if (scores[k] > scores[best]) best = k;  // ties keep the earlier class
  }
  return model.classes[best];
}

}  // namespace vocalics
