#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "vocalics/errors.hpp"
#include "vocalics/lld.hpp"

namespace vocalics {

// Statistics collapsing one descriptor contour into one scalar per recording.
enum class Functional {
  Mean,
  Stddev,
  Cov,  // stddev / |mean|
  Skewness,
  Kurtosis,  // excess
  Min,
  Max,
  Range,
  RelMinPos,
  RelMaxPos,
  P20,
  P25,
  P50,
  P75,
  P80,
  RangeP20P80,
  IqrP25P75,
  LinRegSlope,
  LinRegOffset,
  MeanRisingSlope,
  MeanFallingSlope,
};

inline const char* functional_name(Functional f) {
  switch (f) {
    case Functional::Mean: return "mean";
    case Functional::Stddev: return "stddev";
    case Functional::Cov: return "cov";
    case Functional::Skewness: return "skewness";
    case Functional::Kurtosis: return "kurtosis";
    case Functional::Min: return "min";
    case Functional::Max: return "max";
    case Functional::Range: return "range";
    case Functional::RelMinPos: return "rel_min_pos";
    case Functional::RelMaxPos: return "rel_max_pos";
    case Functional::P20: return "p20";
    case Functional::P25: return "p25";
    case Functional::P50: return "p50";
    case Functional::P75: return "p75";
    case Functional::P80: return "p80";
    case Functional::RangeP20P80: return "range_p20_p80";
    case Functional::IqrP25P75: return "iqr_p25_p75";
    case Functional::LinRegSlope: return "slope";
    case Functional::LinRegOffset: return "offset";
    case Functional::MeanRisingSlope: return "rise_slope";
    case Functional::MeanFallingSlope: return "fall_slope";
  }
  return "?";
}

// Linear interpolation between order statistics, h = (n-1)*p.
inline double percentile(std::vector<double> sorted_copy, double p) {
  if (sorted_copy.empty()) return 0.0;
  std::sort(sorted_copy.begin(), sorted_copy.end());
  const double h = (static_cast<double>(sorted_copy.size()) - 1.0) * p;
  const auto i = static_cast<std::size_t>(h);
  if (i + 1 >= sorted_copy.size()) return sorted_copy.back();
  const double frac = h - static_cast<double>(i);
  return sorted_copy[i] + frac * (sorted_copy[i + 1] - sorted_copy[i]);
}

namespace detail {

// All functionals of one (possibly voiced-masked) series sampled at times t.
inline double eval_functional(Functional fn, const std::vector<double>& x,
                              const std::vector<double>& t) {
  const std::size_t n = x.size();
  if (n == 0) return 0.0;

  // exactly-constant series: every dispersion- or slope-like value is
  // analytically zero, so don't let summation roundoff leak in
  if (*std::min_element(x.begin(), x.end()) == *std::max_element(x.begin(), x.end())) {
    switch (fn) {
      case Functional::Mean:
      case Functional::Min:
      case Functional::Max:
      case Functional::P20:
      case Functional::P25:
      case Functional::P50:
      case Functional::P75:
      case Functional::P80:
      case Functional::LinRegOffset:
        return x[0];
      default:
        return 0.0;
    }
  }

  auto mean_of = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double a : v) m += a;
    return m / static_cast<double>(v.size());
  };

  switch (fn) {
    case Functional::Mean:
      return mean_of(x);
    case Functional::Stddev:
    case Functional::Cov:
    case Functional::Skewness:
    case Functional::Kurtosis: {
      const double m = mean_of(x);
      double m2 = 0.0, m3 = 0.0, m4 = 0.0;
      for (double a : x) {
        const double d = a - m;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
      }
      m2 /= static_cast<double>(n);
      m3 /= static_cast<double>(n);
      m4 /= static_cast<double>(n);
      const double sd = std::sqrt(m2);
      if (fn == Functional::Stddev) return sd;
      if (fn == Functional::Cov) return std::abs(m) > 1e-12 ? sd / std::abs(m) : 0.0;
      if (sd <= 1e-12) return 0.0;
      if (fn == Functional::Skewness) return m3 / (sd * sd * sd);
      return m4 / (m2 * m2) - 3.0;
    }
    case Functional::Min:
      return *std::min_element(x.begin(), x.end());
    case Functional::Max:
      return *std::max_element(x.begin(), x.end());
    case Functional::Range:
      return *std::max_element(x.begin(), x.end()) -
             *std::min_element(x.begin(), x.end());
    case Functional::RelMinPos: {
      if (n < 2) return 0.0;
      const auto it = std::min_element(x.begin(), x.end());
      return static_cast<double>(it - x.begin()) / static_cast<double>(n - 1);
    }
    case Functional::RelMaxPos: {
      if (n < 2) return 0.0;
      const auto it = std::max_element(x.begin(), x.end());
      return static_cast<double>(it - x.begin()) / static_cast<double>(n - 1);
    }
    case Functional::P20: return percentile(x, 0.20);
    case Functional::P25: return percentile(x, 0.25);
    case Functional::P50: return percentile(x, 0.50);
    case Functional::P75: return percentile(x, 0.75);
    case Functional::P80: return percentile(x, 0.80);
    case Functional::RangeP20P80: return percentile(x, 0.80) - percentile(x, 0.20);
    case Functional::IqrP25P75: return percentile(x, 0.75) - percentile(x, 0.25);
    case Functional::LinRegSlope:
    case Functional::LinRegOffset: {
      if (n < 2) return fn == Functional::LinRegOffset ? x[0] : 0.0;
      double st = 0.0, sx = 0.0, stt = 0.0, stx = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        st += t[i];
        sx += x[i];
        stt += t[i] * t[i];
        stx += t[i] * x[i];
      }
      const double den = static_cast<double>(n) * stt - st * st;
      if (std::abs(den) < 1e-15) return fn == Functional::LinRegOffset ? mean_of(x) : 0.0;
      const double slope = (static_cast<double>(n) * stx - st * sx) / den;
      if (fn == Functional::LinRegSlope) return slope;
      return (sx - slope * st) / static_cast<double>(n);
    }
    case Functional::MeanRisingSlope:
    case Functional::MeanFallingSlope: {
      double acc = 0.0;
      std::size_t count = 0;
      const bool rising = fn == Functional::MeanRisingSlope;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const double dt = t[i + 1] - t[i];
        if (dt <= 0.0) continue;
        const double s = (x[i + 1] - x[i]) / dt;
        if ((rising && s > 0.0) || (!rising && s < 0.0)) {
          acc += s;
          ++count;
        }
      }
      return count > 0 ? acc / static_cast<double>(count) : 0.0;
    }
  }
  return 0.0;
}

}  // namespace detail

struct FunctionalEntry {
  std::string column;
  Functional fn;
  bool voiced_only = false;
};

struct FunctionalSpec {
  std::string set_id;
  std::vector<FunctionalEntry> entries;
};

// Fixed-length named static vector for one recording.
struct FeatureVector {
  std::string set_id;
  std::string recording_id;
  std::vector<std::string> names;
  std::vector<double> values;
  std::vector<std::string> warnings;  // e.g. voiced-only stats zeroed
};

constexpr std::size_t kEgemapsDim = 88;
// 53 descriptor columns + deltas, times the 20-functional extended grid.
constexpr std::size_t kBruteFunctionals = 20;
constexpr std::size_t kBruteDim = 106 * kBruteFunctionals;

// One named value per (descriptor, functional) pair in the spec. Voiced-only
// entries run over voiced frames; if none exist the value is 0 and the
// vector carries a warning flag.
inline FeatureVector apply_functionals(const LldContour& contour,
                                       const FunctionalSpec& spec) {
  if (contour.n_frames() < 2) {
    throw TooFewFrames("apply_functionals: need at least 2 frames");
  }

  // times of all frames, reused for masked series
  std::vector<double> all_t(contour.n_frames());
  for (std::size_t i = 0; i < all_t.size(); ++i) {
    all_t[i] = static_cast<double>(i) * contour.grid.hop_seconds();
  }

  FeatureVector out;
  out.set_id = spec.set_id;
  out.names.reserve(spec.entries.size());
  out.values.reserve(spec.entries.size());

  bool warned_unvoiced = false;
  std::string last_column;
  long col = -1;
  std::vector<double> x, t;
  bool last_voiced_only = false;
  bool have_series = false;

  for (const auto& entry : spec.entries) {
    if (!have_series || entry.column != last_column ||
        entry.voiced_only != last_voiced_only) {
      col = contour.col_index(entry.column);
      if (col < 0) {
        throw UnknownDescriptor("apply_functionals: no column '" + entry.column + "'");
      }
      x.clear();
      t.clear();
      for (std::size_t i = 0; i < contour.n_frames(); ++i) {
        if (entry.voiced_only && !contour.voiced[i]) continue;
        x.push_back(contour.at(i, static_cast<std::size_t>(col)));
        t.push_back(all_t[i]);
      }
      last_column = entry.column;
      last_voiced_only = entry.voiced_only;
      have_series = true;
    }

    double v = 0.0;
    if (x.empty()) {
      if (!warned_unvoiced) {
        out.warnings.push_back("no voiced frames: voiced-only functionals set to 0");
        warned_unvoiced = true;
      }
    } else {
      v = detail::eval_functional(entry.fn, x, t);
      if (!std::isfinite(v)) v = 0.0;
    }
    out.names.push_back(entry.column + "_" + functional_name(entry.fn));
    out.values.push_back(v);
  }
  return out;
}

// The versioned 88-feature catalog: an extended 8-functional set on F0 and
// loudness, a 4-functional set on the other eleven scalar descriptors, and
// mean/cov on MFCC 1-14 (16 + 44 + 28 = 88). F0, jitter, shimmer and HNR
// statistics run over voiced frames only. See docs/FEATURES.md.
inline FunctionalSpec egemaps_spec(const LldConfig& cfg = {}) {
  static constexpr Functional kExt8[] = {
      Functional::Mean,        Functional::Cov,
      Functional::P20,         Functional::P50,
      Functional::P80,         Functional::RangeP20P80,
      Functional::MeanRisingSlope, Functional::MeanFallingSlope};
  static constexpr Functional kBase4[] = {Functional::Mean, Functional::Cov,
                                          Functional::P50, Functional::RangeP20P80};
  static constexpr Functional kBase2[] = {Functional::Mean, Functional::Cov};

  FunctionalSpec spec;
  spec.set_id = "EGEMAPS88";
  auto add = [&spec](const std::string& column, const Functional* fns, std::size_t n) {
    const bool voiced_only = is_voiced_only_descriptor(column);
    for (std::size_t i = 0; i < n; ++i) {
      spec.entries.push_back({column, fns[i], voiced_only});
    }
  };

  add("f0", kExt8, 8);
  add("loudness", kExt8, 8);
  for (const char* c : {"rms_energy", "voicing_prob", "jitter_local", "shimmer_local",
                        "hnr_db", "spectral_centroid", "spectral_slope", "spectral_flux",
                        "spectral_rolloff85", "spectral_sharpness", "zcr"}) {
    add(c, kBase4, 4);
  }
  for (int k = 1; k <= cfg.n_coeffs; ++k) {
    add(detail::mfcc_name(k), kBase2, 2);
  }
  return spec;
}

inline const std::vector<Functional>& brute_functional_list() {
  static const std::vector<Functional> kList = {
      Functional::Mean,         Functional::Stddev,
      Functional::Skewness,     Functional::Kurtosis,
      Functional::Min,          Functional::Max,
      Functional::Range,        Functional::RelMinPos,
      Functional::RelMaxPos,    Functional::P20,
      Functional::P25,          Functional::P50,
      Functional::P75,          Functional::P80,
      Functional::RangeP20P80,  Functional::IqrP25P75,
      Functional::LinRegSlope,  Functional::LinRegOffset,
      Functional::MeanRisingSlope, Functional::MeanFallingSlope};
  return kList;
}

// Brute-force grid: every contour column (deltas included) x the extended
// 20-functional list. With the release config that is 106 x 20 = 2120.
inline FunctionalSpec brute_force_spec(const LldContour& contour) {
  bool has_deltas = false;
  for (const auto& name : contour.names) {
    if (name.rfind("del_", 0) == 0) {
      has_deltas = true;
      break;
    }
  }
  if (!has_deltas) {
    throw UnknownDescriptor("brute_force_vector: contour lacks delta columns "
                            "(extract with deltas enabled)");
  }
  FunctionalSpec spec;
  spec.set_id = "BRUTE";
  for (const auto& name : contour.names) {
    const bool voiced_only = is_voiced_only_descriptor(name);
    for (Functional fn : brute_functional_list()) {
      spec.entries.push_back({name, fn, voiced_only});
    }
  }
  return spec;
}

inline FeatureVector egemaps_vector(const LldContour& contour, const LldConfig& cfg = {}) {
  FeatureVector v = apply_functionals(contour, egemaps_spec(cfg));
  if (v.values.size() != kEgemapsDim) {
    throw Error("egemaps_vector: catalog produced " + std::to_string(v.values.size()) +
                " features, expected 88");
  }
  return v;
}

inline FeatureVector brute_force_vector(const LldContour& contour) {
  return apply_functionals(contour, brute_force_spec(contour));
}

}  // namespace vocalics
