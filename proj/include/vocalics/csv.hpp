#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vocalics/errors.hpp"
#include "vocalics/matrix.hpp"
#include "vocalics/util.hpp"

namespace vocalics {

// RFC-4180-ish field splitting: quotes guard commas, "" escapes a quote.
inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c == '\r') {
      // tolerate CRLF
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

// Feature table: one row per recording, deterministic column order. This CSV
// is the contract between the extract and train/evaluate stages.
struct FeatureTable {
  std::vector<std::string> recording_ids;
  std::vector<std::string> feature_names;
  Matrix values;  // recording_ids.size() x feature_names.size()

  long row_of(const std::string& recording_id) const {
    for (std::size_t i = 0; i < recording_ids.size(); ++i) {
      if (recording_ids[i] == recording_id) return static_cast<long>(i);
    }
    return -1;
  }
};

inline void write_feature_csv(const std::string& path, const FeatureTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot write '" + path + "'");
  out << "recording_id";
  for (const auto& name : table.feature_names) out << ',' << csv_escape(name);
  out << '\n';
  for (std::size_t r = 0; r < table.recording_ids.size(); ++r) {
    out << csv_escape(table.recording_ids[r]);
    for (std::size_t c = 0; c < table.feature_names.size(); ++c) {
      out << ',' << format_double(table.values.at(r, c));
    }
    out << '\n';
  }
  if (!out) throw IoFailure("write failed for '" + path + "'");
}

inline FeatureTable read_feature_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw MalformedFile("'" + path + "': empty feature CSV");
  auto header = split_csv_line(line);
  if (header.empty() || header[0] != "recording_id") {
    throw MissingColumn("'" + path + "': first column must be recording_id");
  }
  FeatureTable table;
  table.feature_names.assign(header.begin() + 1, header.end());

  std::vector<double> buf;
  while (std::getline(in, line)) {
    if (trim_ws(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw MalformedFile("'" + path + "': row with " + std::to_string(fields.size()) +
                          " fields, expected " + std::to_string(header.size()));
    }
    table.recording_ids.push_back(fields[0]);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      buf.push_back(std::strtod(fields[c].c_str(), nullptr));
    }
  }
  table.values.rows = table.recording_ids.size();
  table.values.cols = table.feature_names.size();
  table.values.data = std::move(buf);
  return table;
}

}  // namespace vocalics
