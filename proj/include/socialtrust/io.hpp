#pragma once

// Pipeline file formats: line-delimited JSON for logs, CSV for features and
// predictions, JSON for calibrated tables and reports. Stages compose
// through these files; all writers go through an atomic temp+rename.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "socialtrust/datamodel.hpp"
#include "socialtrust/errors.hpp"
#include "socialtrust/features.hpp"
#include "socialtrust/serialize.hpp"
#include "socialtrust/trustmetric.hpp"

namespace socialtrust {

// ---------------------------------------------------------------------------
// Files

inline void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  fs::create_directories(dir);
  const fs::path tmp = dir / (path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---------------------------------------------------------------------------
// Logs as JSONL

inline std::string logs_to_jsonl(const std::vector<ParticipantLog>& logs) {
  std::string out;
  for (const auto& log : logs) {
    out += to_json(log).dump();
    out += '\n';
  }
  return out;
}

inline std::vector<ParticipantLog> logs_from_jsonl(const std::string& content) {
  std::vector<ParticipantLog> logs;
  std::istringstream in(content);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
    logs.push_back(log_from_json(doc));
  }
  return logs;
}

// ---------------------------------------------------------------------------
// CSV helpers (fields in these formats never contain commas)

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Features CSV

inline constexpr const char* kFeaturesCsvHeader =
    "participant_id,partner_id,num_calls,num_msgs,dur_calls,len_msgs,rel_calls,"
    "rel_msgs,avg_call_dur,avg_msg_len,interactions_per_day,is_favorite,"
    "rating_trust_info";

inline std::string features_to_csv(const std::vector<LabeledFeatures>& rows) {
  std::string out = std::string(kFeaturesCsvHeader) + "\n";
  for (const auto& row : rows) {
    const auto& fv = row.features;
    out += row.participant_id + ',' + row.partner_id + ',';
    out += std::to_string(fv.num_calls) + ',' + std::to_string(fv.num_msgs) + ',';
    out += std::to_string(fv.dur_calls) + ',' + std::to_string(fv.len_msgs) + ',';
    out += detail::fmt_double(fv.rel_calls) + ',' + detail::fmt_double(fv.rel_msgs) + ',';
    out += detail::fmt_double(fv.avg_call_dur) + ',' + detail::fmt_double(fv.avg_msg_len) + ',';
    out += detail::fmt_double(fv.interactions_per_day) + ',';
    out += fv.is_favorite ? "true" : "false";
    out += ',';
    if (row.rating.trust_info) out += std::to_string(*row.rating.trust_info);
    out += '\n';
  }
  return out;
}

inline std::vector<LabeledFeatures> features_from_csv(const std::string& content) {
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty features CSV");
  if (line != kFeaturesCsvHeader) throw SchemaError("header", "unexpected features CSV header");
  std::vector<LabeledFeatures> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 13) {
      throw SchemaError("line " + std::to_string(line_no), "expected 13 fields");
    }
    try {
      LabeledFeatures row;
      row.participant_id = fields[0];
      row.partner_id = fields[1];
      row.features.num_calls = std::stoll(fields[2]);
      row.features.num_msgs = std::stoll(fields[3]);
      row.features.dur_calls = std::stoll(fields[4]);
      row.features.len_msgs = std::stoll(fields[5]);
      row.features.rel_calls = std::stod(fields[6]);
      row.features.rel_msgs = std::stod(fields[7]);
      row.features.avg_call_dur = std::stod(fields[8]);
      row.features.avg_msg_len = std::stod(fields[9]);
      row.features.interactions_per_day = std::stod(fields[10]);
      row.features.is_favorite = fields[11] == "true";
      if (!fields[12].empty()) row.rating.trust_info = std::stoi(fields[12]);
      rows.push_back(std::move(row));
    } catch (const std::exception&) {
      throw SchemaError("line " + std::to_string(line_no), "malformed numeric field");
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Quantile table JSON + text rendering

inline json table_to_json(const QuantileTable& table) {
  json j;
  json probs = json::array();
  for (double p : kQuantileProbs) probs.push_back(p);
  j["probabilities"] = probs;
  for (Indicator v : kAllIndicators) {
    json row = json::array();
    for (std::size_t pi = 0; pi < kQuantileProbs.size(); ++pi) {
      row.push_back(table.values[static_cast<std::size_t>(v)][pi]);
    }
    j["quantiles"][to_string(v)] = row;
  }
  return j;
}

inline QuantileTable table_from_json(const json& j) {
  if (!j.contains("quantiles")) throw SchemaError("quantiles", "missing required key");
  QuantileTable table;
  for (Indicator v : kAllIndicators) {
    const char* name = to_string(v);
    if (!j["quantiles"].contains(name)) {
      throw SchemaError(std::string("quantiles.") + name, "missing required key");
    }
    const auto& row = j["quantiles"][name];
    if (!row.is_array() || row.size() != kQuantileProbs.size()) {
      throw SchemaError(std::string("quantiles.") + name, "expected 4 values");
    }
    for (std::size_t pi = 0; pi < kQuantileProbs.size(); ++pi) {
      table.values[static_cast<std::size_t>(v)][pi] = row[pi].get<double>();
    }
  }
  return table;
}

inline std::string table_to_text(const QuantileTable& table) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %10s %10s %10s %10s\n", "variable", "75%",
                "90%", "95%", "99%");
  out += line;
  for (Indicator v : kAllIndicators) {
    const auto& row = table.values[static_cast<std::size_t>(v)];
    std::snprintf(line, sizeof line, "%-16s %10.2f %10.2f %10.2f %10.2f\n", to_string(v),
                  row[0], row[1], row[2], row[3]);
    out += line;
  }
  return out;
}

inline std::string distribution_to_text(const RatingDistribution& dist) {
  std::string out = "level    percent   cum.percent\n";
  char line[80];
  for (int level = 5; level >= 1; --level) {
    std::snprintf(line, sizeof line, "%5d %10.2f %13.2f\n", level,
                  dist.percent_for_level(level), dist.cumulative_for_level(level));
    out += line;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Predictions CSV

inline constexpr const char* kPredictionsCsvHeader =
    "participant_id,partner_id,predicted_trusted,grade,confidence_band,triggered";

inline std::string prediction_row(const std::string& participant_id,
                                  const std::string& partner_id,
                                  const TrustPrediction& prediction) {
  std::string out = participant_id + ',' + partner_id + ',';
  out += prediction.predicted_trusted ? "true" : "false";
  out += ',' + std::to_string(prediction.grade.value) + ',';
  if (prediction.confidence_band) out += detail::fmt_double(*prediction.confidence_band);
  out += ',';
  for (std::size_t i = 0; i < prediction.triggered.size(); ++i) {
    const auto& t = prediction.triggered[i];
    if (i > 0) out += ';';
    out += std::string(to_string(t.indicator)) + '>' + detail::fmt_double(t.threshold) +
           '@' + detail::fmt_double(t.observed);
  }
  out += '\n';
  return out;
}

}  // namespace socialtrust
