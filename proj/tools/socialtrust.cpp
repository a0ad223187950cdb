// Command-line front end for the trust pipeline:
//   ingest -> features -> calibrate -> predict, plus stats, compare and
//   simulate. Stages compose through JSONL/CSV/JSON files; outputs are
//   written atomically and contain no timestamps, so identical inputs give
//   identical bytes.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "socialtrust/closeness.hpp"
#include "socialtrust/datamodel.hpp"
#include "socialtrust/errors.hpp"
#include "socialtrust/features.hpp"
#include "socialtrust/ingest.hpp"
#include "socialtrust/io.hpp"
#include "socialtrust/psi.hpp"
#include "socialtrust/simnet.hpp"
#include "socialtrust/statistics.hpp"
#include "socialtrust/trustmetric.hpp"

namespace fs = std::filesystem;
using namespace socialtrust;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDataError = 1;
constexpr int kExitUsageError = 2;

struct GlobalOptions {
  std::uint64_t seed = 0;
  bool quiet = false;
  std::string format = "csv";
};

void info(const GlobalOptions& global, const std::string& message) {
  if (!global.quiet) std::cout << message << "\n";
}

std::vector<fs::path> collect_documents(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& input : inputs) {
    const fs::path p(input);
    if (fs::is_directory(p)) {
      for (const auto& entry : fs::directory_iterator(p)) {
        if (!entry.is_regular_file()) continue;
        const auto ext = entry.path().extension().string();
        if (ext == ".yaml" || ext == ".yml") files.push_back(entry.path());
      }
    } else if (fs::exists(p)) {
      files.push_back(p);
    } else {
      throw Error("input not found: " + input);
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

// Optional "filename,worker_id" map for deduplication; file stem otherwise.
std::map<std::string, std::string> load_manifest(const std::string& path) {
  std::map<std::string, std::string> map;
  if (path.empty()) return map;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "filename,worker_id") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("manifest line without comma: " + line);
    map[line.substr(0, comma)] = line.substr(comma + 1);
  }
  return map;
}

RatingVariable parse_rating_variable(const std::string& name) {
  if (name == "trustInfo") return RatingVariable::TrustInfo;
  if (name == "closeness") return RatingVariable::Closeness;
  if (name == "trustBest") return RatingVariable::TrustBest;
  throw CLI::ValidationError("--rating", "expected trustInfo|closeness|trustBest");
}

Combinator parse_combinator(const std::string& spec) {
  if (spec == "or") return Combinator::or_any();
  if (spec.rfind("and:", 0) == 0) {
    const auto body = spec.substr(4);
    const auto comma = body.find(',');
    if (comma != std::string::npos) {
      const auto a = indicator_from_string(body.substr(0, comma));
      const auto b = indicator_from_string(body.substr(comma + 1));
      if (a && b) return Combinator::and_pair(*a, *b);
    }
  }
  throw CLI::ValidationError("--combinator", "expected or | and:<var>,<var>");
}

// ---------------------------------------------------------------------------

int cmd_ingest(const GlobalOptions& global, const std::vector<std::string>& inputs,
               const std::string& manifest_path, const FilterPolicy& policy,
               const std::string& out_path) {
  const auto files = collect_documents(inputs);
  const auto manifest = load_manifest(manifest_path);

  std::vector<std::pair<std::string, ParticipantLog>> submissions;
  std::vector<std::string> warnings;
  for (const auto& file : files) {
    const std::string stem = file.stem().string();
    const auto it = manifest.find(file.filename().string());
    const std::string worker_id = it != manifest.end() ? it->second : stem;
    ParticipantLog log;
    try {
      log = parse_result(read_file(file), stem, &warnings);
    } catch (const SchemaError& e) {
      throw SchemaError(file.string() + ": " + e.path, e.what());
    }
    const auto violations = validate_log(log);
    if (!violations.empty()) {
      std::string detail = file.string() + " fails validation:";
      for (const auto& v : violations) {
        detail += std::string("\n  ") + to_string(v.code) + " at " + v.path;
      }
      throw Error(detail);
    }
    submissions.emplace_back(worker_id, std::move(log));
  }

  const auto deduped = dedupe_participants(submissions);
  const auto filtered = filter_dataset(deduped.kept, policy);

  atomic_write_file(out_path, logs_to_jsonl(filtered.kept));

  json report;
  report["parsed"] = files.size();
  report["kept"] = filtered.kept.size();
  json dup = json::array();
  for (const auto& d : deduped.duplicates) {
    dup.push_back({{"workerId", d.worker_id}, {"participantId", d.participant_id}});
  }
  report["duplicates"] = dup;
  json excluded = json::array();
  for (const auto& e : filtered.excluded) {
    excluded.push_back(
        {{"participantId", e.log.participant_id}, {"rule", to_string(e.rule)}});
  }
  report["excluded"] = excluded;
  report["warnings"] = warnings;
  const fs::path report_path = fs::path(out_path).replace_extension(".report.json");
  atomic_write_file(report_path, report.dump(2) + "\n");

  info(global, "kept " + std::to_string(filtered.kept.size()) + " of " +
                   std::to_string(files.size()) + " documents (" +
                   std::to_string(deduped.duplicates.size()) + " duplicates, " +
                   std::to_string(filtered.excluded.size()) + " excluded)");
  return kExitOk;
}

int cmd_features(const GlobalOptions& global, const std::string& in_path,
                 const std::string& out_path) {
  const auto logs = logs_from_jsonl(read_file(in_path));
  const auto rows = labeled_features(logs);
  atomic_write_file(out_path, features_to_csv(rows));
  info(global, "wrote " + std::to_string(rows.size()) + " feature rows");
  return kExitOk;
}

int cmd_calibrate(const GlobalOptions& global, const std::string& features_path,
                  const std::string& logs_path, int level, const std::string& rating_name,
                  bool per_participant, const std::string& out_path) {
  const RatingVariable rating = parse_rating_variable(rating_name);
  if (!features_path.empty() && rating != RatingVariable::TrustInfo) {
    throw CLI::ValidationError("--rating",
                               "features CSV carries only trustInfo; use --logs");
  }

  std::vector<LabeledFeatures> rows;
  if (!logs_path.empty()) {
    rows = labeled_features(logs_from_jsonl(read_file(logs_path)));
  } else {
    rows = features_from_csv(read_file(features_path));
  }

  QuantileTable table;
  if (per_participant) {
    std::map<std::string, std::vector<RatedFeatures>> grouped;
    for (const auto& row : rows) {
      grouped[row.participant_id].push_back({row.features, row.rating});
    }
    std::vector<std::vector<RatedFeatures>> datasets;
    datasets.reserve(grouped.size());
    for (auto& [id, dataset] : grouped) datasets.push_back(std::move(dataset));
    table = compute_quantiles_per_participant(datasets, TrustLevel{level}, rating);
  } else {
    std::vector<RatedFeatures> dataset;
    dataset.reserve(rows.size());
    for (const auto& row : rows) dataset.push_back({row.features, row.rating});
    table = compute_quantiles(dataset, TrustLevel{level}, rating);
  }

  atomic_write_file(out_path, table_to_json(table).dump(2) + "\n");
  if (!global.quiet) {
    if (global.format == "json") {
      std::cout << table_to_json(table).dump(2) << "\n";
    } else {
      std::cout << table_to_text(table);
    }
  }
  return kExitOk;
}

int cmd_predict(const GlobalOptions& global, const std::string& table_path,
                const std::string& features_path, const std::string& combinator_spec,
                bool favorites_filter, const std::string& out_path) {
  const auto table = table_from_json(json::parse(read_file(table_path)));
  const auto combinator = parse_combinator(combinator_spec);
  const auto rows = features_from_csv(read_file(features_path));

  std::string csv = std::string(kPredictionsCsvHeader) + "\n";
  std::size_t trusted = 0;
  for (const auto& row : rows) {
    const auto prediction = predict(row.features, table, combinator, favorites_filter);
    if (prediction.predicted_trusted) ++trusted;
    csv += prediction_row(row.participant_id, row.partner_id, prediction);
  }
  atomic_write_file(out_path, csv);
  info(global, "predicted trusted for " + std::to_string(trusted) + " of " +
                   std::to_string(rows.size()) + " partners");
  return kExitOk;
}

int cmd_stats(const GlobalOptions& global, const std::string& in_path,
              const std::string& method, const std::string& out_prefix) {
  const auto logs = logs_from_jsonl(read_file(in_path));
  const bool use_spearman = method == "spearman";

  const auto correlations = rating_correlations(logs, use_spearman);
  json corr_json;
  corr_json["method"] = use_spearman ? "spearman" : "pearson";
  corr_json["participants"] = logs.size();
  json pairs = json::array();
  std::string text;
  for (const auto& entry : correlations) {
    // The sample size behind the significance claim is ambiguous in survey
    // reports; state it at both granularities.
    const auto sig_participants = correlation_significance(
        entry.r, static_cast<std::int64_t>(logs.size()));
    json p;
    p["first"] = to_string(entry.first);
    p["second"] = to_string(entry.second);
    p["r"] = entry.r;
    p["n_partners"] = entry.n_pairs;
    p["t"] = entry.significance.t_statistic;
    p["significant_99_partners"] = entry.significance.significant_at_99;
    p["significant_99_participants"] = sig_participants.significant_at_99;
    pairs.push_back(p);
    char line[160];
    std::snprintf(line, sizeof line, "%-10s ~ %-10s  r=%+.4f  n=%lld  t=%+.2f  99%%:%s\n",
                  to_string(entry.first), to_string(entry.second), entry.r,
                  static_cast<long long>(entry.n_pairs),
                  entry.significance.t_statistic,
                  entry.significance.significant_at_99 ? "yes" : "no");
    text += line;
  }
  corr_json["pairs"] = pairs;

  // interaction classes from the survey selection strategy
  std::string classes_csv = "participant_id,class,level,count\n";
  for (const auto& log : logs) {
    std::map<std::string, InteractionClass> assignment;
    for (const auto& sel : select_survey_partners(log, 20, global.seed)) {
      assignment[sel.partner_id] = sel.interaction_class;
    }
    const auto histograms = class_distribution(log.partners, assignment);
    for (const InteractionClass cls :
         {InteractionClass::MostInteractions, InteractionClass::LeastInteractions,
          InteractionClass::Random}) {
      for (int level = 1; level <= 5; ++level) {
        classes_csv += log.participant_id + ',' + to_string(cls) + ',' +
                       std::to_string(level) + ',' +
                       std::to_string(histograms.counts[static_cast<std::size_t>(cls)]
                                                       [static_cast<std::size_t>(level - 1)]) +
                       '\n';
      }
    }
  }

  atomic_write_file(out_prefix + ".correlations.json", corr_json.dump(2) + "\n");
  atomic_write_file(out_prefix + ".classes.csv", classes_csv);
  if (!global.quiet) {
    if (global.format == "json") {
      std::cout << corr_json.dump(2) << "\n";
    } else {
      std::cout << text;
    }
  }
  return kExitOk;
}

int cmd_compare(const GlobalOptions& global, const std::string& in_path,
                const std::string& scheme_name, bool include_messages,
                const std::string& cutoffs_spec, const std::string& error_mode_name,
                bool pooled, const std::string& rating_name, const std::string& out_path) {
  const auto logs = logs_from_jsonl(read_file(in_path));
  const BinningScheme scheme =
      scheme_name == "B" ? BinningScheme::scheme_b() : BinningScheme::scheme_a();

  ActivityCutoffs cutoffs;
  {
    const auto comma = cutoffs_spec.find(',');
    if (comma == std::string::npos) {
      throw CLI::ValidationError("--cutoffs", "expected low,high");
    }
    try {
      cutoffs.low = std::stod(cutoffs_spec.substr(0, comma));
      cutoffs.high = std::stod(cutoffs_spec.substr(comma + 1));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--cutoffs", "expected low,high");
    }
    if (cutoffs.low > cutoffs.high) {
      throw CLI::ValidationError("--cutoffs", "low must not exceed high");
    }
  }

  const auto report = mean_error(
      logs, include_messages, cutoffs, scheme, parse_rating_variable(rating_name),
      error_mode_name == "disagree" ? ErrorMode::Disagreement : ErrorMode::Underestimate,
      pooled ? ErrorAggregation::Pooled : ErrorAggregation::PerParticipantMean);

  std::string csv = "participant_id,rated_partners,errors,fraction\n";
  char line[160];
  for (const auto& pe : report.per_participant) {
    std::snprintf(line, sizeof line, "%s,%lld,%lld,%.6f\n", pe.participant_id.c_str(),
                  static_cast<long long>(pe.rated_partners),
                  static_cast<long long>(pe.errors), pe.fraction);
    csv += line;
  }
  std::snprintf(line, sizeof line, "AGGREGATE,%lld,,%.6f\n",
                static_cast<long long>(report.rated_partners), report.mean_error);
  csv += line;
  atomic_write_file(out_path, csv);
  info(global, "mean error " + detail::fmt_double(report.mean_error) + " over " +
                   std::to_string(report.per_participant.size()) + " participants");
  return kExitOk;
}

int cmd_simulate(const GlobalOptions& global, std::int64_t devices,
                 const std::string& pairs_spec, double loss, double coupling,
                 const std::string& table_path, const std::string& out_prefix) {
  SimConfig config;
  config.n_devices = devices;
  config.seed = global.seed;
  config.trust_coupling = coupling;

  PairPlan plan;
  if (pairs_spec == "mesh") {
    plan = PairPlan::mesh();
  } else if (pairs_spec.rfind("random:", 0) == 0) {
    plan = PairPlan::random_pairs(std::stoull(pairs_spec.substr(7)));
  } else if (pairs_spec.rfind("file:", 0) == 0) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::istringstream in(read_file(pairs_spec.substr(5)));
    std::string pair_line;
    while (std::getline(in, pair_line)) {
      if (pair_line.empty()) continue;
      const auto comma = pair_line.find(',');
      if (comma == std::string::npos) throw ParseError("pair line without comma: " + pair_line);
      pairs.emplace_back(std::stoull(pair_line.substr(0, comma)),
                         std::stoull(pair_line.substr(comma + 1)));
    }
    plan = PairPlan::explicit_pairs(std::move(pairs));
  } else {
    throw CLI::ValidationError("--pairs", "expected mesh | random:N | file:PATH");
  }

  const QuantileTable table = table_path.empty()
                                  ? reference_table()
                                  : table_from_json(json::parse(read_file(table_path)));
  PairwiseOptions options;
  options.loss_prob = loss;

  const auto report = run_scenario(config, plan, table, options);
  atomic_write_file(out_prefix + ".csv", report.to_csv());
  atomic_write_file(out_prefix + ".json", report.to_json().dump(2) + "\n");
  info(global, "simulated " + std::to_string(report.pairs.size()) + " pairs over " +
                   std::to_string(devices) + " devices");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"social-trust engine: derive per-contact trust from call/message "
               "logs and pair simulated devices via mutual contacts"};
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--seed", global.seed, "global RNG seed");
  app.add_flag("--quiet", global.quiet, "suppress progress output");
  app.add_option("--format", global.format, "stdout format: csv|json")
      ->check(CLI::IsMember({"csv", "json"}));

  // ingest
  auto* ingest = app.add_subcommand("ingest", "parse, dedupe and filter survey documents");
  std::vector<std::string> ingest_inputs;
  std::string ingest_manifest, ingest_out, ingest_policy = "default";
  FilterPolicy policy;
  ingest->add_option("--in", ingest_inputs, "YAML files or directories")->required();
  ingest->add_option("--manifest", ingest_manifest, "CSV mapping filename,worker_id");
  ingest->add_option("--policy", ingest_policy, "filter policy name")
      ->check(CLI::IsMember({"default"}));
  ingest->add_option("--min-span-days", policy.min_span_days, "short-log threshold (days)");
  ingest->add_option("--min-partners-short", policy.min_partners_for_short_logs,
                     "partner threshold for short logs");
  ingest->add_option("--min-partners-abs", policy.min_partners_absolute,
                     "absolute partner minimum");
  ingest->add_option("--out", ingest_out, "output JSONL path")->required();

  // features
  auto* features = app.add_subcommand("features", "extract per-partner feature vectors");
  std::string features_in, features_out;
  features->add_option("--in", features_in, "kept logs (JSONL)")->required();
  features->add_option("--out", features_out, "output CSV path")->required();

  // calibrate
  auto* calibrate = app.add_subcommand("calibrate", "compute the quantile threshold table");
  std::string cal_features, cal_logs, cal_rating = "trustInfo", cal_out;
  int cal_level = 1;
  bool cal_per_participant = false;
  calibrate->add_option("--features", cal_features, "features CSV");
  calibrate->add_option("--logs", cal_logs, "kept logs JSONL (enables --rating)");
  calibrate->add_option("--level", cal_level, "reference rating level")
      ->check(CLI::Range(1, 5));
  calibrate->add_option("--rating", cal_rating, "rating variable");
  calibrate->add_flag("--per-participant", cal_per_participant,
                      "average per-participant tables instead of pooling");
  calibrate->add_option("--out", cal_out, "output table JSON")->required();

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "grade partners against a table");
  std::string pred_table, pred_features, pred_combinator = "or", pred_out;
  bool pred_favorites = false;
  predict_cmd->add_option("--table", pred_table, "table JSON")->required();
  predict_cmd->add_option("--features", pred_features, "features CSV")->required();
  predict_cmd->add_option("--combinator", pred_combinator, "or | and:<var>,<var>");
  predict_cmd->add_flag("--favorites-filter", pred_favorites,
                        "only favorites can be predicted trusted");
  predict_cmd->add_option("--out", pred_out, "output predictions CSV")->required();

  // stats
  auto* stats = app.add_subcommand("stats", "rating correlations and class histograms");
  std::string stats_in, stats_method = "pearson", stats_out;
  stats->add_option("--in", stats_in, "kept logs (JSONL)")->required();
  stats->add_option("--method", stats_method, "correlation method")
      ->check(CLI::IsMember({"pearson", "spearman"}));
  stats->add_option("--out", stats_out, "output prefix")->required();

  // compare
  auto* compare = app.add_subcommand("compare", "closeness-group comparison and mean error");
  std::string cmp_in, cmp_scheme = "A", cmp_cutoffs = "2,10", cmp_error = "under",
              cmp_rating = "trustInfo", cmp_out;
  bool cmp_messages = false, cmp_pooled = false;
  compare->add_option("--in", cmp_in, "kept logs (JSONL)")->required();
  compare->add_option("--scheme", cmp_scheme, "rating binning scheme")
      ->check(CLI::IsMember({"A", "B"}));
  compare->add_flag("--include-messages", cmp_messages, "count messages in the activity score");
  compare->add_option("--cutoffs", cmp_cutoffs, "low,high activity cutoffs");
  compare->add_option("--error", cmp_error, "under | disagree")
      ->check(CLI::IsMember({"under", "disagree"}));
  compare->add_flag("--pooled", cmp_pooled, "pool partners instead of per-participant mean");
  compare->add_option("--rating", cmp_rating, "rating variable");
  compare->add_option("--out", cmp_out, "output CSV path")->required();

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run the pairwise protocol on a synthetic population");
  std::int64_t sim_devices = 0;
  std::string sim_pairs = "mesh", sim_table, sim_out;
  double sim_loss = 0.0, sim_coupling = 0.75;
  simulate->add_option("--devices", sim_devices, "population size")->required();
  simulate->add_option("--pairs", sim_pairs, "mesh | random:N | file:PATH");
  simulate->add_option("--loss", sim_loss, "per-message drop probability")
      ->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--coupling", sim_coupling, "trust-interaction coupling")
      ->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--table", sim_table, "table JSON (default: shipped calibration)");
  simulate->add_option("--out", sim_out, "output prefix")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsageError;
  }

  try {
    if (app.got_subcommand(ingest)) {
      return cmd_ingest(global, ingest_inputs, ingest_manifest, policy, ingest_out);
    }
    if (app.got_subcommand(features)) {
      return cmd_features(global, features_in, features_out);
    }
    if (app.got_subcommand(calibrate)) {
      if (cal_features.empty() == cal_logs.empty()) {
        std::cerr << "calibrate: exactly one of --features / --logs is required\n";
        return kExitUsageError;
      }
      return cmd_calibrate(global, cal_features, cal_logs, cal_level, cal_rating,
                           cal_per_participant, cal_out);
    }
    if (app.got_subcommand(predict_cmd)) {
      return cmd_predict(global, pred_table, pred_features, pred_combinator,
                         pred_favorites, pred_out);
    }
    if (app.got_subcommand(stats)) {
      return cmd_stats(global, stats_in, stats_method, stats_out);
    }
    if (app.got_subcommand(compare)) {
      return cmd_compare(global, cmp_in, cmp_scheme, cmp_messages, cmp_cutoffs, cmp_error,
                         cmp_pooled, cmp_rating, cmp_out);
    }
    if (app.got_subcommand(simulate)) {
      return cmd_simulate(global, sim_devices, sim_pairs, sim_loss, sim_coupling,
                          sim_table, sim_out);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsageError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDataError;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitUsageError;
}
