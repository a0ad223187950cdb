#pragma once

// Survey-result ingestion: YAML parsing, duplicate-submission handling, the
// dataset filter policy, and the partner-selection strategy used when a
// participant is surveyed.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "socialtrust/datamodel.hpp"
#include "socialtrust/errors.hpp"
#include "socialtrust/rng.hpp"
#include "socialtrust/serialize.hpp"

namespace socialtrust {

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline json yaml_to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Scalar: {
      // Quoted scalars stay strings; plain scalars get the usual YAML
      // resolution order.
      if (node.Tag() == "!") return node.Scalar();
      try {
        return node.as<std::int64_t>();
      } catch (const YAML::Exception&) {
      }
      try {
        return node.as<double>();
      } catch (const YAML::Exception&) {
      }
      if (node.Scalar() == "true" || node.Scalar() == "false") {
        return node.Scalar() == "true";
      }
      return node.Scalar();
    }
    case YAML::NodeType::Sequence: {
      json arr = json::array();
      for (const auto& item : node) arr.push_back(yaml_to_json(item));
      return arr;
    }
    case YAML::NodeType::Map: {
      json obj = json::object();
      for (const auto& kv : node) obj[kv.first.as<std::string>()] = yaml_to_json(kv.second);
      return obj;
    }
  }
  return nullptr;
}

}  // namespace detail

// Parses one survey-result document (YAML, UTF-8). `participant_id` labels
// the log (documents themselves carry no identifier); unknown keys are
// reported through `warnings` and otherwise ignored.
//
// Throws ParseError for undecodable input and SchemaError (with node path)
// for schema violations.
inline ParticipantLog parse_result(const std::string& document,
                                   std::string participant_id = {},
                                   std::vector<std::string>* warnings = nullptr) {
  YAML::Node root;
  try {
    root = YAML::Load(document);
  } catch (const YAML::Exception& e) {
    throw ParseError(std::string("invalid YAML: ") + e.what());
  }
  if (!root.IsMap()) throw ParseError("document root must be a mapping");
  return log_from_json(detail::yaml_to_json(root), std::move(participant_id), warnings);
}

// Canonical YAML rendering of a log; parse_result(to_yaml(log)) round-trips
// field for field.
inline std::string to_yaml(const ParticipantLog& log) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "general" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "addressBookSize" << YAML::Value << log.address_book_size;
  out << YAML::Key << "totalCalls" << YAML::Value << log.total_calls;
  out << YAML::Key << "totalMessages" << YAML::Value << log.total_messages;
  if (log.active_partners) {
    out << YAML::Key << "activePartners" << YAML::Value << *log.active_partners;
  }
  out << YAML::EndMap;
  out << YAML::Key << "partners" << YAML::Value << YAML::BeginSeq;
  for (const auto& p : log.partners) {
    out << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << p.partner_id;
    if (p.survey_position) {
      out << YAML::Key << "surveyPosition" << YAML::Value << *p.survey_position;
    }
    out << YAML::Key << "isHuman" << YAML::Value << p.is_human;
    out << YAML::Key << "isFavorite" << YAML::Value << p.is_favorite;
    if (p.rating.has_any()) {
      out << YAML::Key << "rating" << YAML::Value << YAML::BeginMap;
      if (p.rating.closeness) out << YAML::Key << "closeness" << YAML::Value << *p.rating.closeness;
      if (p.rating.trust_info) out << YAML::Key << "trustInfo" << YAML::Value << *p.rating.trust_info;
      if (p.rating.trust_best) out << YAML::Key << "trustBest" << YAML::Value << *p.rating.trust_best;
      out << YAML::EndMap;
    }
    out << YAML::Key << "calls" << YAML::Value << YAML::BeginSeq;
    for (const auto& c : p.calls) {
      out << YAML::Flow << YAML::BeginMap;
      out << YAML::Key << "date" << YAML::Value << c.relative_date;
      out << YAML::Key << "type" << YAML::Value << to_string(c.direction);
      out << YAML::Key << "duration" << YAML::Value << c.duration;
      if (c.tag) out << YAML::Key << "tag" << YAML::Value << YAML::DoubleQuoted << *c.tag;
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "messages" << YAML::Value << YAML::BeginSeq;
    for (const auto& m : p.messages) {
      out << YAML::Flow << YAML::BeginMap;
      out << YAML::Key << "date" << YAML::Value << m.relative_date;
      out << YAML::Key << "type" << YAML::Value << to_string(m.direction);
      out << YAML::Key << "length" << YAML::Value << m.length;
      if (m.tag) out << YAML::Key << "tag" << YAML::Value << YAML::DoubleQuoted << *m.tag;
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

// ---------------------------------------------------------------------------
// Deduplication

struct DuplicateSubmission {
  std::string worker_id;
  std::string participant_id;

  bool operator==(const DuplicateSubmission&) const = default;
};

struct DedupeResult {
  std::vector<ParticipantLog> kept;
  std::vector<DuplicateSubmission> duplicates;
};

// Keeps exactly one log per worker: the chronologically first submission
// (input order is submission order). Later submissions are reported.
inline DedupeResult dedupe_participants(
    const std::vector<std::pair<std::string, ParticipantLog>>& submissions) {
  DedupeResult result;
  std::set<std::string> seen;
  for (const auto& [worker_id, log] : submissions) {
    if (seen.insert(worker_id).second) {
      result.kept.push_back(log);
    } else {
      result.duplicates.push_back({worker_id, log.participant_id});
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Filter policy

// Exclusion thresholds for unreliable logs: logs that are both short-dated
// and sparse, logs with almost no communication partners, and submissions
// where the participant never gave a rating.
struct FilterPolicy {
  double min_span_days = 7.0;
  std::int64_t min_partners_for_short_logs = 10;
  std::int64_t min_partners_absolute = 5;  // excludes logs with <= 4 partners
};

enum class ExclusionRule {
  ShortLogFewPartners,
  TooFewPartnersAbsolute,
  NoRatingsGiven,
};

inline const char* to_string(ExclusionRule rule) {
  switch (rule) {
    case ExclusionRule::ShortLogFewPartners: return "ShortLogFewPartners";
    case ExclusionRule::TooFewPartnersAbsolute: return "TooFewPartnersAbsolute";
    case ExclusionRule::NoRatingsGiven: return "NoRatingsGiven";
  }
  return "?";
}

struct Exclusion {
  ParticipantLog log;
  ExclusionRule rule;
};

struct FilterResult {
  std::vector<ParticipantLog> kept;
  std::vector<Exclusion> excluded;
};

// First rule that excludes the log, in declaration order; nullopt if kept.
inline std::optional<ExclusionRule> exclusion_rule(const ParticipantLog& log,
                                                   const FilterPolicy& policy) {
  const auto partners = static_cast<std::int64_t>(log.partners.size());
  if (log.log_span_days() < policy.min_span_days &&
      partners < policy.min_partners_for_short_logs) {
    return ExclusionRule::ShortLogFewPartners;
  }
  if (partners < policy.min_partners_absolute) {
    return ExclusionRule::TooFewPartnersAbsolute;
  }
  const bool any_rating = std::any_of(log.partners.begin(), log.partners.end(),
                                      [](const PartnerRecord& p) { return p.rating.has_any(); });
  if (!any_rating) return ExclusionRule::NoRatingsGiven;
  return std::nullopt;
}

// Partitions the input: kept + excluded == input, in input order.
inline FilterResult filter_dataset(const std::vector<ParticipantLog>& logs,
                                   const FilterPolicy& policy = {}) {
  FilterResult result;
  for (const auto& log : logs) {
    if (auto rule = exclusion_rule(log, policy)) {
      result.excluded.push_back({log, *rule});
    } else {
      result.kept.push_back(log);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Survey partner selection

enum class InteractionClass { MostInteractions, LeastInteractions, Random };

inline const char* to_string(InteractionClass c) {
  switch (c) {
    case InteractionClass::MostInteractions: return "most";
    case InteractionClass::LeastInteractions: return "least";
    case InteractionClass::Random: return "random";
  }
  return "?";
}

struct SurveySelection {
  std::string partner_id;
  InteractionClass interaction_class;

  bool operator==(const SurveySelection&) const = default;
};

// Reproduces the survey's partner prompting order: slots cycle through the
// classes most -> least -> random. "Most" takes the unselected partner with
// the highest combined call+message count, "least" the lowest nonzero count,
// "random" draws uniformly from the unselected remainder. Ties break by
// ascending partner_id, making the selection fully deterministic for a
// fixed seed.
inline std::vector<SurveySelection> select_survey_partners(const ParticipantLog& log,
                                                           std::size_t n = 20,
                                                           std::uint64_t seed = 0) {
  struct Candidate {
    const PartnerRecord* partner;
    std::int64_t count;
    bool selected = false;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(log.partners.size());
  for (const auto& p : log.partners) {
    candidates.push_back({&p, p.interaction_count()});
  }
  // Ascending partner_id; linear scans below then get tie-breaking for free.
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return a.partner->partner_id < b.partner->partner_id;
  });

  Rng rng(seed);
  const std::size_t want = std::min(n, candidates.size());
  std::vector<SurveySelection> selection;
  selection.reserve(want);

  auto pick_extreme = [&](bool most) -> Candidate* {
    Candidate* best = nullptr;
    for (auto& c : candidates) {
      if (c.selected) continue;
      if (most) {
        if (!best || c.count > best->count) best = &c;
      } else {
        if (c.count < 1) continue;  // least-interactions excludes empty partners
        if (!best || c.count < best->count) best = &c;
      }
    }
    return best;
  };
  auto pick_random = [&]() -> Candidate* {
    std::vector<Candidate*> open;
    for (auto& c : candidates) {
      if (!c.selected) open.push_back(&c);
    }
    if (open.empty()) return nullptr;
    return open[rng.below(open.size())];
  };

  for (std::size_t slot = 0; selection.size() < want; ++slot) {
    InteractionClass cls;
    Candidate* chosen = nullptr;
    switch (slot % 3) {
      case 0:
        cls = InteractionClass::MostInteractions;
        chosen = pick_extreme(true);
        break;
      case 1:
        cls = InteractionClass::LeastInteractions;
        chosen = pick_extreme(false);
        break;
      default:
        cls = InteractionClass::Random;
        chosen = pick_random();
        break;
    }
    if (!chosen) {
      // Only zero-interaction partners remain and the slot wanted "least";
      // reassign the slot to a random draw so the quota still fills.
      cls = InteractionClass::Random;
      chosen = pick_random();
      if (!chosen) break;
    }
    chosen->selected = true;
    selection.push_back({chosen->partner->partner_id, cls});
  }
  return selection;
}

}  // namespace socialtrust
