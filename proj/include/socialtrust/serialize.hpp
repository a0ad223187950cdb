#pragma once

// (De)serialization of the survey-result document model. The canonical key
// layout is identical for the YAML input documents and the JSONL pipeline
// intermediates:
//
//   general: {addressBookSize, totalCalls, totalMessages, activePartners}
//   partners:
//     - id, surveyPosition?, isHuman, isFavorite,
//       rating: {closeness?, trustInfo?, trustBest?},
//       calls:    [{date, type: in|out|missed, duration, tag?}]
//       messages: [{date, type: in|out, length, tag?}]
//
// Absent optional keys mean "not provided". Unknown keys are ignored with a
// warning so documents produced by newer writers still load.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "socialtrust/datamodel.hpp"
#include "socialtrust/errors.hpp"

namespace socialtrust {

using json = nlohmann::json;

namespace detail {

inline std::int64_t require_int(const json& node, const char* key,
                                const std::string& path) {
  const std::string at = path + "." + key;
  if (!node.contains(key)) throw SchemaError(at, "missing required key");
  const json& v = node.at(key);
  if (!v.is_number_integer()) throw SchemaError(at, "expected an integer");
  return v.get<std::int64_t>();
}

inline std::int64_t require_nonneg(const json& node, const char* key,
                                   const std::string& path) {
  const std::int64_t v = require_int(node, key, path);
  if (v < 0) throw SchemaError(path + "." + key, "must be non-negative");
  return v;
}

inline std::optional<std::int64_t> optional_int(const json& node, const char* key,
                                                const std::string& path) {
  if (!node.contains(key) || node.at(key).is_null()) return std::nullopt;
  if (!node.at(key).is_number_integer()) {
    throw SchemaError(path + "." + key, "expected an integer");
  }
  return node.at(key).get<std::int64_t>();
}

inline bool require_bool(const json& node, const char* key, const std::string& path) {
  const std::string at = path + "." + key;
  if (!node.contains(key)) throw SchemaError(at, "missing required key");
  if (!node.at(key).is_boolean()) throw SchemaError(at, "expected a boolean");
  return node.at(key).get<bool>();
}

inline std::string require_string(const json& node, const char* key,
                                  const std::string& path) {
  const std::string at = path + "." + key;
  if (!node.contains(key)) throw SchemaError(at, "missing required key");
  if (!node.at(key).is_string()) throw SchemaError(at, "expected a string");
  return node.at(key).get<std::string>();
}

inline std::optional<std::string> optional_tag(const json& node, const std::string&) {
  if (!node.contains("tag") || node.at("tag").is_null()) return std::nullopt;
  const json& v = node.at("tag");
  // Plain YAML scalars such as `tag: 123` arrive as numbers; coerce.
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

inline std::optional<int> likert(const json& node, const char* key,
                                 const std::string& path) {
  auto v = optional_int(node, key, path);
  if (!v) return std::nullopt;
  if (*v < 1 || *v > 5) throw SchemaError(path + "." + key, "rating must be in 1..5");
  return static_cast<int>(*v);
}

inline void warn_unknown(const json& node, std::initializer_list<const char*> known,
                         const std::string& path, std::vector<std::string>* warnings) {
  if (!warnings || !node.is_object()) return;
  for (auto it = node.begin(); it != node.end(); ++it) {
    bool found = false;
    for (const char* k : known) {
      if (it.key() == k) {
        found = true;
        break;
      }
    }
    if (!found) warnings->push_back("ignored unknown key " + path + "." + it.key());
  }
}

}  // namespace detail

inline CallRecord call_from_json(const json& node, const std::string& path,
                                 std::vector<std::string>* warnings = nullptr) {
  if (!node.is_object()) throw SchemaError(path, "expected a mapping");
  detail::warn_unknown(node, {"date", "type", "duration", "tag"}, path, warnings);
  CallRecord c;
  c.relative_date = detail::require_nonneg(node, "date", path);
  const std::string type = detail::require_string(node, "type", path);
  if (type == "in") {
    c.direction = CallDirection::Incoming;
  } else if (type == "out") {
    c.direction = CallDirection::Outgoing;
  } else if (type == "missed") {
    c.direction = CallDirection::Missed;
  } else {
    throw SchemaError(path + ".type", "expected one of in|out|missed");
  }
  c.duration = detail::require_nonneg(node, "duration", path);
  if (c.direction == CallDirection::Missed && c.duration != 0) {
    throw SchemaError(path + ".duration", "missed call must have duration 0");
  }
  c.tag = detail::optional_tag(node, path);
  return c;
}

inline MessageRecord message_from_json(const json& node, const std::string& path,
                                       std::vector<std::string>* warnings = nullptr) {
  if (!node.is_object()) throw SchemaError(path, "expected a mapping");
  detail::warn_unknown(node, {"date", "type", "length", "tag"}, path, warnings);
  MessageRecord m;
  m.relative_date = detail::require_nonneg(node, "date", path);
  const std::string type = detail::require_string(node, "type", path);
  if (type == "in") {
    m.direction = MessageDirection::Incoming;
  } else if (type == "out") {
    m.direction = MessageDirection::Outgoing;
  } else {
    throw SchemaError(path + ".type", "expected one of in|out");
  }
  m.length = detail::require_int(node, "length", path);
  if (m.length < 1) throw SchemaError(path + ".length", "must be positive");
  m.tag = detail::optional_tag(node, path);
  return m;
}

inline PartnerRecord partner_from_json(const json& node, const std::string& path,
                                       std::vector<std::string>* warnings = nullptr) {
  if (!node.is_object()) throw SchemaError(path, "expected a mapping");
  detail::warn_unknown(node,
                       {"id", "surveyPosition", "isHuman", "isFavorite", "rating",
                        "calls", "messages"},
                       path, warnings);
  PartnerRecord p;
  p.partner_id = detail::require_string(node, "id", path);
  auto pos = detail::optional_int(node, "surveyPosition", path);
  if (pos) {
    if (*pos < 1 || *pos > 20) {
      throw SchemaError(path + ".surveyPosition", "must be in 1..20");
    }
    p.survey_position = static_cast<int>(*pos);
  }
  p.is_human = detail::require_bool(node, "isHuman", path);
  p.is_favorite = detail::require_bool(node, "isFavorite", path);
  if (node.contains("rating") && !node.at("rating").is_null()) {
    const json& r = node.at("rating");
    if (!r.is_object()) throw SchemaError(path + ".rating", "expected a mapping");
    detail::warn_unknown(r, {"closeness", "trustInfo", "trustBest"}, path + ".rating",
                         warnings);
    p.rating.closeness = detail::likert(r, "closeness", path + ".rating");
    p.rating.trust_info = detail::likert(r, "trustInfo", path + ".rating");
    p.rating.trust_best = detail::likert(r, "trustBest", path + ".rating");
  }
  if (!p.is_human && p.rating.has_any()) {
    throw SchemaError(path + ".rating", "non-person entries carry no rating");
  }
  if (node.contains("calls") && !node.at("calls").is_null()) {
    const json& calls = node.at("calls");
    if (!calls.is_array()) throw SchemaError(path + ".calls", "expected a sequence");
    for (std::size_t i = 0; i < calls.size(); ++i) {
      p.calls.push_back(
          call_from_json(calls[i], detail::idx(path + ".calls", i), warnings));
    }
  }
  if (node.contains("messages") && !node.at("messages").is_null()) {
    const json& msgs = node.at("messages");
    if (!msgs.is_array()) throw SchemaError(path + ".messages", "expected a sequence");
    for (std::size_t i = 0; i < msgs.size(); ++i) {
      p.messages.push_back(
          message_from_json(msgs[i], detail::idx(path + ".messages", i), warnings));
    }
  }
  if (p.calls.empty() && p.messages.empty()) {
    throw SchemaError(path, "partner must appear in the logs at least once");
  }
  return p;
}

inline ParticipantLog log_from_json(const json& doc, std::string participant_id = {},
                                    std::vector<std::string>* warnings = nullptr) {
  if (!doc.is_object()) throw SchemaError("$", "expected a mapping at document root");
  detail::warn_unknown(doc, {"participantId", "general", "partners"}, "$", warnings);
  ParticipantLog log;
  if (doc.contains("participantId") && doc.at("participantId").is_string()) {
    log.participant_id = doc.at("participantId").get<std::string>();
  }
  if (!participant_id.empty()) log.participant_id = std::move(participant_id);

  if (!doc.contains("general")) throw SchemaError("general", "missing required key");
  const json& g = doc.at("general");
  if (!g.is_object()) throw SchemaError("general", "expected a mapping");
  detail::warn_unknown(
      g, {"addressBookSize", "totalCalls", "totalMessages", "activePartners"},
      "general", warnings);
  log.address_book_size = detail::require_nonneg(g, "addressBookSize", "general");
  log.total_calls = detail::require_nonneg(g, "totalCalls", "general");
  log.total_messages = detail::require_nonneg(g, "totalMessages", "general");
  auto active = detail::optional_int(g, "activePartners", "general");
  if (active) {
    if (*active < 0) throw SchemaError("general.activePartners", "must be non-negative");
    log.active_partners = active;
  }

  if (doc.contains("partners") && !doc.at("partners").is_null()) {
    const json& partners = doc.at("partners");
    if (!partners.is_array()) throw SchemaError("partners", "expected a sequence");
    for (std::size_t i = 0; i < partners.size(); ++i) {
      log.partners.push_back(
          partner_from_json(partners[i], detail::idx("partners", i), warnings));
    }
  }
  return log;
}

inline json to_json(const CallRecord& c) {
  json node{{"date", c.relative_date},
            {"type", to_string(c.direction)},
            {"duration", c.duration}};
  if (c.tag) node["tag"] = *c.tag;
  return node;
}

inline json to_json(const MessageRecord& m) {
  json node{{"date", m.relative_date},
            {"type", to_string(m.direction)},
            {"length", m.length}};
  if (m.tag) node["tag"] = *m.tag;
  return node;
}

inline json to_json(const PartnerRecord& p) {
  json node;
  node["id"] = p.partner_id;
  if (p.survey_position) node["surveyPosition"] = *p.survey_position;
  node["isHuman"] = p.is_human;
  node["isFavorite"] = p.is_favorite;
  json rating = json::object();
  if (p.rating.closeness) rating["closeness"] = *p.rating.closeness;
  if (p.rating.trust_info) rating["trustInfo"] = *p.rating.trust_info;
  if (p.rating.trust_best) rating["trustBest"] = *p.rating.trust_best;
  if (!rating.empty()) node["rating"] = rating;
  json calls = json::array();
  for (const auto& c : p.calls) calls.push_back(to_json(c));
  node["calls"] = calls;
  json msgs = json::array();
  for (const auto& m : p.messages) msgs.push_back(to_json(m));
  node["messages"] = msgs;
  return node;
}

inline json to_json(const ParticipantLog& log) {
  json doc;
  doc["participantId"] = log.participant_id;
  json g{{"addressBookSize", log.address_book_size},
         {"totalCalls", log.total_calls},
         {"totalMessages", log.total_messages}};
  if (log.active_partners) g["activePartners"] = *log.active_partners;
  doc["general"] = g;
  json partners = json::array();
  for (const auto& p : log.partners) partners.push_back(to_json(p));
  doc["partners"] = partners;
  return doc;
}

}  // namespace socialtrust
