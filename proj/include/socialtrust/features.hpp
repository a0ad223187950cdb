#pragma once

// Per-partner communication indicators: the absolute sums and counts plus
// the relative share of the participant's total calls/messages. Relative
// values are percentages so they compare directly against the calibrated
// quantile thresholds.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "socialtrust/datamodel.hpp"

namespace socialtrust {

namespace detail {

struct LogTotals {
  std::int64_t calls = 0;
  std::int64_t messages = 0;
};

// Denominators for the relative indicators: the sums over the partners'
// events, not the general-section totals (those may count non-contacts and
// would break the normalization to 100).
inline LogTotals partner_totals(const ParticipantLog& log) {
  LogTotals t;
  for (const auto& p : log.partners) {
    t.calls += static_cast<std::int64_t>(p.calls.size());
    t.messages += static_cast<std::int64_t>(p.messages.size());
  }
  return t;
}

inline FeatureVector extract_one(const PartnerRecord& partner, const LogTotals& totals,
                                 double span_days) {
  FeatureVector fv;
  fv.num_calls = static_cast<std::int64_t>(partner.calls.size());
  fv.num_msgs = static_cast<std::int64_t>(partner.messages.size());
  for (const auto& c : partner.calls) fv.dur_calls += c.duration;
  for (const auto& m : partner.messages) fv.len_msgs += m.length;
  fv.rel_calls = totals.calls > 0
                     ? 100.0 * static_cast<double>(fv.num_calls) / static_cast<double>(totals.calls)
                     : 0.0;
  fv.rel_msgs = totals.messages > 0
                    ? 100.0 * static_cast<double>(fv.num_msgs) / static_cast<double>(totals.messages)
                    : 0.0;
  fv.avg_call_dur = fv.num_calls > 0
                        ? static_cast<double>(fv.dur_calls) / static_cast<double>(fv.num_calls)
                        : 0.0;
  fv.avg_msg_len = fv.num_msgs > 0
                       ? static_cast<double>(fv.len_msgs) / static_cast<double>(fv.num_msgs)
                       : 0.0;
  fv.interactions_per_day = static_cast<double>(fv.num_calls + fv.num_msgs) /
                            std::max(span_days, 1.0);
  fv.is_favorite = partner.is_favorite;
  return fv;
}

}  // namespace detail

// Features of one partner within its log. Pure; event order is irrelevant.
inline FeatureVector extract_features(const ParticipantLog& log,
                                      const PartnerRecord& partner) {
  return detail::extract_one(partner, detail::partner_totals(log), log.log_span_days());
}

// Features of every partner. When any calls exist the rel_calls values sum
// to 100 (up to rounding); same for messages.
inline std::map<std::string, FeatureVector> extract_all(const ParticipantLog& log) {
  const auto totals = detail::partner_totals(log);
  const double span = log.log_span_days();
  std::map<std::string, FeatureVector> out;
  for (const auto& p : log.partners) {
    out.emplace(p.partner_id, detail::extract_one(p, totals, span));
  }
  return out;
}

// Feature vector paired with its survey labels; the row format of the
// features CSV and the unit of every calibration dataset.
struct LabeledFeatures {
  std::string participant_id;
  std::string partner_id;
  FeatureVector features;
  Rating rating;
};

inline std::vector<LabeledFeatures> labeled_features(const ParticipantLog& log) {
  const auto totals = detail::partner_totals(log);
  const double span = log.log_span_days();
  std::vector<LabeledFeatures> rows;
  rows.reserve(log.partners.size());
  for (const auto& p : log.partners) {
    rows.push_back({log.participant_id, p.partner_id,
                    detail::extract_one(p, totals, span), p.rating});
  }
  return rows;
}

inline std::vector<LabeledFeatures> labeled_features(
    const std::vector<ParticipantLog>& logs) {
  std::vector<LabeledFeatures> rows;
  for (const auto& log : logs) {
    auto part = labeled_features(log);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

}  // namespace socialtrust
