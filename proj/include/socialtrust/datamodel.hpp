#pragma once

// Domain types shared across the whole pipeline. Everything here is an
// immutable value object after construction; instances can be freely copied
// and shared between threads.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace socialtrust {

enum class CallDirection { Incoming, Outgoing, Missed };
enum class MessageDirection { Incoming, Outgoing };

inline const char* to_string(CallDirection d) {
  switch (d) {
    case CallDirection::Incoming: return "in";
    case CallDirection::Outgoing: return "out";
    case CallDirection::Missed: return "missed";
  }
  return "?";
}

inline const char* to_string(MessageDirection d) {
  return d == MessageDirection::Incoming ? "in" : "out";
}

// One call log entry. The relative date is the number of seconds between the
// event and survey time, extended by a constant per-participant random
// offset; differences within one participant are therefore exact.
struct CallRecord {
  std::int64_t relative_date = 0;
  CallDirection direction = CallDirection::Incoming;
  std::int64_t duration = 0;  // seconds; missed calls carry 0
  std::optional<std::string> tag;

  bool operator==(const CallRecord&) const = default;
};

struct MessageRecord {
  std::int64_t relative_date = 0;
  MessageDirection direction = MessageDirection::Incoming;
  std::int64_t length = 1;  // characters, >= 1
  std::optional<std::string> tag;

  bool operator==(const MessageRecord&) const = default;
};

// Likert responses, 1 (strongly disagree) .. 5 (strongly agree). Absent
// optionals mean the contact was not rated.
struct Rating {
  std::optional<int> closeness;   // "I feel close to this person."
  std::optional<int> trust_info;  // "I would trust this person with sensitive information."
  std::optional<int> trust_best;  // "I trust that this person wants the best for me."

  bool has_any() const { return closeness || trust_info || trust_best; }
  bool operator==(const Rating&) const = default;
};

enum class RatingVariable { Closeness, TrustInfo, TrustBest };

inline const char* to_string(RatingVariable v) {
  switch (v) {
    case RatingVariable::Closeness: return "closeness";
    case RatingVariable::TrustInfo: return "trustInfo";
    case RatingVariable::TrustBest: return "trustBest";
  }
  return "?";
}

inline std::optional<int> rating_value(const Rating& r, RatingVariable v) {
  switch (v) {
    case RatingVariable::Closeness: return r.closeness;
    case RatingVariable::TrustInfo: return r.trust_info;
    case RatingVariable::TrustBest: return r.trust_best;
  }
  return std::nullopt;
}

// Validated Likert level.
struct TrustLevel {
  int value = 1;

  constexpr bool valid() const { return value >= 1 && value <= 5; }
  auto operator<=>(const TrustLevel&) const = default;
};

// One contact that appears at least once in the call or message logs.
struct PartnerRecord {
  std::string partner_id;  // salted hash of the original number/contact
  std::optional<int> survey_position;  // 1..20 when the partner was prompted
  Rating rating;
  bool is_human = true;
  bool is_favorite = false;
  std::vector<CallRecord> calls;
  std::vector<MessageRecord> messages;

  std::int64_t interaction_count() const {
    return static_cast<std::int64_t>(calls.size() + messages.size());
  }
  bool operator==(const PartnerRecord&) const = default;
};

// One participant's full survey result: general statistics plus per-partner
// detail. The general section may count events with non-contacts, so its
// totals bound the partner sums from above.
struct ParticipantLog {
  std::string participant_id;
  std::int64_t address_book_size = 0;
  std::int64_t total_calls = 0;
  std::int64_t total_messages = 0;
  std::optional<std::int64_t> active_partners;  // general-section count
  std::vector<PartnerRecord> partners;

  bool has_events() const {
    for (const auto& p : partners) {
      if (!p.calls.empty() || !p.messages.empty()) return true;
    }
    return false;
  }

  // (max relative_date - min relative_date) / 86400 over all events.
  // The per-participant offset is constant, so the difference is offset-free.
  double log_span_days() const {
    std::int64_t lo = 0, hi = 0;
    bool seen = false;
    auto take = [&](std::int64_t t) {
      if (!seen) {
        lo = hi = t;
        seen = true;
      } else {
        lo = std::min(lo, t);
        hi = std::max(hi, t);
      }
    };
    for (const auto& p : partners) {
      for (const auto& c : p.calls) take(c.relative_date);
      for (const auto& m : p.messages) take(m.relative_date);
    }
    return seen ? static_cast<double>(hi - lo) / 86400.0 : 0.0;
  }

  bool operator==(const ParticipantLog&) const = default;
};

// Per-partner communication indicators. Relative values are percentages of
// the participant's totals; integer sums are kept exact so the averages can
// always be reconstructed.
struct FeatureVector {
  std::int64_t num_calls = 0;
  std::int64_t num_msgs = 0;
  std::int64_t dur_calls = 0;  // summed seconds
  std::int64_t len_msgs = 0;   // summed characters
  double rel_calls = 0.0;      // percent, 0..100
  double rel_msgs = 0.0;       // percent, 0..100
  double avg_call_dur = 0.0;   // dur_calls / num_calls, 0 when no calls
  double avg_msg_len = 0.0;
  double interactions_per_day = 0.0;
  bool is_favorite = false;

  bool operator==(const FeatureVector&) const = default;
};

enum class ViolationCode {
  NegativeGeneralCount,
  NegativeRelativeDate,
  NegativeDuration,
  MissedCallNonzeroDuration,
  NonPositiveMessageLength,
  RatingOutOfRange,
  SurveyPositionOutOfRange,
  PartnerWithoutEvents,
  NonHumanWithRating,
  GeneralSectionUndercount,
  DuplicatePartnerId,
};

inline const char* to_string(ViolationCode code) {
  switch (code) {
    case ViolationCode::NegativeGeneralCount: return "NegativeGeneralCount";
    case ViolationCode::NegativeRelativeDate: return "NegativeRelativeDate";
    case ViolationCode::NegativeDuration: return "NegativeDuration";
    case ViolationCode::MissedCallNonzeroDuration: return "MissedCallNonzeroDuration";
    case ViolationCode::NonPositiveMessageLength: return "NonPositiveMessageLength";
    case ViolationCode::RatingOutOfRange: return "RatingOutOfRange";
    case ViolationCode::SurveyPositionOutOfRange: return "SurveyPositionOutOfRange";
    case ViolationCode::PartnerWithoutEvents: return "PartnerWithoutEvents";
    case ViolationCode::NonHumanWithRating: return "NonHumanWithRating";
    case ViolationCode::GeneralSectionUndercount: return "GeneralSectionUndercount";
    case ViolationCode::DuplicatePartnerId: return "DuplicatePartnerId";
  }
  return "?";
}

// One invariant breach. Violations are data, not failures: validation never
// throws, it reports.
struct Violation {
  ViolationCode code;
  std::string path;

  bool operator==(const Violation&) const = default;
};

namespace detail {
inline std::string idx(const std::string& base, std::size_t i,
                       const char* field = nullptr) {
  std::string s = base + "[" + std::to_string(i) + "]";
  if (field) s += std::string(".") + field;
  return s;
}
}  // namespace detail

// Checks every documented invariant; returns an empty list iff the log is
// valid. Pure and deterministic.
inline std::vector<Violation> validate_log(const ParticipantLog& log) {
  std::vector<Violation> out;
  auto flag = [&](ViolationCode code, std::string path) {
    out.push_back(Violation{code, std::move(path)});
  };

  if (log.address_book_size < 0) flag(ViolationCode::NegativeGeneralCount, "general.addressBookSize");
  if (log.total_calls < 0) flag(ViolationCode::NegativeGeneralCount, "general.totalCalls");
  if (log.total_messages < 0) flag(ViolationCode::NegativeGeneralCount, "general.totalMessages");
  if (log.active_partners && *log.active_partners < 0) {
    flag(ViolationCode::NegativeGeneralCount, "general.activePartners");
  }

  auto check_likert = [&](const std::optional<int>& v, std::string path) {
    if (v && (*v < 1 || *v > 5)) flag(ViolationCode::RatingOutOfRange, std::move(path));
  };

  std::int64_t partner_calls = 0;
  std::int64_t partner_messages = 0;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < log.partners.size(); ++i) {
    const auto& p = log.partners[i];
    const std::string base = detail::idx("partners", i);
    ids.insert(p.partner_id);

    if (p.calls.empty() && p.messages.empty()) {
      flag(ViolationCode::PartnerWithoutEvents, base);
    }
    if (!p.is_human && p.rating.has_any()) {
      flag(ViolationCode::NonHumanWithRating, base + ".rating");
    }
    if (p.survey_position && (*p.survey_position < 1 || *p.survey_position > 20)) {
      flag(ViolationCode::SurveyPositionOutOfRange, base + ".surveyPosition");
    }
    check_likert(p.rating.closeness, base + ".rating.closeness");
    check_likert(p.rating.trust_info, base + ".rating.trustInfo");
    check_likert(p.rating.trust_best, base + ".rating.trustBest");

    for (std::size_t j = 0; j < p.calls.size(); ++j) {
      const auto& c = p.calls[j];
      const std::string cp = detail::idx(base + ".calls", j);
      if (c.relative_date < 0) flag(ViolationCode::NegativeRelativeDate, cp + ".date");
      if (c.duration < 0) flag(ViolationCode::NegativeDuration, cp + ".duration");
      if (c.direction == CallDirection::Missed && c.duration != 0) {
        flag(ViolationCode::MissedCallNonzeroDuration, cp + ".duration");
      }
    }
    for (std::size_t j = 0; j < p.messages.size(); ++j) {
      const auto& m = p.messages[j];
      const std::string mp = detail::idx(base + ".messages", j);
      if (m.relative_date < 0) flag(ViolationCode::NegativeRelativeDate, mp + ".date");
      if (m.length < 1) flag(ViolationCode::NonPositiveMessageLength, mp + ".length");
    }
    partner_calls += static_cast<std::int64_t>(p.calls.size());
    partner_messages += static_cast<std::int64_t>(p.messages.size());
  }

  if (partner_calls > log.total_calls) {
    flag(ViolationCode::GeneralSectionUndercount, "general.totalCalls");
  }
  if (partner_messages > log.total_messages) {
    flag(ViolationCode::GeneralSectionUndercount, "general.totalMessages");
  }
  if (ids.size() != log.partners.size()) {
    flag(ViolationCode::DuplicatePartnerId, "partners");
  }
  return out;
}

}  // namespace socialtrust
