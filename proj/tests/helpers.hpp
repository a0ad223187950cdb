#pragma once

// Small builders and an independent random-log generator used across the
// test suites. Deliberately separate from simnet's population generator so
// round-trip and validation properties are not checked against the code
// that produced the data.

#include <string>
#include <vector>

#include "socialtrust/datamodel.hpp"
#include "socialtrust/rng.hpp"

namespace testutil {

using namespace socialtrust;

inline CallRecord call(std::int64_t date, CallDirection dir, std::int64_t duration,
                       std::optional<std::string> tag = std::nullopt) {
  return CallRecord{date, dir, duration, std::move(tag)};
}

inline MessageRecord message(std::int64_t date, MessageDirection dir, std::int64_t length,
                             std::optional<std::string> tag = std::nullopt) {
  return MessageRecord{date, dir, length, std::move(tag)};
}

inline PartnerRecord partner(std::string id, std::vector<CallRecord> calls,
                             std::vector<MessageRecord> messages,
                             std::optional<int> trust_info = std::nullopt,
                             bool favorite = false) {
  PartnerRecord p;
  p.partner_id = std::move(id);
  p.calls = std::move(calls);
  p.messages = std::move(messages);
  p.rating.trust_info = trust_info;
  p.is_favorite = favorite;
  return p;
}

// A minimal valid log around the given partners; general totals are set to
// the partner sums.
inline ParticipantLog log_of(std::vector<PartnerRecord> partners,
                             std::string participant_id = "p0") {
  ParticipantLog log;
  log.participant_id = std::move(participant_id);
  log.partners = std::move(partners);
  for (const auto& p : log.partners) {
    log.total_calls += static_cast<std::int64_t>(p.calls.size());
    log.total_messages += static_cast<std::int64_t>(p.messages.size());
  }
  log.address_book_size = static_cast<std::int64_t>(log.partners.size()) + 3;
  return log;
}

// Random but always-valid log; exercises optional fields, tags and both
// directions.
inline ParticipantLog random_log(Rng& rng, std::string participant_id) {
  const auto n_partners = static_cast<std::size_t>(rng.range(1, 12));
  std::vector<PartnerRecord> partners;
  for (std::size_t i = 0; i < n_partners; ++i) {
    PartnerRecord p;
    p.partner_id = "c" + std::to_string(i);
    p.is_human = rng.bernoulli(0.9);
    p.is_favorite = rng.bernoulli(0.2);
    if (p.is_human && rng.bernoulli(0.6)) {
      if (rng.bernoulli(0.8)) p.rating.trust_info = static_cast<int>(rng.range(1, 5));
      if (rng.bernoulli(0.5)) p.rating.closeness = static_cast<int>(rng.range(1, 5));
      if (rng.bernoulli(0.5)) p.rating.trust_best = static_cast<int>(rng.range(1, 5));
    }
    if (rng.bernoulli(0.4)) p.survey_position = static_cast<int>(rng.range(1, 20));
    const auto n_calls = rng.range(0, 6);
    for (std::int64_t c = 0; c < n_calls; ++c) {
      const double roll = rng.unit();
      const CallDirection dir = roll < 0.4   ? CallDirection::Outgoing
                                : roll < 0.8 ? CallDirection::Incoming
                                             : CallDirection::Missed;
      p.calls.push_back(call(rng.range(0, 10'000'000), dir,
                             dir == CallDirection::Missed ? 0 : rng.range(0, 4000),
                             rng.bernoulli(0.2) ? std::optional<std::string>("mobile")
                                                : std::nullopt));
    }
    const auto min_msgs = p.calls.empty() ? 1 : 0;
    const auto n_msgs = rng.range(min_msgs, 8);
    for (std::int64_t m = 0; m < n_msgs; ++m) {
      p.messages.push_back(message(
          rng.range(0, 10'000'000),
          rng.bernoulli(0.5) ? MessageDirection::Incoming : MessageDirection::Outgoing,
          rng.range(1, 800)));
    }
    partners.push_back(std::move(p));
  }
  auto log = log_of(std::move(partners), std::move(participant_id));
  log.total_calls += rng.range(0, 5);  // general section may exceed partner sums
  log.total_messages += rng.range(0, 5);
  if (rng.bernoulli(0.5)) log.active_partners = static_cast<std::int64_t>(log.partners.size());
  return log;
}

}  // namespace testutil
