#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "socialtrust/datamodel.hpp"
#include "socialtrust/ingest.hpp"
#include "socialtrust/serialize.hpp"

using namespace socialtrust;
using namespace testutil;

namespace {

bool has_violation(const std::vector<Violation>& violations, ViolationCode code) {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.code == code; });
}

}  // namespace

TEST_CASE("a minimal well-formed log validates cleanly") {
  const auto log = log_of({partner("a", {call(100, CallDirection::Outgoing, 60)}, {})});
  REQUIRE(validate_log(log).empty());
}

TEST_CASE("zero-length messages are flagged") {
  auto log = log_of({partner("a", {}, {message(5, MessageDirection::Incoming, 10)})});
  log.partners[0].messages[0].length = 0;
  const auto violations = validate_log(log);
  REQUIRE(violations.size() == 1);
  REQUIRE(violations[0].code == ViolationCode::NonPositiveMessageLength);
  REQUIRE(violations[0].path == "partners[0].messages[0].length");
}

TEST_CASE("general-section undercount is flagged") {
  auto log = log_of({partner("a",
                             {call(1, CallDirection::Outgoing, 10),
                              call(2, CallDirection::Incoming, 20),
                              call(3, CallDirection::Outgoing, 30)},
                             {})});
  log.total_calls = 1;
  REQUIRE(has_violation(validate_log(log), ViolationCode::GeneralSectionUndercount));
}

TEST_CASE("missed calls must carry zero duration") {
  auto log = log_of({partner("a", {call(1, CallDirection::Missed, 0)}, {})});
  REQUIRE(validate_log(log).empty());
  log.partners[0].calls[0].duration = 3;
  REQUIRE(has_violation(validate_log(log), ViolationCode::MissedCallNonzeroDuration));
}

TEST_CASE("partners need at least one event and distinct ids") {
  auto log = log_of({partner("a", {call(1, CallDirection::Outgoing, 5)}, {}),
                     partner("a", {call(2, CallDirection::Outgoing, 5)}, {})});
  REQUIRE(has_violation(validate_log(log), ViolationCode::DuplicatePartnerId));

  log = log_of({partner("b", {}, {})});
  REQUIRE(has_violation(validate_log(log), ViolationCode::PartnerWithoutEvents));
}

TEST_CASE("non-persons cannot carry ratings") {
  auto log = log_of({partner("a", {call(1, CallDirection::Outgoing, 5)}, {}, 4)});
  log.partners[0].is_human = false;
  REQUIRE(has_violation(validate_log(log), ViolationCode::NonHumanWithRating));
}

TEST_CASE("out-of-range likert values and survey positions are flagged") {
  auto log = log_of({partner("a", {call(1, CallDirection::Outgoing, 5)}, {})});
  log.partners[0].rating.closeness = 6;
  log.partners[0].survey_position = 21;
  const auto violations = validate_log(log);
  REQUIRE(has_violation(violations, ViolationCode::RatingOutOfRange));
  REQUIRE(has_violation(violations, ViolationCode::SurveyPositionOutOfRange));
}

TEST_CASE("validate_log is pure and deterministic") {
  Rng rng(2024);
  for (int i = 0; i < 50; ++i) {
    const auto log = random_log(rng, "p" + std::to_string(i));
    REQUIRE(validate_log(log) == validate_log(log));
  }
}

TEST_CASE("log span is the offset-free event range in days") {
  auto log = log_of({partner("a",
                             {call(1'000'000, CallDirection::Outgoing, 5),
                              call(1'000'000 + 86400 * 3, CallDirection::Incoming, 5)},
                             {})});
  REQUIRE_THAT(log.log_span_days(), Catch::Matchers::WithinAbs(3.0, 1e-12));
  REQUIRE(ParticipantLog{}.log_span_days() == 0.0);
}

TEST_CASE("valid logs round-trip through JSON and YAML byte-equivalently") {
  Rng rng(77);
  for (int i = 0; i < 40; ++i) {
    const auto log = random_log(rng, "rt" + std::to_string(i));
    REQUIRE(validate_log(log).empty());

    const auto via_json = log_from_json(to_json(log));
    REQUIRE(via_json == log);

    const auto via_yaml = parse_result(to_yaml(log), log.participant_id);
    REQUIRE(via_yaml == log);
  }
}
