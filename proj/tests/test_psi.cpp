#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "helpers.hpp"
#include "socialtrust/psi.hpp"

using namespace socialtrust;
using namespace testutil;

namespace {

std::vector<std::uint8_t> salt_of(char fill) {
  return std::vector<std::uint8_t>(16, static_cast<std::uint8_t>(fill));
}

}  // namespace

TEST_CASE("canonicalization collapses formatting variants") {
  REQUIRE(canonicalize_identifier("+49 170 1234567") == "701234567");
  REQUIRE(canonicalize_identifier("01701234567") == "701234567");
  REQUIRE(canonicalize_identifier("12345") == "12345");
  REQUIRE(canonicalize_identifier("no digits") == "");

  const auto salt = salt_of('s');
  const auto tokens = tokenize_contacts({"+49 170 1234567", "01701234567"}, salt);
  REQUIRE(tokens.size() == 1);

  REQUIRE(tokenize_contacts({}, salt).empty());
}

TEST_CASE("tokens are deterministic per salt and unlinkable across salts") {
  std::vector<std::string> ids;
  for (int i = 0; i < 1000; ++i) ids.push_back("+1555" + std::to_string(1000000 + i));

  const auto first = tokenize_contacts(ids, salt_of('a'));
  const auto second = tokenize_contacts(ids, salt_of('a'));
  REQUIRE(first == second);
  REQUIRE(first.size() == ids.size());

  const auto other = tokenize_contacts(ids, salt_of('b'));
  std::size_t collisions = 0;
  for (const auto& t : other) {
    if (std::binary_search(first.begin(), first.end(), t)) ++collisions;
  }
  REQUIRE(collisions == 0);
}

TEST_CASE("short salts are rejected") {
  const std::vector<std::uint8_t> short_salt(15, 1);
  REQUIRE_THROWS_AS(tokenize_contacts({"123"}, short_salt), EmptySalt);
  REQUIRE_THROWS_AS(make_token("123", {}), EmptySalt);
}

TEST_CASE("token hex round-trips") {
  const auto token = make_token("+4917012345", salt_of('x'));
  REQUIRE(token.hex().size() == 64);
  const auto back = ContactToken::from_hex(token.hex());
  REQUIRE(back.has_value());
  REQUIRE(*back == token);
  REQUIRE_FALSE(ContactToken::from_hex("zz").has_value());
  REQUIRE_FALSE(ContactToken::from_hex(std::string(64, 'g')).has_value());
}

TEST_CASE("intersection equals the brute-force double loop") {
  Rng rng(4040);
  for (int round = 0; round < 50; ++round) {
    const auto salt = salt_of('q');
    std::vector<std::string> a_ids, b_ids;
    for (int i = 0; i < 200; ++i) {
      a_ids.push_back("+2" + std::to_string(100000000 + rng.below(500000)));
    }
    for (int i = 0; i < 300; ++i) {
      b_ids.push_back("+3" + std::to_string(200000000 + rng.below(500000)));
    }
    for (int i = 0; i < 50; ++i) {  // planted common contacts
      const auto shared = "+4" + std::to_string(900000000 + i);
      a_ids.push_back(shared);
      b_ids.push_back(shared);
    }
    const auto a = tokenize_contacts(a_ids, salt);
    const auto b = tokenize_contacts(b_ids, salt);
    const auto fast = intersect(a, b);

    std::set<ContactToken> brute;
    for (const auto& x : a) {
      for (const auto& y : b) {
        if (x == y) brute.insert(x);
      }
    }
    REQUIRE(fast.size() == brute.size());
    for (const auto& t : fast) REQUIRE(brute.contains(t));
    REQUIRE(fast.size() >= 50);  // the planted contacts are always found
  }
}

TEST_CASE("intersection algebra") {
  const auto salt = salt_of('z');
  const auto a = tokenize_contacts({"111111111", "222222222", "333333333"}, salt);
  const auto b = tokenize_contacts({"444444444", "555555555"}, salt);
  REQUIRE(intersect(a, b).empty());
  REQUIRE(intersect(a, a) == a);
  REQUIRE(intersect(a, {}).empty());
  REQUIRE(intersect(a, b) == intersect(b, a));
}

namespace {

// Each partner gets n short calls and one short message. A heavy filler
// partner keeps the relative indicators of everyone else tiny, so partners
// with few events really do predict as grade 1.
ParticipantLog log_with_partners(const std::vector<std::pair<std::string, int>>& spec) {
  std::vector<PartnerRecord> partners;
  for (const auto& [id, n_calls] : spec) {
    std::vector<CallRecord> calls;
    for (int i = 0; i < n_calls; ++i) calls.push_back(call(i * 100, CallDirection::Outgoing, 30));
    std::vector<MessageRecord> messages{message(0, MessageDirection::Incoming, 50)};
    partners.push_back(partner(id, std::move(calls), std::move(messages)));
  }
  std::vector<CallRecord> filler_calls;
  std::vector<MessageRecord> filler_messages;
  for (int i = 0; i < 2000; ++i) {
    filler_calls.push_back(call(i, CallDirection::Outgoing, 30));
    filler_messages.push_back(message(i, MessageDirection::Outgoing, 40));
  }
  partners.push_back(partner("000000042", std::move(filler_calls), std::move(filler_messages)));
  return log_of(std::move(partners), "psi");
}

}  // namespace

TEST_CASE("zero mutual contacts yields an explicitly insufficient estimate") {
  const auto log = log_with_partners({{"111111111", 3}});
  const auto estimate = establish_trust(log, {}, reference_table(), salt_of('e'));
  REQUIRE(estimate.insufficient_evidence);
  REQUIRE(estimate.mutual_count == 0);
  REQUIRE(estimate.combined == 0.0);
  REQUIRE(estimate.level.value == 1);
}

TEST_CASE("twenty grade-5 mutual contacts instantiate the combination formula") {
  std::vector<std::pair<std::string, int>> spec;
  std::vector<std::string> ids;
  for (int i = 0; i < 20; ++i) {
    const auto id = std::to_string(700000000 + i);
    spec.emplace_back(id, 60);  // 60 calls > the 99% threshold of 42
    ids.push_back(id);
  }
  const auto log = log_with_partners(spec);
  const auto salt = salt_of('m');
  const auto mutual = tokenize_contacts(ids, salt);

  const auto estimate = establish_trust(log, mutual, reference_table(), salt);
  REQUIRE(estimate.mutual_count == 20);
  REQUIRE_FALSE(estimate.insufficient_evidence);
  REQUIRE_THAT(estimate.qualitative_score, Catch::Matchers::WithinAbs(1.0, 1e-12));
  const double expected_quant = 1.0 - std::exp(-20.0 / 5.0);
  REQUIRE_THAT(estimate.quantitative_score,
               Catch::Matchers::WithinAbs(expected_quant, 1e-12));
  REQUIRE_THAT(estimate.combined,
               Catch::Matchers::WithinAbs(0.7 + 0.3 * expected_quant, 1e-12));
  REQUIRE(estimate.level.value == 5);
  REQUIRE(estimate.evidence.size() == 20);
}

TEST_CASE("asymmetric logs give asymmetric estimates over the same mutual set") {
  // device A interacts heavily with the shared contacts, device B barely
  const std::vector<std::string> shared{"811111111", "822222222", "833333333"};
  const auto log_a = log_with_partners(
      {{shared[0], 80}, {shared[1], 70}, {shared[2], 90}, {"899999999", 2}});
  const auto log_b = log_with_partners({{shared[0], 0}, {shared[1], 1}, {shared[2], 0}});
  const auto salt = salt_of('y');
  const auto mutual = tokenize_contacts(shared, salt);

  const auto estimate_a = establish_trust(log_a, mutual, reference_table(), salt);
  const auto estimate_b = establish_trust(log_b, mutual, reference_table(), salt);
  REQUIRE(estimate_a.mutual_count == estimate_b.mutual_count);
  REQUIRE(estimate_a.combined > estimate_b.combined);
}

TEST_CASE("the combination is monotone in count and in evidence grades") {
  const auto salt = salt_of('w');

  // more mutual contacts, qualitative evidence held at zero
  double previous = -1.0;
  for (int count = 0; count <= 30; count += 5) {
    std::vector<std::pair<std::string, int>> spec;
    std::vector<std::string> ids;
    for (int i = 0; i < count; ++i) {
      const auto id = std::to_string(600000000 + i);
      spec.emplace_back(id, 1);  // below every threshold: grade 1
      ids.push_back(id);
    }
    const auto log = count == 0 ? log_with_partners({{"650000000", 1}}) : log_with_partners(spec);
    const auto mutual = tokenize_contacts(ids, salt);
    const auto estimate = establish_trust(log, mutual, reference_table(), salt);
    REQUIRE(estimate.combined >= previous);
    previous = estimate.combined;
  }

  // same count, higher grades
  std::vector<std::string> ids{"610000000", "620000000"};
  const auto weak = establish_trust(log_with_partners({{ids[0], 1}, {ids[1], 1}}),
                                    tokenize_contacts(ids, salt), reference_table(), salt);
  const auto strong = establish_trust(log_with_partners({{ids[0], 60}, {ids[1], 60}}),
                                      tokenize_contacts(ids, salt), reference_table(), salt);
  REQUIRE(strong.combined > weak.combined);
  REQUIRE(strong.qualitative_score > weak.qualitative_score);
}

TEST_CASE("estimate levels follow the combined score") {
  const auto salt = salt_of('v');
  const std::vector<std::string> ids{"655000001"};
  const auto log = log_with_partners({{ids[0], 60}});
  const auto estimate =
      establish_trust(log, tokenize_contacts(ids, salt), reference_table(), salt);
  REQUIRE(estimate.level.value ==
          std::clamp(1 + static_cast<int>(std::floor(4.0 * estimate.combined)), 1, 5));
}
