#pragma once

// Mutual-contact discovery via salted hashed-set intersection, and the
// trust-estimate combination built on top of it. This is deliberately not a
// cryptographic PSI protocol: the token scheme hides identifiers from casual
// observers but not from a dictionary attack by the peer. The intersection
// sits behind this small interface so a real PSI protocol can replace it.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <openssl/evp.h>

#include "socialtrust/datamodel.hpp"
#include "socialtrust/errors.hpp"
#include "socialtrust/features.hpp"
#include "socialtrust/trustmetric.hpp"

namespace socialtrust {

inline constexpr std::size_t kTokenBytes = 32;
inline constexpr std::size_t kMinSaltBytes = 16;

namespace detail {

inline std::array<std::uint8_t, kTokenBytes> sha256(std::span<const std::uint8_t> data) {
  std::array<std::uint8_t, kTokenBytes> out{};
  unsigned int out_len = 0;
  EVP_Digest(data.data(), data.size(), out.data(), &out_len, EVP_sha256(), nullptr);
  return out;
}

inline constexpr char kHexDigits[] = "0123456789abcdef";

}  // namespace detail

// Fixed-length digest of (session salt || canonical identifier). Equal
// identifiers under equal salt collide by design; under different salts the
// token sets are unlinkable.
struct ContactToken {
  std::array<std::uint8_t, kTokenBytes> bytes{};

  auto operator<=>(const ContactToken&) const = default;

  std::string hex() const {
    std::string s;
    s.reserve(2 * kTokenBytes);
    for (auto b : bytes) {
      s.push_back(detail::kHexDigits[b >> 4]);
      s.push_back(detail::kHexDigits[b & 0xf]);
    }
    return s;
  }

  static std::optional<ContactToken> from_hex(std::string_view hex) {
    if (hex.size() != 2 * kTokenBytes) return std::nullopt;
    ContactToken t;
    for (std::size_t i = 0; i < kTokenBytes; ++i) {
      auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
      };
      const int hi = nibble(hex[2 * i]);
      const int lo = nibble(hex[2 * i + 1]);
      if (hi < 0 || lo < 0) return std::nullopt;
      t.bytes[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return t;
  }
};

// Phone-number normalization: strip everything but digits and keep the
// trailing 9, so "+49 170 1234567" and "01701234567" collide. Identifiers
// with fewer than 9 digits keep whatever digits they have.
inline std::string canonicalize_identifier(std::string_view id) {
  std::string digits;
  for (char c : id) {
    if (c >= '0' && c <= '9') digits.push_back(c);
  }
  if (digits.size() > 9) digits.erase(0, digits.size() - 9);
  return digits;
}

inline ContactToken make_token(std::string_view identifier,
                               std::span<const std::uint8_t> session_salt) {
  if (session_salt.size() < kMinSaltBytes) throw EmptySalt();
  const std::string canonical = canonicalize_identifier(identifier);
  std::vector<std::uint8_t> buf;
  buf.reserve(session_salt.size() + canonical.size());
  buf.insert(buf.end(), session_salt.begin(), session_salt.end());
  buf.insert(buf.end(), canonical.begin(), canonical.end());
  return ContactToken{detail::sha256(buf)};
}

// Sorted and duplicate-free; set algorithms apply directly.
using TokenSet = std::vector<ContactToken>;

inline TokenSet tokenize_contacts(const std::vector<std::string>& ids,
                                  std::span<const std::uint8_t> session_salt) {
  if (session_salt.size() < kMinSaltBytes) throw EmptySalt();
  TokenSet tokens;
  tokens.reserve(ids.size());
  for (const auto& id : ids) tokens.push_back(make_token(id, session_salt));
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  return tokens;
}

inline TokenSet intersect(const TokenSet& a, const TokenSet& b) {
  TokenSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// ---------------------------------------------------------------------------
// Per-device trust estimation from mutual contacts

struct TrustParams {
  double qualitative_weight = 0.7;  // weight of the per-contact trust evidence
  double count_saturation = 5.0;    // mutual-contact count scale k in 1-exp(-count/k)
  Combinator combinator = Combinator::or_any();
  bool favorites_filter = false;
  GradingBands bands;
};

struct EvidenceItem {
  ContactToken token;
  std::string partner_id;
  TrustPrediction prediction;
};

// One device's verdict about a peer. The two sides of a pairing compute
// this independently from their own logs, so the estimates may differ.
struct TrustEstimate {
  std::int64_t mutual_count = 0;     // == evidence.size()
  double quantitative_score = 0.0;   // saturating in the mutual-contact count
  double qualitative_score = 0.0;    // mean predicted grade, rescaled to [0,1]
  double combined = 0.0;
  TrustLevel level{1};
  bool insufficient_evidence = true;
  std::vector<EvidenceItem> evidence;
};

// Scores every mutual contact that appears in the device's own logs with
// the quantile metric and combines the evidence. Partner ids must be the
// identifiers the token sets were built from; evaluation uses only
// own-device logs, nothing from the peer.
inline TrustEstimate establish_trust(const ParticipantLog& own_log, const TokenSet& mutual,
                                     const QuantileTable& table,
                                     std::span<const std::uint8_t> session_salt,
                                     const TrustParams& params = {}) {
  TrustEstimate estimate;
  const auto rows = labeled_features(own_log);
  for (const auto& row : rows) {
    const ContactToken token = make_token(row.partner_id, session_salt);
    if (!std::binary_search(mutual.begin(), mutual.end(), token)) continue;
    auto prediction = predict(row.features, table, params.combinator,
                              params.favorites_filter, params.bands);
    estimate.evidence.push_back({token, row.partner_id, std::move(prediction)});
  }
  estimate.mutual_count = static_cast<std::int64_t>(estimate.evidence.size());
  estimate.insufficient_evidence = estimate.evidence.empty();

  if (!estimate.evidence.empty()) {
    double grade_sum = 0.0;
    for (const auto& item : estimate.evidence) {
      grade_sum += static_cast<double>(item.prediction.grade.value - 1) / 4.0;
    }
    estimate.qualitative_score = grade_sum / static_cast<double>(estimate.evidence.size());
  }
  estimate.quantitative_score =
      1.0 - std::exp(-static_cast<double>(estimate.mutual_count) / params.count_saturation);
  estimate.combined = params.qualitative_weight * estimate.qualitative_score +
                      (1.0 - params.qualitative_weight) * estimate.quantitative_score;
  const int level = 1 + static_cast<int>(std::floor(4.0 * estimate.combined));
  estimate.level = TrustLevel{std::clamp(level, 1, 5)};
  return estimate;
}

}  // namespace socialtrust
