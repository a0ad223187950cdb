#pragma once

// Deterministic simulated ad-hoc network. A seeded generator produces a
// synthetic device population whose contact-list sizes, partner counts,
// event volumes and log spans match the survey statistics, and a virtual-
// time event loop runs the pairwise trust-establishment protocol:
//
//   HELLO / HELLO_ACK      nonce exchange, both sides derive the session salt
//   TOKENS / TOKENS_REPLY  hashed contact sets, each side intersects + scores
//   FIN / FIN_ACK          completion
//
// Everything is driven by explicit seeds; a (config, seed, plan) triple
// reproduces traces and reports byte for byte.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "socialtrust/datamodel.hpp"
#include "socialtrust/errors.hpp"
#include "socialtrust/psi.hpp"
#include "socialtrust/rng.hpp"
#include "socialtrust/trustmetric.hpp"

namespace socialtrust {

// ---------------------------------------------------------------------------
// Population generation

struct SimConfig {
  std::int64_t n_devices = 2;
  std::uint64_t seed = 0;
  double contacts_mean = 249.3;
  double contacts_sd = 308.7;
  double active_partners_mean = 32.0;
  double calls_mean = 304.6;
  double msgs_mean = 739.2;
  double span_days_mean = 90.0;
  double span_days_sd = 135.9;
  // 0 = latent trust independent of interaction volume, 1 = fully determined
  double trust_coupling = 0.75;

  void validate() const {
    if (n_devices < 2) throw InvalidConfig("n_devices must be at least 2");
    const double nonneg[] = {contacts_mean, contacts_sd,    active_partners_mean,
                             calls_mean,    msgs_mean,      span_days_mean,
                             span_days_sd};
    for (double v : nonneg) {
      if (!(v >= 0.0)) throw InvalidConfig("means and deviations must be non-negative");
    }
    if (!(trust_coupling >= 0.0 && trust_coupling <= 1.0)) {
      throw InvalidConfig("trust_coupling must be in [0,1]");
    }
  }
};

struct DeviceProfile {
  std::string device_id;
  std::vector<std::string> contact_ids;        // full address book
  std::map<std::string, int> latent_trust;     // partner_id -> latent level
};

struct Device {
  DeviceProfile profile;
  ParticipantLog log;
};

namespace detail {

inline std::string pool_identifier(std::uint64_t index) {
  // nine trailing digits stay unique for any realistic pool size
  return "+49" + std::to_string(100000000ull + index);
}

inline std::uint64_t contact_pool_size(const SimConfig& cfg) {
  const double by_devices = static_cast<double>(cfg.n_devices) * cfg.contacts_mean / 10.0;
  const double floor_size = cfg.contacts_mean * 10.0;
  double size = std::max({by_devices, floor_size, 500.0});
  return static_cast<std::uint64_t>(std::llround(size));
}

// Floyd's sampling: exactly n distinct values from [0, pool).
inline std::vector<std::uint64_t> sample_distinct(Rng& rng, std::uint64_t pool,
                                                  std::uint64_t n) {
  std::set<std::uint64_t> chosen;
  for (std::uint64_t j = pool - n; j < pool; ++j) {
    const std::uint64_t t = rng.below(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::uint64_t> out(chosen.begin(), chosen.end());
  return out;
}

}  // namespace detail

// Seeded, reproducible population. Generated logs always satisfy
// validate_log and the default FilterPolicy; devices draw their contacts
// from one shared pool, so pairs of devices overlap and the set
// intersection has something to find.
inline std::vector<Device> generate_population(const SimConfig& cfg) {
  cfg.validate();
  const std::uint64_t pool = detail::contact_pool_size(cfg);
  const auto contact_dist = lognormal_from_moments(cfg.contacts_mean, cfg.contacts_sd);

  std::vector<Device> devices;
  devices.reserve(static_cast<std::size_t>(cfg.n_devices));
  for (std::int64_t d = 0; d < cfg.n_devices; ++d) {
    Rng rng(derive_seed(cfg.seed, 101 + static_cast<std::uint64_t>(d)));
    Device device;
    char id_buf[16];
    std::snprintf(id_buf, sizeof id_buf, "d%04lld", static_cast<long long>(d));
    device.profile.device_id = id_buf;

    // sizes
    std::int64_t partners_n = std::max<std::int64_t>(5, rng.poisson(cfg.active_partners_mean));
    std::int64_t contacts_n = 0;
    for (int attempt = 0; attempt < 64; ++attempt) {
      contacts_n = std::llround(rng.lognormal(contact_dist.mu, contact_dist.sigma));
      if (contacts_n >= 2) break;
    }
    contacts_n = std::clamp<std::int64_t>(contacts_n, std::max<std::int64_t>(2, partners_n),
                                          static_cast<std::int64_t>(pool));
    partners_n = std::min(partners_n, contacts_n);

    // shared identifier space
    auto indices = detail::sample_distinct(rng, pool, static_cast<std::uint64_t>(contacts_n));
    rng.shuffle(indices);
    device.profile.contact_ids.reserve(indices.size());
    for (auto idx : indices) device.profile.contact_ids.push_back(detail::pool_identifier(idx));

    // span; short logs must stay above the filter's short-and-sparse rule
    double span_days = 0.0;
    do {
      span_days = rng.normal(cfg.span_days_mean, cfg.span_days_sd);
    } while (span_days < 1.0);
    if (partners_n < 10) span_days = std::max(span_days, 7.0);
    const std::int64_t span_secs = std::llround(span_days * 86400.0);

    // event volumes, allocated over partners by heavy-tailed weights
    const std::int64_t calls_total = rng.poisson(cfg.calls_mean);
    const std::int64_t msgs_total =
        std::max<std::int64_t>(rng.poisson(cfg.msgs_mean), partners_n);
    std::vector<double> weights(static_cast<std::size_t>(partners_n));
    std::vector<double> cumulative(weights.size());
    double total_weight = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      weights[i] = std::exp(rng.normal(0.0, 1.25));
      total_weight += weights[i];
      cumulative[i] = total_weight;
    }
    auto weighted_pick = [&]() -> std::size_t {
      const double x = rng.unit() * total_weight;
      return static_cast<std::size_t>(
          std::lower_bound(cumulative.begin(), cumulative.end(), x) - cumulative.begin());
    };
    std::vector<std::int64_t> calls_per(weights.size(), 0);
    std::vector<std::int64_t> msgs_per(weights.size(), 1);  // every partner shows up
    for (std::int64_t e = 0; e < calls_total; ++e) calls_per[weighted_pick()] += 1;
    for (std::int64_t e = partners_n; e < msgs_total; ++e) msgs_per[weighted_pick()] += 1;

    // latent trust levels, coupled to interaction volume through the rank
    std::vector<std::size_t> order(weights.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto ca = calls_per[a] + msgs_per[a];
      const auto cb = calls_per[b] + msgs_per[b];
      return ca != cb ? ca < cb : a < b;
    });
    std::vector<double> volume_rank(weights.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
      volume_rank[order[r]] =
          static_cast<double>(r) / static_cast<double>(order.size() - 1);
    }

    const std::int64_t offset = rng.range(1'000'000, 10'000'000);
    ParticipantLog log;
    log.participant_id = device.profile.device_id;
    log.address_book_size = contacts_n;
    log.total_calls = calls_total;
    log.total_messages = msgs_total;
    log.active_partners = partners_n;

    for (std::size_t i = 0; i < weights.size(); ++i) {
      PartnerRecord p;
      p.partner_id = device.profile.contact_ids[i];
      p.is_human = i == 0 ? true : rng.bernoulli(0.97);

      const double u = volume_rank[i];
      const double v = cfg.trust_coupling * u + (1.0 - cfg.trust_coupling) * rng.unit();
      const int latent = 1 + static_cast<int>(std::min(4.0, std::floor(v * 5.0)));
      device.profile.latent_trust[p.partner_id] = latent;
      if (p.is_human) {
        auto jitter = [&](int level) {
          const double roll = rng.unit();
          if (roll < 0.2) level -= 1;
          if (roll > 0.8) level += 1;
          return std::clamp(level, 1, 5);
        };
        p.rating.trust_info = latent;
        p.rating.closeness = jitter(latent);
        p.rating.trust_best = jitter(latent);
      }
      p.is_favorite = rng.bernoulli(u > 0.8 ? 0.45 : 0.04);

      std::optional<std::string> tag;
      if (rng.bernoulli(0.15)) {
        const double roll = rng.unit();
        tag = roll < 0.76 ? "mobile" : (roll < 0.88 ? "home" : "work");
      }

      for (std::int64_t c = 0; c < calls_per[i]; ++c) {
        CallRecord call;
        call.relative_date = rng.range(0, span_secs);
        const double roll = rng.unit();
        call.direction = roll < 0.46   ? CallDirection::Outgoing
                         : roll < 0.92 ? CallDirection::Incoming
                                       : CallDirection::Missed;
        call.duration = call.direction == CallDirection::Missed
                            ? 0
                            : 1 + static_cast<std::int64_t>(rng.lognormal(std::log(45.0), 1.3));
        call.tag = tag;
        p.calls.push_back(call);
      }
      for (std::int64_t m = 0; m < msgs_per[i]; ++m) {
        MessageRecord msg;
        msg.relative_date = rng.range(0, span_secs);
        msg.direction =
            rng.bernoulli(0.5) ? MessageDirection::Outgoing : MessageDirection::Incoming;
        msg.length = 1 + static_cast<std::int64_t>(rng.lognormal(std::log(40.0), 1.0));
        msg.tag = tag;
        p.messages.push_back(msg);
      }
      log.partners.push_back(std::move(p));
    }

    // pin the observed span to the drawn one (the first partner always has
    // at least one message)
    log.partners.front().messages.front().relative_date = 0;
    log.partners.back().messages.back().relative_date = span_secs;
    for (auto& p : log.partners) {
      for (auto& c : p.calls) c.relative_date += offset;
      for (auto& m : p.messages) m.relative_date += offset;
    }

    device.log = std::move(log);
    devices.push_back(std::move(device));
  }
  return devices;
}

// ---------------------------------------------------------------------------
// Pairwise protocol

enum class ProtocolState {
  Idle = 0,
  HelloSent = 1,
  SaltAgreed = 2,
  TokensSent = 3,
  Intersected = 4,
  Scored = 5,
  Done = 6,
  Failed = 7,
};

inline const char* to_string(ProtocolState s) {
  switch (s) {
    case ProtocolState::Idle: return "Idle";
    case ProtocolState::HelloSent: return "HelloSent";
    case ProtocolState::SaltAgreed: return "SaltAgreed";
    case ProtocolState::TokensSent: return "TokensSent";
    case ProtocolState::Intersected: return "Intersected";
    case ProtocolState::Scored: return "Scored";
    case ProtocolState::Done: return "Done";
    case ProtocolState::Failed: return "Failed";
  }
  return "?";
}

// One entry in a protocol trace: a message event (send/deliver/drop/retry,
// with the wire size) or a state transition.
struct ProtocolEvent {
  std::int64_t time_us = 0;
  std::string device;
  std::string kind;   // send | deliver | drop | retry | state
  std::string label;  // message type or state name
  std::size_t bytes = 0;
};

struct PairwiseOptions {
  double loss_prob = 0.0;      // per-message drop probability
  int max_retries = 3;         // additional attempts per reliable message
  std::int64_t retry_timeout_us = 200'000;
  bool corrupt_salt = false;   // fault injection: responder derives a bad salt
  TrustParams trust;
};

struct PairwiseResult {
  std::vector<ProtocolEvent> trace;
  TrustEstimate estimate_a;
  TrustEstimate estimate_b;
  std::size_t mutual_count = 0;  // size of the token intersection
};

namespace detail {

// Length-prefixed JSON envelope; the prefix models a 4-byte frame header.
inline std::size_t envelope_size(const std::string& type, const std::string& session,
                                 const nlohmann::json& payload) {
  nlohmann::json envelope{{"type", type}, {"session", session}, {"payload", payload}};
  return 4 + envelope.dump().size();
}

inline std::string hex_of(std::span<const std::uint8_t> data, std::size_t max_bytes) {
  std::string s;
  for (std::size_t i = 0; i < data.size() && i < max_bytes; ++i) {
    s.push_back(kHexDigits[data[i] >> 4]);
    s.push_back(kHexDigits[data[i] & 0xf]);
  }
  return s;
}

}  // namespace detail

// Runs the full pairwise exchange on a single-threaded virtual-time queue.
// Throws ProtocolTimeout when a message exceeds its retry budget and
// SaltMismatch when the sides disagree on the session salt.
inline PairwiseResult run_pairwise(const Device& a, const Device& b,
                                   const QuantileTable& table, std::uint64_t seed,
                                   const PairwiseOptions& options = {}) {
  using nlohmann::json;

  Rng nonce_rng(derive_seed(seed, 0xA0));
  Rng loss_rng(derive_seed(seed, 0xB0));
  const std::string session = std::to_string(derive_seed(seed, 0xC0) & 0xffffffffull);

  struct Endpoint {
    const Device* device = nullptr;
    ProtocolState state = ProtocolState::Idle;
    std::vector<std::uint8_t> nonce;
    std::vector<std::uint8_t> salt;
    std::string salt_fp;
    TokenSet tokens;
    TokenSet mutual;
    TrustEstimate estimate;
    bool got_hello = false, got_hello_ack = false;
    bool got_tokens = false, got_tokens_reply = false;
    bool got_fin = false, got_fin_ack = false;
    json cached_reply;  // last idempotent response payload
  };
  Endpoint ends[2];
  ends[0].device = &a;
  ends[1].device = &b;

  PairwiseResult result;
  auto& trace = result.trace;

  struct QueueItem {
    std::int64_t time_us;
    std::uint64_t seq;
    int kind;  // 0 deliver, 1 retry-check
    int target;
    std::string msg_type;
    json payload;
    std::size_t size = 0;
  };
  struct Later {
    bool operator()(const QueueItem& x, const QueueItem& y) const {
      return x.time_us != y.time_us ? x.time_us > y.time_us : x.seq > y.seq;
    }
  };
  std::priority_queue<QueueItem, std::vector<QueueItem>, Later> queue;
  std::uint64_t seq = 0;
  std::int64_t now = 0;
  std::map<std::string, int> attempts;  // reliable-message attempt counts (side A)

  auto device_id = [&](int side) { return ends[side].device->profile.device_id; };

  auto set_state = [&](int side, ProtocolState next) {
    ends[side].state = next;
    trace.push_back({now, device_id(side), "state", to_string(next), 0});
  };

  auto transmit = [&](int from, const std::string& type, const json& payload) {
    const std::size_t size = detail::envelope_size(type, session, payload);
    trace.push_back({now, device_id(from), "send", type, size});
    if (options.loss_prob > 0.0 && loss_rng.unit() < options.loss_prob) {
      trace.push_back({now, device_id(from), "drop", type, size});
      return;
    }
    const std::int64_t latency =
        5000 + static_cast<std::int64_t>(size) / 100;  // 5 ms + 10 us/KB
    queue.push({now + latency, seq++, 0, 1 - from, type, payload, size});
  };

  auto schedule_retry = [&](const std::string& type) {
    queue.push({now + options.retry_timeout_us, seq++, 1, 0, type, {}, 0});
  };

  auto derive_salt = [&](Endpoint& e, const std::vector<std::uint8_t>& nonce_a,
                         const std::vector<std::uint8_t>& nonce_b, bool corrupt) {
    std::vector<std::uint8_t> buf = nonce_a;
    buf.insert(buf.end(), nonce_b.begin(), nonce_b.end());
    const auto digest = detail::sha256(buf);
    e.salt.assign(digest.begin(), digest.end());
    if (corrupt) e.salt[0] ^= 0xff;
    const auto fp_digest = detail::sha256(e.salt);
    e.salt_fp = detail::hex_of(fp_digest, 8);
    e.tokens = tokenize_contacts(e.device->profile.contact_ids, e.salt);
  };

  auto hex_to_bytes = [](const std::string& hex) {
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i + 1 < hex.size(); i += 2) {
      auto nib = [](char c) {
        return c <= '9' ? c - '0' : c - 'a' + 10;
      };
      out.push_back(static_cast<std::uint8_t>((nib(hex[i]) << 4) | nib(hex[i + 1])));
    }
    return out;
  };

  auto tokens_payload = [&](const Endpoint& e) {
    json list = json::array();
    for (const auto& t : e.tokens) list.push_back(t.hex());
    return json{{"fp", e.salt_fp}, {"tokens", list}};
  };

  auto score = [&](int side) {
    Endpoint& e = ends[side];
    set_state(side, ProtocolState::Intersected);
    e.estimate = establish_trust(e.device->log, e.mutual, table, e.salt, options.trust);
    set_state(side, ProtocolState::Scored);
  };

  auto check_fp = [&](int side, const json& payload) {
    if (payload.at("fp").get<std::string>() != ends[side].salt_fp) {
      set_state(side, ProtocolState::Failed);
      throw SaltMismatch("session salt fingerprints disagree (device " +
                         device_id(side) + ")");
    }
  };

  auto parse_mutual = [&](Endpoint& e, const json& payload) {
    TokenSet peer;
    for (const auto& hex : payload.at("tokens")) {
      if (auto t = ContactToken::from_hex(hex.get<std::string>())) peer.push_back(*t);
    }
    std::sort(peer.begin(), peer.end());
    e.mutual = intersect(e.tokens, peer);
  };

  // initiator
  ends[0].nonce = nonce_rng.bytes(16);
  transmit(0, "HELLO", json{{"nonce", detail::hex_of(ends[0].nonce, 16)}});
  set_state(0, ProtocolState::HelloSent);
  attempts["HELLO"] = 1;
  schedule_retry("HELLO");

  auto on_deliver = [&](int side, const std::string& type, const json& payload) {
    Endpoint& e = ends[side];
    if (type == "HELLO" && side == 1) {
      if (!e.got_hello) {
        e.got_hello = true;
        e.nonce = nonce_rng.bytes(16);
        derive_salt(e, hex_to_bytes(payload.at("nonce").get<std::string>()), e.nonce,
                    options.corrupt_salt);
        set_state(1, ProtocolState::SaltAgreed);
        e.cached_reply = json{{"nonce", detail::hex_of(e.nonce, 16)}};
      }
      transmit(1, "HELLO_ACK", e.cached_reply);
    } else if (type == "HELLO_ACK" && side == 0) {
      if (!e.got_hello_ack) {
        e.got_hello_ack = true;
        derive_salt(e, e.nonce, hex_to_bytes(payload.at("nonce").get<std::string>()),
                    false);
        set_state(0, ProtocolState::SaltAgreed);
        transmit(0, "TOKENS", tokens_payload(e));
        set_state(0, ProtocolState::TokensSent);
        attempts["TOKENS"] = 1;
        schedule_retry("TOKENS");
      }
    } else if (type == "TOKENS" && side == 1) {
      check_fp(1, payload);
      if (!e.got_tokens) {
        e.got_tokens = true;
        parse_mutual(e, payload);
        e.cached_reply = tokens_payload(e);
        transmit(1, "TOKENS_REPLY", e.cached_reply);
        set_state(1, ProtocolState::TokensSent);
        score(1);
      } else {
        transmit(1, "TOKENS_REPLY", e.cached_reply);
      }
    } else if (type == "TOKENS_REPLY" && side == 0) {
      check_fp(0, payload);
      if (!e.got_tokens_reply) {
        e.got_tokens_reply = true;
        parse_mutual(e, payload);
        score(0);
        transmit(0, "FIN", json{{"fp", e.salt_fp}});
        attempts["FIN"] = 1;
        schedule_retry("FIN");
      }
    } else if (type == "FIN" && side == 1) {
      if (!e.got_fin) {
        e.got_fin = true;
        set_state(1, ProtocolState::Done);
      }
      transmit(1, "FIN_ACK", json::object());
    } else if (type == "FIN_ACK" && side == 0) {
      if (!e.got_fin_ack) {
        e.got_fin_ack = true;
        set_state(0, ProtocolState::Done);
      }
    }
  };

  auto resend = [&](const std::string& type) {
    if (type == "HELLO") {
      transmit(0, "HELLO", json{{"nonce", detail::hex_of(ends[0].nonce, 16)}});
    } else if (type == "TOKENS") {
      transmit(0, "TOKENS", tokens_payload(ends[0]));
    } else {
      transmit(0, "FIN", json{{"fp", ends[0].salt_fp}});
    }
  };

  auto responded = [&](const std::string& type) {
    if (type == "HELLO") return ends[0].got_hello_ack;
    if (type == "TOKENS") return ends[0].got_tokens_reply;
    return ends[0].got_fin_ack;
  };

  while (!queue.empty()) {
    QueueItem item = queue.top();
    queue.pop();
    now = item.time_us;
    if (item.kind == 0) {
      trace.push_back({now, device_id(item.target), "deliver", item.msg_type, item.size});
      on_deliver(item.target, item.msg_type, item.payload);
    } else {
      if (responded(item.msg_type)) continue;
      if (attempts[item.msg_type] > options.max_retries) {
        set_state(0, ProtocolState::Failed);
        throw ProtocolTimeout("no response to " + item.msg_type + " after " +
                              std::to_string(attempts[item.msg_type]) + " attempts");
      }
      attempts[item.msg_type] += 1;
      trace.push_back({now, device_id(0), "retry", item.msg_type, 0});
      resend(item.msg_type);
      schedule_retry(item.msg_type);
    }
  }

  result.estimate_a = ends[0].estimate;
  result.estimate_b = ends[1].estimate;
  result.mutual_count = ends[0].mutual.size();
  return result;
}

// ---------------------------------------------------------------------------
// Scenario runner

struct PairPlan {
  enum class Kind { Mesh, RandomPairs, Explicit };
  Kind kind = Kind::Mesh;
  std::size_t random_count = 0;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // Explicit only

  static PairPlan mesh() { return {}; }
  static PairPlan random_pairs(std::size_t count) {
    return {Kind::RandomPairs, count, {}};
  }
  static PairPlan explicit_pairs(std::vector<std::pair<std::size_t, std::size_t>> p) {
    return {Kind::Explicit, 0, std::move(p)};
  }
};

struct PairOutcome {
  std::string pair_id;
  std::size_t index_a = 0, index_b = 0;
  std::size_t mutual_count = 0;
  TrustEstimate estimate_a, estimate_b;
};

struct ScenarioReport {
  std::int64_t n_devices = 0;
  std::uint64_t seed = 0;
  std::vector<PairOutcome> pairs;
  double mean_combined = 0.0;
  double mean_gap = 0.0;   // mean |combined_a - combined_b|
  double max_gap = 0.0;
  std::array<std::int64_t, 10> combined_histogram{};  // 0.1-wide bins
  std::array<std::int64_t, 10> gap_histogram{};

  std::string to_csv() const {
    std::string out = "pair_id,mutual_count,est_a,est_b,level_a,level_b\n";
    char line[160];
    for (const auto& p : pairs) {
      std::snprintf(line, sizeof line, "%s,%zu,%.6f,%.6f,%d,%d\n", p.pair_id.c_str(),
                    p.mutual_count, p.estimate_a.combined, p.estimate_b.combined,
                    p.estimate_a.level.value, p.estimate_b.level.value);
      out += line;
    }
    return out;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["devices"] = n_devices;
    j["seed"] = seed;
    j["pairs"] = pairs.size();
    j["mean_combined"] = mean_combined;
    j["mean_gap"] = mean_gap;
    j["max_gap"] = max_gap;
    j["combined_histogram"] = combined_histogram;
    j["gap_histogram"] = gap_histogram;
    return j;
  }
};

inline std::vector<std::pair<std::size_t, std::size_t>> resolve_pairs(
    const PairPlan& plan, std::size_t n_devices, std::uint64_t seed) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  switch (plan.kind) {
    case PairPlan::Kind::Mesh:
      for (std::size_t i = 0; i < n_devices; ++i) {
        for (std::size_t j = i + 1; j < n_devices; ++j) pairs.emplace_back(i, j);
      }
      break;
    case PairPlan::Kind::RandomPairs: {
      Rng rng(derive_seed(seed, 0x7a17));
      std::set<std::pair<std::size_t, std::size_t>> chosen;
      const std::size_t max_pairs = n_devices * (n_devices - 1) / 2;
      const std::size_t want = std::min(plan.random_count, max_pairs);
      while (chosen.size() < want) {
        auto i = static_cast<std::size_t>(rng.below(n_devices));
        auto j = static_cast<std::size_t>(rng.below(n_devices));
        if (i == j) continue;
        if (i > j) std::swap(i, j);
        chosen.emplace(i, j);
      }
      pairs.assign(chosen.begin(), chosen.end());
      break;
    }
    case PairPlan::Kind::Explicit:
      for (auto [i, j] : plan.pairs) {
        if (i >= n_devices || j >= n_devices || i == j) {
          throw InvalidConfig("pair indices must name two distinct devices");
        }
        pairs.emplace_back(i, j);
      }
      break;
  }
  return pairs;
}

// Runs every requested pair and aggregates. Fully deterministic for a fixed
// (config, plan): rerunning yields byte-identical CSV/JSON.
inline ScenarioReport run_scenario(const SimConfig& cfg, const PairPlan& plan,
                                   const QuantileTable& table,
                                   const PairwiseOptions& options = {}) {
  const auto devices = generate_population(cfg);
  const auto pair_indices = resolve_pairs(plan, devices.size(), cfg.seed);

  ScenarioReport report;
  report.n_devices = cfg.n_devices;
  report.seed = cfg.seed;
  double gap_sum = 0.0, combined_sum = 0.0;
  for (std::size_t k = 0; k < pair_indices.size(); ++k) {
    const auto [i, j] = pair_indices[k];
    auto outcome = run_pairwise(devices[i], devices[j], table,
                                derive_seed(cfg.seed, 0x9000 + k), options);
    PairOutcome po;
    po.pair_id = devices[i].profile.device_id + "-" + devices[j].profile.device_id;
    po.index_a = i;
    po.index_b = j;
    po.mutual_count = outcome.mutual_count;
    po.estimate_a = outcome.estimate_a;
    po.estimate_b = outcome.estimate_b;

    const double gap = std::abs(po.estimate_a.combined - po.estimate_b.combined);
    gap_sum += gap;
    combined_sum += po.estimate_a.combined + po.estimate_b.combined;
    report.max_gap = std::max(report.max_gap, gap);
    auto bin = [](double v) {
      return static_cast<std::size_t>(std::min(9.0, std::floor(v * 10.0)));
    };
    report.combined_histogram[bin(po.estimate_a.combined)] += 1;
    report.combined_histogram[bin(po.estimate_b.combined)] += 1;
    report.gap_histogram[bin(gap)] += 1;
    report.pairs.push_back(std::move(po));
  }
  if (!report.pairs.empty()) {
    report.mean_gap = gap_sum / static_cast<double>(report.pairs.size());
    report.mean_combined = combined_sum / (2.0 * static_cast<double>(report.pairs.size()));
  }
  return report;
}

}  // namespace socialtrust
