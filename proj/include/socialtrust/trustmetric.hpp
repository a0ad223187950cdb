#pragma once

// The quantile-threshold trust metric. Thresholds are the empirical
// quantiles of the distrusted (level-1) subpopulation: a partner whose
// indicator exceeds, say, the 95% quantile looks unlike 95% of distrusted
// contacts, which signals trust. Checking all four quantile columns yields
// a graded prediction.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "socialtrust/datamodel.hpp"
#include "socialtrust/errors.hpp"

namespace socialtrust {

// The six indicators the metric is built on.
enum class Indicator {
  NumCalls,
  NumMsgs,
  DurCalls,
  LenMsgs,
  RelCalls,
  RelMsgs,
};

inline constexpr std::array<Indicator, 6> kAllIndicators{
    Indicator::NumCalls, Indicator::NumMsgs,  Indicator::DurCalls,
    Indicator::LenMsgs,  Indicator::RelCalls, Indicator::RelMsgs,
};

inline const char* to_string(Indicator v) {
  switch (v) {
    case Indicator::NumCalls: return "num_calls";
    case Indicator::NumMsgs: return "num_msgs";
    case Indicator::DurCalls: return "dur_calls";
    case Indicator::LenMsgs: return "len_msgs";
    case Indicator::RelCalls: return "rel_calls";
    case Indicator::RelMsgs: return "rel_msgs";
  }
  return "?";
}

inline std::optional<Indicator> indicator_from_string(const std::string& name) {
  for (Indicator v : kAllIndicators) {
    if (name == to_string(v)) return v;
  }
  return std::nullopt;
}

inline double indicator_value(const FeatureVector& fv, Indicator v) {
  switch (v) {
    case Indicator::NumCalls: return static_cast<double>(fv.num_calls);
    case Indicator::NumMsgs: return static_cast<double>(fv.num_msgs);
    case Indicator::DurCalls: return static_cast<double>(fv.dur_calls);
    case Indicator::LenMsgs: return static_cast<double>(fv.len_msgs);
    case Indicator::RelCalls: return fv.rel_calls;
    case Indicator::RelMsgs: return fv.rel_msgs;
  }
  return 0.0;
}

inline constexpr std::array<double, 4> kQuantileProbs{0.75, 0.90, 0.95, 0.99};

// Empirical quantile of a sample: sorted-sample linear interpolation at
// position p*(n-1), zero-indexed.
inline double interpolated_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw DegenerateInput("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n == 1) return values[0];
  const double pos = p * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= n) return values[n - 1];
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

// Calibrated quantiles of the six indicators over a reference population,
// one value per (indicator, probability). Rows are non-decreasing in
// probability by construction.
struct QuantileTable {
  std::array<std::array<double, 4>, 6> values{};

  static std::optional<std::size_t> prob_index(double prob) {
    for (std::size_t i = 0; i < kQuantileProbs.size(); ++i) {
      if (std::abs(kQuantileProbs[i] - prob) < 1e-12) return i;
    }
    return std::nullopt;
  }

  double at(Indicator v, double prob) const {
    const auto idx = prob_index(prob);
    if (!idx) throw UnknownProbability();
    return values[static_cast<std::size_t>(v)][*idx];
  }

  bool operator==(const QuantileTable&) const = default;
};

// The calibration shipped with the artifact, measured on the original
// 188-participant survey corpus over its level-1 contacts.
inline QuantileTable reference_table() {
  QuantileTable t;
  t.values[static_cast<std::size_t>(Indicator::NumCalls)] = {2.0, 7.0, 13.0, 42.0};
  t.values[static_cast<std::size_t>(Indicator::NumMsgs)] = {2.5, 14.0, 35.0, 84.0};
  t.values[static_cast<std::size_t>(Indicator::DurCalls)] = {89.0, 460.0, 711.0, 4759.0};
  t.values[static_cast<std::size_t>(Indicator::LenMsgs)] = {158.0, 1003.0, 2105.0, 5580.0};
  t.values[static_cast<std::size_t>(Indicator::RelCalls)] = {0.6, 2.6, 5.5, 14.6};
  t.values[static_cast<std::size_t>(Indicator::RelMsgs)] = {0.6, 2.3, 5.9, 17.4};
  return t;
}

using RatedFeatures = std::pair<FeatureVector, Rating>;

// Empirical quantiles of each indicator over the partners rated at
// `reference_level` (per `rating_variable`). Throws
// EmptyReferencePopulation when no partner carries that level.
inline QuantileTable compute_quantiles(const std::vector<RatedFeatures>& dataset,
                                       TrustLevel reference_level = {1},
                                       RatingVariable rating_variable = RatingVariable::TrustInfo) {
  std::array<std::vector<double>, 6> samples;
  for (const auto& [fv, rating] : dataset) {
    const auto level = rating_value(rating, rating_variable);
    if (!level || *level != reference_level.value) continue;
    for (Indicator v : kAllIndicators) {
      samples[static_cast<std::size_t>(v)].push_back(indicator_value(fv, v));
    }
  }
  if (samples[0].empty()) throw EmptyReferencePopulation();
  QuantileTable table;
  for (Indicator v : kAllIndicators) {
    for (std::size_t pi = 0; pi < kQuantileProbs.size(); ++pi) {
      table.values[static_cast<std::size_t>(v)][pi] =
          interpolated_quantile(samples[static_cast<std::size_t>(v)], kQuantileProbs[pi]);
    }
  }
  return table;
}

// Alternative aggregation: calibrate per participant, then average the
// tables. Participants without a reference population are skipped.
inline QuantileTable compute_quantiles_per_participant(
    const std::vector<std::vector<RatedFeatures>>& per_participant,
    TrustLevel reference_level = {1},
    RatingVariable rating_variable = RatingVariable::TrustInfo) {
  QuantileTable sum;
  std::size_t contributing = 0;
  for (const auto& dataset : per_participant) {
    QuantileTable t;
    try {
      t = compute_quantiles(dataset, reference_level, rating_variable);
    } catch (const EmptyReferencePopulation&) {
      continue;
    }
    for (std::size_t v = 0; v < 6; ++v) {
      for (std::size_t p = 0; p < 4; ++p) sum.values[v][p] += t.values[v][p];
    }
    ++contributing;
  }
  if (contributing == 0) throw EmptyReferencePopulation();
  for (std::size_t v = 0; v < 6; ++v) {
    for (std::size_t p = 0; p < 4; ++p) {
      sum.values[v][p] /= static_cast<double>(contributing);
    }
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Threshold rules

// OR over all six indicators, or one AND-joined indicator pair.
struct Combinator {
  enum class Kind { OrAny, AndPair };

  Kind kind = Kind::OrAny;
  Indicator first = Indicator::NumCalls;   // AndPair only
  Indicator second = Indicator::LenMsgs;   // AndPair only

  static Combinator or_any() { return {}; }
  static Combinator and_pair(Indicator a, Indicator b) {
    return {Kind::AndPair, a, b};
  }

  std::vector<Indicator> indicators() const {
    if (kind == Kind::OrAny) {
      return {kAllIndicators.begin(), kAllIndicators.end()};
    }
    return {first, second};
  }

  bool operator==(const Combinator&) const = default;
};

struct ThresholdRule {
  Combinator combinator;
  double quantile_prob = 0.95;
  // threshold per indicator; set exactly for the combinator's indicators
  std::array<std::optional<double>, 6> thresholds{};
  bool favorites_filter = false;

  std::optional<double> threshold(Indicator v) const {
    return thresholds[static_cast<std::size_t>(v)];
  }
};

inline ThresholdRule build_rule(const QuantileTable& table, double prob,
                                const Combinator& combinator,
                                bool favorites_filter = false) {
  if (!QuantileTable::prob_index(prob)) throw UnknownProbability();
  ThresholdRule rule;
  rule.combinator = combinator;
  rule.quantile_prob = prob;
  rule.favorites_filter = favorites_filter;
  for (Indicator v : combinator.indicators()) {
    rule.thresholds[static_cast<std::size_t>(v)] = table.at(v, prob);
  }
  return rule;
}

// Rule satisfaction is strict: thresholds bound the distrusted population,
// and equality stays inside it.
inline bool satisfies(const FeatureVector& fv, const ThresholdRule& rule) {
  if (rule.favorites_filter && !fv.is_favorite) return false;
  const auto exceeds = [&](Indicator v) {
    const auto t = rule.threshold(v);
    return t && indicator_value(fv, v) > *t;
  };
  if (rule.combinator.kind == Combinator::Kind::AndPair) {
    return exceeds(rule.combinator.first) && exceeds(rule.combinator.second);
  }
  return std::any_of(kAllIndicators.begin(), kAllIndicators.end(), exceeds);
}

// ---------------------------------------------------------------------------
// Graded prediction

// Maps the four quantile columns onto the four above-minimum Likert levels.
struct GradingBands {
  // grade assigned when the highest satisfied band is kQuantileProbs[i]
  std::array<int, 4> grade_by_band{2, 3, 4, 5};
};

struct TriggeredCondition {
  Indicator indicator;
  double threshold;
  double observed;
};

struct TrustPrediction {
  bool predicted_trusted = false;
  TrustLevel grade{1};
  std::vector<TriggeredCondition> triggered;    // conditions met at the firing band
  std::optional<double> confidence_band;        // quantile prob that fired
};

// Evaluates the rule at all four probabilities and grades by the highest
// satisfied band. With favorites_filter set, non-favorites are never
// predicted trusted no matter their indicators.
inline TrustPrediction predict(const FeatureVector& fv, const QuantileTable& table,
                               const Combinator& combinator,
                               bool favorites_filter = false,
                               const GradingBands& bands = {}) {
  TrustPrediction prediction;
  if (favorites_filter && !fv.is_favorite) return prediction;
  for (std::size_t pi = kQuantileProbs.size(); pi-- > 0;) {
    const auto rule = build_rule(table, kQuantileProbs[pi], combinator, favorites_filter);
    if (!satisfies(fv, rule)) continue;
    prediction.predicted_trusted = true;
    prediction.grade = TrustLevel{bands.grade_by_band[pi]};
    prediction.confidence_band = kQuantileProbs[pi];
    for (Indicator v : combinator.indicators()) {
      const auto t = rule.threshold(v);
      const double observed = indicator_value(fv, v);
      if (t && observed > *t) prediction.triggered.push_back({v, *t, observed});
    }
    break;
  }
  return prediction;
}

// ---------------------------------------------------------------------------
// Rule evaluation against rated data

// Percent and cumulative percent per rating level, listed 5 -> 1.
struct RatingDistribution {
  std::array<std::int64_t, 5> counts{};  // counts[0] is level 5 ... counts[4] level 1
  std::array<double, 5> percent{};
  std::array<double, 5> cumulative_percent{};
  std::int64_t total = 0;

  static RatingDistribution from_counts(const std::array<std::int64_t, 5>& counts) {
    RatingDistribution d;
    d.counts = counts;
    for (auto c : counts) d.total += c;
    double cum = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
      d.percent[i] = d.total > 0
                         ? 100.0 * static_cast<double>(counts[i]) / static_cast<double>(d.total)
                         : 0.0;
      cum += d.percent[i];
      d.cumulative_percent[i] = cum;
    }
    return d;
  }

  std::int64_t count_for_level(int level) const { return counts[static_cast<std::size_t>(5 - level)]; }
  double percent_for_level(int level) const { return percent[static_cast<std::size_t>(5 - level)]; }
  double cumulative_for_level(int level) const {
    return cumulative_percent[static_cast<std::size_t>(5 - level)];
  }
};

// Rating distribution of the partners that satisfy the rule. Partners
// without the chosen rating cannot contribute a level and are skipped.
inline RatingDistribution evaluate_rule(const std::vector<RatedFeatures>& dataset,
                                        const ThresholdRule& rule,
                                        RatingVariable rating_variable = RatingVariable::TrustInfo) {
  std::array<std::int64_t, 5> counts{};
  std::int64_t satisfying = 0;
  for (const auto& [fv, rating] : dataset) {
    if (!satisfies(fv, rule)) continue;
    const auto level = rating_value(rating, rating_variable);
    if (!level) continue;
    ++satisfying;
    counts[static_cast<std::size_t>(5 - *level)] += 1;
  }
  if (satisfying == 0) throw NoPartnerSatisfiesRule();
  return RatingDistribution::from_counts(counts);
}

// Rating distribution over favorite partners only.
inline RatingDistribution favorites_table(const std::vector<PartnerRecord>& partners,
                                          RatingVariable rating_variable = RatingVariable::TrustInfo) {
  std::array<std::int64_t, 5> counts{};
  std::int64_t rated_favorites = 0;
  for (const auto& p : partners) {
    if (!p.is_favorite) continue;
    const auto level = rating_value(p.rating, rating_variable);
    if (!level) continue;
    ++rated_favorites;
    counts[static_cast<std::size_t>(5 - *level)] += 1;
  }
  if (rated_favorites == 0) throw NoRatedFavorites();
  return RatingDistribution::from_counts(counts);
}

}  // namespace socialtrust
