#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "socialtrust/trustmetric.hpp"

using namespace socialtrust;
using namespace testutil;

namespace {

// brute-force reference: sort, interpolate linearly at p*(n-1)
double oracle_quantile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  const long double pos = static_cast<long double>(p) * static_cast<long double>(n - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= n) return values[n - 1];
  const long double g = pos - static_cast<long double>(lo);
  return static_cast<double>((1.0L - g) * values[lo] + g * values[lo + 1]);
}

FeatureVector fv_with(Indicator v, double value) {
  FeatureVector fv;
  switch (v) {
    case Indicator::NumCalls: fv.num_calls = static_cast<std::int64_t>(value); break;
    case Indicator::NumMsgs: fv.num_msgs = static_cast<std::int64_t>(value); break;
    case Indicator::DurCalls: fv.dur_calls = static_cast<std::int64_t>(value); break;
    case Indicator::LenMsgs: fv.len_msgs = static_cast<std::int64_t>(value); break;
    case Indicator::RelCalls: fv.rel_calls = value; break;
    case Indicator::RelMsgs: fv.rel_msgs = value; break;
  }
  return fv;
}

Rating rated(int trust_info) {
  Rating r;
  r.trust_info = trust_info;
  return r;
}

}  // namespace

TEST_CASE("interpolated quantile matches hand-computed values") {
  std::vector<double> one_to_hundred;
  for (int i = 1; i <= 100; ++i) one_to_hundred.push_back(i);
  std::vector<RatedFeatures> dataset;
  for (double v : one_to_hundred) dataset.push_back({fv_with(Indicator::NumCalls, v), rated(1)});

  const auto table = compute_quantiles(dataset);
  REQUIRE_THAT(table.at(Indicator::NumCalls, 0.95),
               Catch::Matchers::WithinAbs(95.05, 1e-12));

  // one-point reference population: every quantile equals that point
  const std::vector<RatedFeatures> single{{fv_with(Indicator::NumMsgs, 17.0), rated(1)}};
  const auto t1 = compute_quantiles(single);
  for (double p : kQuantileProbs) REQUIRE(t1.at(Indicator::NumMsgs, p) == 17.0);
}

TEST_CASE("quantile estimator agrees with the brute-force oracle") {
  Rng rng(808);
  for (int round = 0; round < 300; ++round) {
    const auto n = static_cast<std::size_t>(rng.range(1, 500));
    std::vector<double> values(n);
    for (auto& v : values) {
      v = rng.bernoulli(0.3) ? static_cast<double>(rng.range(0, 50))  // ties
                             : rng.unit() * 1e6;
    }
    for (double p : kQuantileProbs) {
      REQUIRE_THAT(interpolated_quantile(values, p),
                   Catch::Matchers::WithinAbs(oracle_quantile(values, p), 1e-9));
    }
  }
}

TEST_CASE("calibration needs a non-empty reference population") {
  std::vector<RatedFeatures> dataset{{fv_with(Indicator::NumCalls, 5), rated(4)}};
  REQUIRE_THROWS_AS(compute_quantiles(dataset, TrustLevel{1}), EmptyReferencePopulation);
  REQUIRE_NOTHROW(compute_quantiles(dataset, TrustLevel{4}));
}

TEST_CASE("the shipped calibration matches the published thresholds") {
  const auto table = reference_table();
  REQUIRE(table.at(Indicator::NumCalls, 0.95) == 13.0);
  REQUIRE(table.at(Indicator::NumMsgs, 0.95) == 35.0);
  REQUIRE(table.at(Indicator::DurCalls, 0.95) == 711.0);
  REQUIRE(table.at(Indicator::LenMsgs, 0.95) == 2105.0);
  REQUIRE(table.at(Indicator::RelCalls, 0.95) == 5.5);
  REQUIRE(table.at(Indicator::RelMsgs, 0.95) == 5.9);
  // rows stay monotone across the probabilities
  for (Indicator v : kAllIndicators) {
    for (std::size_t pi = 1; pi < kQuantileProbs.size(); ++pi) {
      REQUIRE(table.values[static_cast<std::size_t>(v)][pi] >=
              table.values[static_cast<std::size_t>(v)][pi - 1]);
    }
  }
}

TEST_CASE("build_rule copies the requested quantile row") {
  const auto table = reference_table();

  const auto or_rule = build_rule(table, 0.95, Combinator::or_any());
  REQUIRE(or_rule.threshold(Indicator::NumCalls) == 13.0);
  REQUIRE(or_rule.threshold(Indicator::NumMsgs) == 35.0);
  REQUIRE(or_rule.threshold(Indicator::DurCalls) == 711.0);
  REQUIRE(or_rule.threshold(Indicator::LenMsgs) == 2105.0);
  REQUIRE(or_rule.threshold(Indicator::RelCalls) == 5.5);
  REQUIRE(or_rule.threshold(Indicator::RelMsgs) == 5.9);

  const auto and_rule =
      build_rule(table, 0.95, Combinator::and_pair(Indicator::NumCalls, Indicator::LenMsgs));
  REQUIRE(and_rule.threshold(Indicator::NumCalls) == 13.0);
  REQUIRE(and_rule.threshold(Indicator::LenMsgs) == 2105.0);
  REQUIRE_FALSE(and_rule.threshold(Indicator::NumMsgs).has_value());

  REQUIRE_THROWS_AS(build_rule(table, 0.50, Combinator::or_any()), UnknownProbability);
}

TEST_CASE("prediction grades by the highest satisfied band") {
  const auto table = reference_table();
  const auto or_any = Combinator::or_any();

  SECTION("all-zero features exceed nothing") {
    const auto p = predict(FeatureVector{}, table, or_any);
    REQUIRE_FALSE(p.predicted_trusted);
    REQUIRE(p.grade.value == 1);
    REQUIRE(p.triggered.empty());
    REQUIRE_FALSE(p.confidence_band.has_value());
  }

  SECTION("14 calls clears the 95% band") {
    const auto p = predict(fv_with(Indicator::NumCalls, 14), table, or_any);
    REQUIRE(p.predicted_trusted);
    REQUIRE(p.confidence_band == 0.95);
    REQUIRE(p.grade.value == 4);
    REQUIRE(p.triggered.size() == 1);
    REQUIRE(p.triggered[0].indicator == Indicator::NumCalls);
    REQUIRE(p.triggered[0].threshold == 13.0);
    REQUIRE(p.triggered[0].observed == 14.0);
  }

  SECTION("50 calls clears the 99% band") {
    const auto p = predict(fv_with(Indicator::NumCalls, 50), table, or_any);
    REQUIRE(p.confidence_band == 0.99);
    REQUIRE(p.grade.value == 5);
  }

  SECTION("strict inequality: a value equal to the threshold stays distrusted") {
    const auto p = predict(fv_with(Indicator::NumCalls, 2), table, or_any);
    REQUIRE_FALSE(p.predicted_trusted);
  }

  SECTION("favorites filter vetoes non-favorites") {
    auto fv = fv_with(Indicator::NumCalls, 50);
    const auto vetoed = predict(fv, table, or_any, true);
    REQUIRE_FALSE(vetoed.predicted_trusted);
    REQUIRE(vetoed.grade.value == 1);
    fv.is_favorite = true;
    const auto passed = predict(fv, table, or_any, true);
    REQUIRE(passed.predicted_trusted);
    REQUIRE(passed.grade.value == 5);
  }
}

TEST_CASE("prediction is monotone in every single indicator") {
  Rng rng(909);
  const auto table = reference_table();
  for (int round = 0; round < 300; ++round) {
    FeatureVector fv;
    fv.num_calls = rng.range(0, 60);
    fv.num_msgs = rng.range(0, 120);
    fv.dur_calls = rng.range(0, 6000);
    fv.len_msgs = rng.range(0, 7000);
    fv.rel_calls = rng.unit() * 20.0;
    fv.rel_msgs = rng.unit() * 20.0;
    fv.is_favorite = rng.bernoulli(0.5);
    const auto combinator =
        rng.bernoulli(0.5)
            ? Combinator::or_any()
            : Combinator::and_pair(kAllIndicators[rng.below(6)], kAllIndicators[rng.below(6)]);
    const bool filter = rng.bernoulli(0.3);
    const int before = predict(fv, table, combinator, filter).grade.value;

    auto raised = fv;
    const auto which = kAllIndicators[rng.below(6)];
    switch (which) {
      case Indicator::NumCalls: raised.num_calls += rng.range(1, 40); break;
      case Indicator::NumMsgs: raised.num_msgs += rng.range(1, 60); break;
      case Indicator::DurCalls: raised.dur_calls += rng.range(1, 3000); break;
      case Indicator::LenMsgs: raised.len_msgs += rng.range(1, 4000); break;
      case Indicator::RelCalls: raised.rel_calls += rng.unit() * 10.0; break;
      case Indicator::RelMsgs: raised.rel_msgs += rng.unit() * 10.0; break;
    }
    const int after = predict(raised, table, combinator, filter).grade.value;
    REQUIRE(after >= before);
  }
}

TEST_CASE("band consistency: satisfying 99% implies every lower band") {
  Rng rng(1010);
  std::vector<RatedFeatures> dataset;
  for (int i = 0; i < 200; ++i) {
    FeatureVector fv;
    fv.num_calls = rng.range(0, 50);
    fv.num_msgs = rng.range(0, 100);
    fv.dur_calls = rng.range(0, 5000);
    fv.len_msgs = rng.range(0, 6000);
    fv.rel_calls = rng.unit() * 15.0;
    fv.rel_msgs = rng.unit() * 15.0;
    dataset.push_back({fv, rated(1 + static_cast<int>(rng.below(5)))});
  }
  const auto table = compute_quantiles(dataset);
  for (const auto& combinator :
       {Combinator::or_any(), Combinator::and_pair(Indicator::NumCalls, Indicator::LenMsgs)}) {
    for (const auto& [fv, rating] : dataset) {
      if (satisfies(fv, build_rule(table, 0.99, combinator))) {
        for (double p : {0.95, 0.90, 0.75}) {
          REQUIRE(satisfies(fv, build_rule(table, p, combinator)));
        }
      }
    }
  }
}

TEST_CASE("evaluate_rule reproduces an engineered level distribution") {
  // satisfying partners with level counts proportional to the published
  // OR-condition distribution, inflated to integers summing to 10000
  const std::array<std::int64_t, 5> counts{4233, 1933, 1890, 886, 1058};  // levels 5..1
  std::vector<RatedFeatures> dataset;
  for (int level = 5; level >= 1; --level) {
    for (std::int64_t i = 0; i < counts[static_cast<std::size_t>(5 - level)]; ++i) {
      dataset.push_back({fv_with(Indicator::NumCalls, 14), rated(level)});
    }
  }
  // plus noise that does not satisfy the rule
  for (int i = 0; i < 500; ++i) dataset.push_back({FeatureVector{}, rated(1 + i % 5)});

  const auto rule = build_rule(reference_table(), 0.95, Combinator::or_any());
  const auto dist = evaluate_rule(dataset, rule);
  REQUIRE(dist.total == 10000);
  REQUIRE_THAT(dist.percent_for_level(5), Catch::Matchers::WithinAbs(42.33, 0.01));
  REQUIRE_THAT(dist.percent_for_level(4), Catch::Matchers::WithinAbs(19.33, 0.01));
  REQUIRE_THAT(dist.percent_for_level(3), Catch::Matchers::WithinAbs(18.90, 0.01));
  REQUIRE_THAT(dist.percent_for_level(2), Catch::Matchers::WithinAbs(8.86, 0.01));
  REQUIRE_THAT(dist.percent_for_level(1), Catch::Matchers::WithinAbs(10.58, 0.01));
  REQUIRE_THAT(dist.cumulative_for_level(3), Catch::Matchers::WithinAbs(80.56, 0.01));
  REQUIRE_THAT(dist.cumulative_for_level(1), Catch::Matchers::WithinAbs(100.0, 1e-9));
}

TEST_CASE("evaluate_rule edge cases and invariants") {
  const auto rule = build_rule(reference_table(), 0.95, Combinator::or_any());

  SECTION("no satisfying partner is an error") {
    const std::vector<RatedFeatures> dataset{{FeatureVector{}, rated(3)}};
    REQUIRE_THROWS_AS(evaluate_rule(dataset, rule), NoPartnerSatisfiesRule);
  }

  SECTION("all satisfying partners rated 5") {
    std::vector<RatedFeatures> dataset;
    for (int i = 0; i < 4; ++i) dataset.push_back({fv_with(Indicator::NumMsgs, 99), rated(5)});
    const auto dist = evaluate_rule(dataset, rule);
    REQUIRE(dist.percent_for_level(5) == 100.0);
    REQUIRE(dist.cumulative_for_level(5) == 100.0);
    for (int level = 4; level >= 1; --level) REQUIRE(dist.percent_for_level(level) == 0.0);
  }

  SECTION("percentages sum to 100 and the cumulative column is monotone") {
    Rng rng(111);
    for (int round = 0; round < 50; ++round) {
      std::vector<RatedFeatures> dataset;
      for (int i = 0; i < 100; ++i) {
        FeatureVector fv;
        fv.num_calls = rng.range(0, 60);
        fv.len_msgs = rng.range(0, 4000);
        dataset.push_back({fv, rated(1 + static_cast<int>(rng.below(5)))});
      }
      RatingDistribution dist;
      try {
        dist = evaluate_rule(dataset, rule);
      } catch (const NoPartnerSatisfiesRule&) {
        continue;
      }
      double sum = 0.0;
      for (double p : dist.percent) sum += p;
      REQUIRE_THAT(sum, Catch::Matchers::WithinAbs(100.0, 0.01));
      for (std::size_t i = 1; i < 5; ++i) {
        REQUIRE(dist.cumulative_percent[i] >= dist.cumulative_percent[i - 1]);
      }
      REQUIRE_THAT(dist.cumulative_percent[4], Catch::Matchers::WithinAbs(100.0, 1e-9));
    }
  }
}

TEST_CASE("favorites table") {
  SECTION("hand-counted example") {
    std::vector<PartnerRecord> partners;
    auto add = [&](int level, int how_many) {
      for (int i = 0; i < how_many; ++i) {
        partners.push_back(partner("f" + std::to_string(partners.size()),
                                   {call(1, CallDirection::Outgoing, 5)}, {}, level, true));
      }
    };
    add(5, 6);
    add(4, 2);
    add(3, 1);
    add(2, 1);
    const auto dist = favorites_table(partners);
    REQUIRE(dist.percent_for_level(5) == 60.0);
    REQUIRE(dist.percent_for_level(4) == 20.0);
    REQUIRE(dist.percent_for_level(3) == 10.0);
    REQUIRE(dist.percent_for_level(2) == 10.0);
    REQUIRE(dist.percent_for_level(1) == 0.0);
    REQUIRE(dist.cumulative_for_level(1) == 100.0);
  }

  SECTION("replaying the published favorite-rating distribution") {
    std::vector<PartnerRecord> partners;
    const std::array<std::int64_t, 5> counts{6053, 1955, 902, 564, 526};  // levels 5..1
    for (int level = 5; level >= 1; --level) {
      for (std::int64_t i = 0; i < counts[static_cast<std::size_t>(5 - level)]; ++i) {
        partners.push_back(partner("f" + std::to_string(partners.size()),
                                   {call(1, CallDirection::Outgoing, 5)}, {}, level, true));
      }
    }
    // non-favorites never enter the table
    partners.push_back(partner("nf", {call(1, CallDirection::Outgoing, 5)}, {}, 1, false));
    const auto dist = favorites_table(partners);
    REQUIRE_THAT(dist.percent_for_level(5), Catch::Matchers::WithinAbs(60.53, 0.01));
    REQUIRE_THAT(dist.percent_for_level(4), Catch::Matchers::WithinAbs(19.55, 0.01));
    REQUIRE_THAT(dist.percent_for_level(3), Catch::Matchers::WithinAbs(9.02, 0.01));
    REQUIRE_THAT(dist.percent_for_level(2), Catch::Matchers::WithinAbs(5.64, 0.01));
    REQUIRE_THAT(dist.percent_for_level(1), Catch::Matchers::WithinAbs(5.26, 0.01));
    REQUIRE_THAT(dist.cumulative_for_level(3), Catch::Matchers::WithinAbs(89.10, 0.01));
  }

  SECTION("no rated favorite is an error") {
    std::vector<PartnerRecord> partners{
        partner("a", {call(1, CallDirection::Outgoing, 5)}, {}, 4, false),
        partner("b", {call(1, CallDirection::Outgoing, 5)}, {}, std::nullopt, true)};
    REQUIRE_THROWS_AS(favorites_table(partners), NoRatedFavorites);
  }
}

TEST_CASE("with the favorites filter and an AND pair, trusted implies favorite") {
  Rng rng(1212);
  const auto table = reference_table();
  const auto combinator = Combinator::and_pair(Indicator::NumCalls, Indicator::LenMsgs);
  for (int round = 0; round < 100; ++round) {
    for (int i = 0; i < 50; ++i) {
      FeatureVector fv;
      fv.num_calls = rng.range(0, 60);
      fv.len_msgs = rng.range(0, 8000);
      fv.is_favorite = rng.bernoulli(0.4);
      const auto p = predict(fv, table, combinator, true);
      if (p.predicted_trusted) REQUIRE(fv.is_favorite);
    }
  }
}

TEST_CASE("per-participant aggregation averages the individual tables") {
  std::vector<RatedFeatures> participant_a{{fv_with(Indicator::NumCalls, 10), rated(1)}};
  std::vector<RatedFeatures> participant_b{{fv_with(Indicator::NumCalls, 20), rated(1)}};
  std::vector<RatedFeatures> unrated{{fv_with(Indicator::NumCalls, 99), rated(5)}};
  const auto table =
      compute_quantiles_per_participant({participant_a, participant_b, unrated});
  for (double p : kQuantileProbs) REQUIRE(table.at(Indicator::NumCalls, p) == 15.0);

  REQUIRE_THROWS_AS(compute_quantiles_per_participant({unrated}), EmptyReferencePopulation);
}
