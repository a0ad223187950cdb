#pragma once

// Three-group closeness comparison: an activity-cutoff classifier stands in
// for the external call-prediction metric, survey ratings are binned into
// the same three groups, and the mean error counts how often the classifier
// places a contact in a lower group than the survey supports.

#include <cstdint>
#include <string>
#include <vector>

#include "socialtrust/datamodel.hpp"
#include "socialtrust/errors.hpp"
#include "socialtrust/features.hpp"

namespace socialtrust {

enum class ClosenessGroup {
  SociallyDistant = 0,
  SociallyNear = 1,
  SociallyClosest = 2,
};

inline const char* to_string(ClosenessGroup g) {
  switch (g) {
    case ClosenessGroup::SociallyDistant: return "distant";
    case ClosenessGroup::SociallyNear: return "near";
    case ClosenessGroup::SociallyClosest: return "closest";
  }
  return "?";
}

// Maps each rating level onto a group; must be monotone (a higher rating
// never lands in a lower group).
struct BinningScheme {
  std::array<ClosenessGroup, 5> by_level{};

  // ratings 1-2 distant, 3 near, 4-5 closest
  static BinningScheme scheme_a() {
    return {{ClosenessGroup::SociallyDistant, ClosenessGroup::SociallyDistant,
             ClosenessGroup::SociallyNear, ClosenessGroup::SociallyClosest,
             ClosenessGroup::SociallyClosest}};
  }
  // ratings 1-3 distant, 4 near, 5 closest
  static BinningScheme scheme_b() {
    return {{ClosenessGroup::SociallyDistant, ClosenessGroup::SociallyDistant,
             ClosenessGroup::SociallyDistant, ClosenessGroup::SociallyNear,
             ClosenessGroup::SociallyClosest}};
  }

  bool monotone() const {
    for (std::size_t i = 1; i < by_level.size(); ++i) {
      if (by_level[i] < by_level[i - 1]) return false;
    }
    return true;
  }
};

inline ClosenessGroup bin_rating(TrustLevel rating, const BinningScheme& scheme) {
  return scheme.by_level[static_cast<std::size_t>(rating.value - 1)];
}

// Activity score thresholds: score <= low is distant, score <= high near,
// above that closest.
struct ActivityCutoffs {
  double low = 2.0;
  double high = 10.0;
};

// The pluggable classifier boundary. The default implementation scores a
// contact by its call count (optionally plus messages) against the cutoffs;
// a faithful reimplementation of the original call-prediction algorithm can
// be swapped in here.
inline ClosenessGroup classify(const FeatureVector& fv, bool include_messages,
                               const ActivityCutoffs& cutoffs) {
  const double score = static_cast<double>(fv.num_calls) +
                       (include_messages ? static_cast<double>(fv.num_msgs) : 0.0);
  if (score <= cutoffs.low) return ClosenessGroup::SociallyDistant;
  if (score <= cutoffs.high) return ClosenessGroup::SociallyNear;
  return ClosenessGroup::SociallyClosest;
}

// Underestimation only (the classifier placing a contact lower than the
// survey) is the error the comparison is about; Disagreement counts any
// mismatch.
enum class ErrorMode { Underestimate, Disagreement };

// Per-participant mean of fractions, or all partners pooled.
enum class ErrorAggregation { PerParticipantMean, Pooled };

struct ParticipantError {
  std::string participant_id;
  std::int64_t rated_partners = 0;
  std::int64_t errors = 0;
  double fraction = 0.0;
};

struct MeanErrorReport {
  double mean_error = 0.0;
  std::int64_t rated_partners = 0;
  std::vector<ParticipantError> per_participant;
};

inline MeanErrorReport mean_error(const std::vector<ParticipantLog>& logs,
                                  bool include_messages, const ActivityCutoffs& cutoffs,
                                  const BinningScheme& scheme,
                                  RatingVariable rating_variable = RatingVariable::TrustInfo,
                                  ErrorMode mode = ErrorMode::Underestimate,
                                  ErrorAggregation aggregation = ErrorAggregation::PerParticipantMean) {
  MeanErrorReport report;
  std::int64_t pooled_errors = 0;
  for (const auto& log : logs) {
    ParticipantError pe;
    pe.participant_id = log.participant_id;
    for (const auto& rows = labeled_features(log); const auto& row : rows) {
      const auto level = rating_value(row.rating, rating_variable);
      if (!level) continue;
      ++pe.rated_partners;
      const auto predicted = classify(row.features, include_messages, cutoffs);
      const auto surveyed = bin_rating(TrustLevel{*level}, scheme);
      const bool is_error = mode == ErrorMode::Underestimate ? predicted < surveyed
                                                             : predicted != surveyed;
      if (is_error) ++pe.errors;
    }
    if (pe.rated_partners == 0) continue;
    pe.fraction = static_cast<double>(pe.errors) / static_cast<double>(pe.rated_partners);
    report.rated_partners += pe.rated_partners;
    pooled_errors += pe.errors;
    report.per_participant.push_back(pe);
  }
  if (report.per_participant.empty()) throw NoRatedPartners();
  if (aggregation == ErrorAggregation::Pooled) {
    report.mean_error =
        static_cast<double>(pooled_errors) / static_cast<double>(report.rated_partners);
  } else {
    double sum = 0.0;
    for (const auto& pe : report.per_participant) sum += pe.fraction;
    report.mean_error = sum / static_cast<double>(report.per_participant.size());
  }
  return report;
}

}  // namespace socialtrust
