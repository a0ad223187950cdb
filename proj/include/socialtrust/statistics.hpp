#pragma once

// Correlation analysis over the rating variables and interaction-class
// rating histograms. Likert ratings are treated as numeric 1..5 for the
// Pearson coefficient; a rank-based (Spearman) variant is available for
// callers wary of the categorical-data caveat.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "socialtrust/datamodel.hpp"
#include "socialtrust/errors.hpp"
#include "socialtrust/ingest.hpp"

namespace socialtrust {

inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DegenerateInput("pearson: length mismatch");
  const std::size_t n = x.size();
  if (n < 3) throw DegenerateInput("pearson: need at least 3 pairs");
  const double mean_x = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateInput("pearson: zero variance");
  return sxy / std::sqrt(sxx * syy);
}

namespace detail {

// Ranks with ties averaged.
inline std::vector<double> ranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace detail

inline double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DegenerateInput("spearman: length mismatch");
  const auto rx = detail::ranks(x);
  const auto ry = detail::ranks(y);
  return pearson(rx, ry);
}

// Two-sided 99% critical values of Student's t, df 1..100; beyond that the
// normal approximation is close enough for this test.
inline double critical_t_99(std::int64_t df) {
  static constexpr std::array<double, 100> kTable{
      63.6567411629, 9.9248432009, 5.8409093097, 4.6040948714, 4.0321429836,
      3.7074280213, 3.4994832974, 3.3553873313, 3.2498355416, 3.1692726726,
      3.1058065155, 3.0545395894, 3.0122758387, 2.9768427344, 2.9467128835,
      2.9207816225, 2.8982305196, 2.8784404727, 2.8609346064, 2.8453397098,
      2.8313595580, 2.8187560606, 2.8073356838, 2.7969395048, 2.7874358137,
      2.7787145333, 2.7706829571, 2.7632624555, 2.7563859037, 2.7499956536,
      2.7440419193, 2.7384814820, 2.7332766424, 2.7283943671, 2.7238055892,
      2.7194846304, 2.7154087215, 2.7115576019, 2.7079131835, 2.7044592674,
      2.7011813036, 2.6980661862, 2.6951020792, 2.6922782657, 2.6895850194,
      2.6870134922, 2.6845556179, 2.6822040270, 2.6799519736, 2.6777932709,
      2.6757222341, 2.6737336306, 2.6718226362, 2.6699847957, 2.6682159885,
      2.6665123976, 2.6648704822, 2.6632869535, 2.6617587522, 2.6602830289,
      2.6588571267, 2.6574785650, 2.6561450251, 2.6548543374, 2.6536044694,
      2.6523935150, 2.6512196852, 2.6500812987, 2.6489767744, 2.6479046238,
      2.6468634442, 2.6458519132, 2.6448687821, 2.6439128717, 2.6429830670,
      2.6420783131, 2.6411976114, 2.6403400153, 2.6395046275, 2.6386905963,
      2.6378971134, 2.6371234104, 2.6363687569, 2.6356324580, 2.6349138523,
      2.6342123094, 2.6335272291, 2.6328580385, 2.6322041912, 2.6315651656,
      2.6309404634, 2.6303296083, 2.6297321451, 2.6291476383, 2.6285756708,
      2.6280158435, 2.6274677740, 2.6269310958, 2.6264054573, 2.6258905214,
  };
  if (df < 1) throw DegenerateInput("t critical value needs df >= 1");
  if (df <= 100) return kTable[static_cast<std::size_t>(df - 1)];
  return 2.5758293035489004;  // z_{0.995}
}

struct SignificanceResult {
  double t_statistic = 0.0;
  double critical_value = 0.0;
  bool significant_at_99 = false;
};

// t = r * sqrt((n-2) / (1-r^2)), compared against the two-sided 99%
// critical value with n-2 degrees of freedom.
inline SignificanceResult correlation_significance(double r, std::int64_t n) {
  if (n < 3) throw DegenerateInput("significance test needs n >= 3");
  if (!(std::abs(r) < 1.0)) throw DegenerateInput("significance test needs |r| < 1");
  SignificanceResult result;
  result.t_statistic =
      r * std::sqrt(static_cast<double>(n - 2) / (1.0 - r * r));
  result.critical_value = critical_t_99(n - 2);
  result.significant_at_99 = std::abs(result.t_statistic) > result.critical_value;
  return result;
}

// ---------------------------------------------------------------------------
// Rating-variable correlations over a corpus

struct CorrelationEntry {
  RatingVariable first;
  RatingVariable second;
  double r = 0.0;
  std::int64_t n_pairs = 0;  // partners with both ratings present
  SignificanceResult significance;
};

// Pairwise correlations between the three rating variables, computed over
// every partner that answered both statements of a pair.
inline std::vector<CorrelationEntry> rating_correlations(
    const std::vector<ParticipantLog>& logs, bool use_spearman = false) {
  constexpr std::array<std::pair<RatingVariable, RatingVariable>, 3> pairs{{
      {RatingVariable::Closeness, RatingVariable::TrustInfo},
      {RatingVariable::Closeness, RatingVariable::TrustBest},
      {RatingVariable::TrustInfo, RatingVariable::TrustBest},
  }};
  std::vector<CorrelationEntry> out;
  for (const auto& [a, b] : pairs) {
    std::vector<double> xs, ys;
    for (const auto& log : logs) {
      for (const auto& p : log.partners) {
        const auto va = rating_value(p.rating, a);
        const auto vb = rating_value(p.rating, b);
        if (!va || !vb) continue;
        xs.push_back(static_cast<double>(*va));
        ys.push_back(static_cast<double>(*vb));
      }
    }
    CorrelationEntry entry;
    entry.first = a;
    entry.second = b;
    entry.n_pairs = static_cast<std::int64_t>(xs.size());
    entry.r = use_spearman ? spearman(xs, ys) : pearson(xs, ys);
    entry.significance = correlation_significance(entry.r, entry.n_pairs);
    out.push_back(entry);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Interaction-class rating histograms

// counts[class][level-1]; every counted partner carries the chosen rating.
struct ClassHistograms {
  std::array<std::array<std::int64_t, 5>, 3> counts{};

  std::int64_t class_total(InteractionClass c) const {
    const auto& row = counts[static_cast<std::size_t>(c)];
    return std::accumulate(row.begin(), row.end(), std::int64_t{0});
  }
};

inline ClassHistograms class_distribution(
    const std::vector<PartnerRecord>& partners,
    const std::map<std::string, InteractionClass>& assignment,
    RatingVariable rating_variable = RatingVariable::TrustInfo) {
  ClassHistograms h;
  for (const auto& p : partners) {
    const auto it = assignment.find(p.partner_id);
    if (it == assignment.end()) continue;
    const auto level = rating_value(p.rating, rating_variable);
    if (!level) continue;
    h.counts[static_cast<std::size_t>(it->second)][static_cast<std::size_t>(*level - 1)] += 1;
  }
  return h;
}

}  // namespace socialtrust
