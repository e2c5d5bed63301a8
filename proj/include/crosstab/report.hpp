#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "crosstab/assoc.hpp"
#include "crosstab/table.hpp"

namespace crosstab {

using Json = nlohmann::ordered_json;

enum class FisherChoice { automatic, exact, montecarlo, off };

struct AnalyzeOptions {
  double alpha = 0.05;
  std::optional<bool> yates;  // unset = apply to 2x2 tables only
  FisherChoice fisher = FisherChoice::automatic;
  std::int64_t replicates = 100000;
  std::uint64_t seed = 0;
  Correction correction = Correction::none;
  bool prune_empty = false;
  Index ndim = 2;  // correspondence summary, clamped to the table's rank
};

struct AnalysisResult {
  Json report;
  ContingencyTable table;  // the table actually analyzed (after any prune)
  Matrix pct_diff;
};

// Full single-table analysis: omnibus tests, effect sizes, power grid,
// expected-frequency criteria, cellwise tests, percent-difference matrix,
// correspondence summary, and module-tagged warnings.
AnalysisResult analyze_table(const ContingencyTable& input,
                             const AnalyzeOptions& options,
                             const std::string& source);

// Diverging heatmap of percent difference from expected counts.
std::string heatmap_svg(const ContingencyTable& table, const Matrix& pct_diff);

// Distribution summary (min/p10/p25/median/mean/p75/p90/max, quantiles by
// linear interpolation of order statistics); null for an empty sample.
Json distribution_stats(std::vector<double> values);

// Batch roll-up over analyze reports: omnibus-level and cellwise-level
// distribution summaries.
Json batch_summary(const std::vector<Json>& reports);

}  // namespace crosstab
