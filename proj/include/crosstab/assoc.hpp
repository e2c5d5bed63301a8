#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "crosstab/table.hpp"

namespace crosstab {

enum class FisherMode { none, exact, montecarlo };
enum class Correction { none, bonferroni, holm };

struct OmnibusResult {
  double chi2 = 0.0;
  int df = 0;
  double p_chi2 = 1.0;
  bool yates = false;
  std::optional<double> p_fisher;
  FisherMode fisher_mode = FisherMode::none;
  std::optional<std::int64_t> mc_replicates;
  std::optional<double> mc_se;
};

struct CellResult {
  Index row = 0;
  Index col = 0;
  double chi2_yates = 0.0;
  double p = 1.0;
  std::optional<double> p_adjusted;
  double phi = 0.0;
  char direction = '0';  // '+' if O > E, '-' if O < E, '0' if exactly equal
  bool meets_standard = false;
  bool meets_haber = false;
  bool meets_andres = false;
};

struct McEstimate {
  double p = 0.0;
  double se = 0.0;
};

// Pearson chi-squared; with yates=true (2x2 only) each |O-E| is shrunk by
// 0.5, floored at 0.
OmnibusResult chi_squared_test(const ContingencyTable& table, bool yates);

// Two-sided exact test for 2x2 tables: sums hypergeometric probabilities of
// all same-margin tables whose point probability is <= observed * (1 + 1e-7).
double fisher_exact_2x2(const ContingencyTable& table);

// Margin-preserving Monte Carlo version for any r x c table. Counts sampled
// tables with point log-probability <= observed + 1e-7 and reports
// p = (count + 1) / (replicates + 1). Deterministic for a fixed seed,
// independent of how replicate chunks are scheduled.
McEstimate fisher_exact_montecarlo(const ContingencyTable& table,
                                   std::int64_t replicates,
                                   std::uint64_t seed);

// One Yates-corrected 2x2 test per cell of the table, each built by
// collapsing the remaining rows and columns into an "other" band.
std::vector<CellResult> cellwise_tests(const ContingencyTable& table,
                                       Correction correction);

// 100 * (O - E) / E per cell.
Matrix pct_diff_matrix(const ContingencyTable& table);

// Family-wise adjustment of a vector of p-values.
std::vector<double> adjust_pvalues(const std::vector<double>& p,
                                   Correction correction);

}  // namespace crosstab
