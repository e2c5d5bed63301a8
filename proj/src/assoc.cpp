#include "crosstab/assoc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crosstab/errors.hpp"
#include "crosstab/random.hpp"

namespace crosstab {

namespace {

double chi2_statistic(const IntMatrix& counts, const Matrix& expected,
                      bool yates) {
  double stat = 0.0;
  for (Index i = 0; i < counts.rows(); ++i) {
    for (Index j = 0; j < counts.cols(); ++j) {
      double diff = std::abs(static_cast<double>(counts(i, j)) - expected(i, j));
      if (yates) diff = std::max(diff - 0.5, 0.0);
      stat += diff * diff / expected(i, j);
    }
  }
  return stat;
}

}  // namespace

OmnibusResult chi_squared_test(const ContingencyTable& table, bool yates) {
  if (yates && (table.rows() != 2 || table.cols() != 2))
    raise(errc::yates_on_non_2x2,
          "continuity correction is defined for 2x2 tables only");

  const Matrix expected = expected_matrix(table);
  OmnibusResult result;
  result.chi2 = chi2_statistic(table.counts(), expected, yates);
  result.df = static_cast<int>((table.rows() - 1) * (table.cols() - 1));
  result.p_chi2 = chi2_sf(result.chi2, result.df);
  result.yates = yates;
  return result;
}

double fisher_exact_2x2(const ContingencyTable& table) {
  if (table.rows() != 2 || table.cols() != 2)
    raise(errc::not_two_by_two, "exact test requires a 2x2 table");
  if (has_zero_margin(table))
    raise(errc::zero_margin, "exact test requires positive margins");

  const std::int64_t r1 = table.row_margins()(0);
  const std::int64_t r2 = table.row_margins()(1);
  const std::int64_t c1 = table.col_margins()(0);
  const std::int64_t n = table.total();

  auto log_prob = [&](std::int64_t k) {
    return log_choose(r1, k) + log_choose(r2, c1 - k) - log_choose(n, c1);
  };

  const double logp_obs = log_prob(table.counts()(0, 0));
  const double threshold = logp_obs + std::log1p(1e-7);

  const std::int64_t k_lo = std::max<std::int64_t>(0, c1 - r2);
  const std::int64_t k_hi = std::min(r1, c1);
  double p = 0.0;
  for (std::int64_t k = k_lo; k <= k_hi; ++k) {
    const double lp = log_prob(k);
    if (lp <= threshold) p += std::exp(lp);
  }
  return std::min(p, 1.0);
}

McEstimate fisher_exact_montecarlo(const ContingencyTable& table,
                                   std::int64_t replicates,
                                   std::uint64_t seed) {
  if (replicates < 1000)
    raise(errc::too_few_replicates, "need at least 1000 replicates");
  if (has_zero_margin(table))
    raise(errc::zero_margin, "Monte Carlo test requires positive margins");

  const Index r = table.rows();
  const Index c = table.cols();
  const std::int64_t n = table.total();

  std::vector<double> lf(static_cast<std::size_t>(n) + 1);
  for (std::int64_t v = 0; v <= n; ++v)
    lf[static_cast<std::size_t>(v)] = log_factorial(v);

  // Only the cell term of the point log-probability varies across tables
  // with fixed margins, so compare sums of log-factorials of the cells.
  double cell_lf_obs = 0.0;
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j)
      cell_lf_obs += lf[static_cast<std::size_t>(table.counts()(i, j))];
  const double keep_threshold = cell_lf_obs - 1e-7;

  std::vector<std::int32_t> row_of;
  row_of.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < r; ++i)
    row_of.insert(row_of.end(),
                  static_cast<std::size_t>(table.row_margins()(i)),
                  static_cast<std::int32_t>(i));
  std::vector<std::int32_t> col_of;
  col_of.reserve(static_cast<std::size_t>(n));
  for (Index j = 0; j < c; ++j)
    col_of.insert(col_of.end(),
                  static_cast<std::size_t>(table.col_margins()(j)),
                  static_cast<std::int32_t>(j));

  const std::int64_t hits = chunked_count(
      replicates, seed,
      [&](std::mt19937_64& rng, std::int64_t len) {
        std::vector<std::int32_t> rows = row_of;
        std::vector<std::int64_t> cells(static_cast<std::size_t>(r * c));
        std::int64_t local = 0;
        for (std::int64_t rep = 0; rep < len; ++rep) {
          shuffle_inplace(rows, rng);
          std::fill(cells.begin(), cells.end(), 0);
          for (std::size_t t = 0; t < rows.size(); ++t)
            ++cells[static_cast<std::size_t>(rows[t]) *
                        static_cast<std::size_t>(c) +
                    static_cast<std::size_t>(col_of[t])];
          double cell_lf = 0.0;
          for (std::int64_t count : cells)
            cell_lf += lf[static_cast<std::size_t>(count)];
          if (cell_lf >= keep_threshold) ++local;
        }
        return local;
      });

  McEstimate estimate;
  estimate.p = static_cast<double>(hits + 1) / static_cast<double>(replicates + 1);
  estimate.se = std::sqrt(estimate.p * (1.0 - estimate.p) /
                          static_cast<double>(replicates));
  return estimate;
}

std::vector<CellResult> cellwise_tests(const ContingencyTable& table,
                                       Correction correction) {
  const Matrix expected = expected_matrix(table);
  const double n = static_cast<double>(table.total());

  std::vector<CellResult> results;
  results.reserve(static_cast<std::size_t>(table.rows() * table.cols()));
  std::vector<double> raw_p;

  for (Index i = 0; i < table.rows(); ++i) {
    for (Index j = 0; j < table.cols(); ++j) {
      const ContingencyTable collapsed = collapse_cell(table, i, j);
      CellResult cell;
      cell.row = i;
      cell.col = j;
      if (has_zero_margin(collapsed)) {
        // A cell equal to its full row or column leaves an empty "other"
        // band; the omnibus preconditions forbid zero margins upstream, and
        // the collapse inherits that guarantee, so this is unreachable for
        // valid input.
        raise(errc::zero_margin, "collapsed table has a zero margin");
      }
      const OmnibusResult omnibus = chi_squared_test(collapsed, true);
      cell.chi2_yates = omnibus.chi2;
      cell.p = omnibus.p_chi2;
      cell.phi = std::sqrt(omnibus.chi2 / n);
      const double o = static_cast<double>(table.counts()(i, j));
      const double e = expected(i, j);
      cell.direction = o > e ? '+' : (o < e ? '-' : '0');
      const CriteriaReport criteria = criteria_report(collapsed);
      cell.meets_standard = criteria.prop_standard == 1.0;
      cell.meets_haber = criteria.prop_haber == 1.0;
      cell.meets_andres = criteria.prop_andres == 1.0;
      raw_p.push_back(cell.p);
      results.push_back(std::move(cell));
    }
  }

  if (correction != Correction::none) {
    const std::vector<double> adjusted = adjust_pvalues(raw_p, correction);
    for (std::size_t k = 0; k < results.size(); ++k)
      results[k].p_adjusted = adjusted[k];
  }
  return results;
}

Matrix pct_diff_matrix(const ContingencyTable& table) {
  const Matrix expected = expected_matrix(table);
  const Matrix observed = table.counts().cast<double>();
  return 100.0 * (observed - expected).cwiseQuotient(expected);
}

std::vector<double> adjust_pvalues(const std::vector<double>& p,
                                   Correction correction) {
  const std::size_t k = p.size();
  if (correction == Correction::none || k == 0) return p;

  std::vector<double> adjusted(k);
  if (correction == Correction::bonferroni) {
    for (std::size_t i = 0; i < k; ++i)
      adjusted[i] = std::min(1.0, static_cast<double>(k) * p[i]);
    return adjusted;
  }

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  double running_max = 0.0;
  for (std::size_t rank = 0; rank < k; ++rank) {
    const double scaled = static_cast<double>(k - rank) * p[order[rank]];
    running_max = std::max(running_max, std::min(1.0, scaled));
    adjusted[order[rank]] = running_max;
  }
  return adjusted;
}

}  // namespace crosstab
