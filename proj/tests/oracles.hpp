#pragma once

// Reference implementations used only by tests. Everything here is written
// against the definitions directly (series expansions, pair enumeration,
// brute-force recurrences) so library results are checked by an independent
// route, not by re-running library code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "crosstab/table.hpp"

namespace oracle {

// Regularized lower incomplete gamma via the positive-term power series
//   P(s,x) = x^s e^{-x} / Gamma(s) * sum_n x^n / (s (s+1) ... (s+n)),
// evaluated in long double. No cancellation: usable for any moderate x.
inline long double gamma_p_series(long double s, long double x) {
  if (x <= 0.0L) return 0.0L;
  long double term = 1.0L / s;
  long double sum = term;
  for (int n = 1; n < 100000; ++n) {
    term *= x / (s + static_cast<long double>(n));
    sum += term;
    if (term < sum * 1e-22L) break;
  }
  return std::exp(s * std::log(x) - x - std::lgamma(s)) * sum;
}

// Upper tail via the Legendre continued fraction (modified Lentz).
inline long double gamma_q_cf(long double s, long double x) {
  const long double tiny = 1e-300L;
  long double b = x + 1.0L - s;
  long double c = 1.0L / tiny;
  long double d = 1.0L / b;
  long double h = d;
  for (int i = 1; i < 100000; ++i) {
    const long double an = -static_cast<long double>(i) *
                           (static_cast<long double>(i) - s);
    b += 2.0L;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0L / d;
    const long double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0L) < 1e-22L) break;
  }
  return std::exp(s * std::log(x) - x - std::lgamma(s)) * h;
}

inline long double chi2_sf(long double x, long double df) {
  if (x <= 0.0L) return 1.0L;
  const long double s = df / 2.0L, half = x / 2.0L;
  if (half < s + 1.0L) return 1.0L - gamma_p_series(s, half);
  return gamma_q_cf(s, half);
}

inline long double chi2_cdf(long double x, long double df) {
  if (x <= 0.0L) return 0.0L;
  const long double s = df / 2.0L, half = x / 2.0L;
  if (half < s + 1.0L) return gamma_p_series(s, half);
  return 1.0L - gamma_q_cf(s, half);
}

// Direct textbook statistic: sum (O-E)^2 / E with E = R*C/N.
inline double chi2_statistic(const crosstab::IntMatrix& counts) {
  const crosstab::Index r = counts.rows(), c = counts.cols();
  std::vector<double> row(r, 0.0), col(c, 0.0);
  double n = 0.0;
  for (crosstab::Index i = 0; i < r; ++i)
    for (crosstab::Index j = 0; j < c; ++j) {
      row[static_cast<std::size_t>(i)] += static_cast<double>(counts(i, j));
      col[static_cast<std::size_t>(j)] += static_cast<double>(counts(i, j));
      n += static_cast<double>(counts(i, j));
    }
  double stat = 0.0;
  for (crosstab::Index i = 0; i < r; ++i)
    for (crosstab::Index j = 0; j < c; ++j) {
      const double e = row[static_cast<std::size_t>(i)] *
                       col[static_cast<std::size_t>(j)] / n;
      const double d = static_cast<double>(counts(i, j)) - e;
      stat += d * d / e;
    }
  return stat;
}

// Two-sided Fisher p for a 2x2 table by full enumeration of the
// hypergeometric pmf, built with a multiplicative recurrence in long double:
//   P(k+1)/P(k) = (r1-k)(c1-k) / ((k+1)(n-r1-c1+k+1)).
inline long double fisher_two_sided(std::int64_t a, std::int64_t b,
                                    std::int64_t c, std::int64_t d) {
  const std::int64_t r1 = a + b, r2 = c + d, c1 = a + c, n = a + b + c + d;
  const std::int64_t lo = std::max<std::int64_t>(0, c1 - r2);
  const std::int64_t hi = std::min(r1, c1);

  std::vector<long double> pmf;
  pmf.reserve(static_cast<std::size_t>(hi - lo + 1));
  long double p = 1.0L;  // unnormalized start; normalized below
  pmf.push_back(p);
  for (std::int64_t k = lo; k < hi; ++k) {
    p *= static_cast<long double>(r1 - k) * static_cast<long double>(c1 - k) /
         (static_cast<long double>(k + 1) *
          static_cast<long double>(r2 - c1 + k + 1));
    pmf.push_back(p);
  }
  long double total = 0.0L;
  for (long double v : pmf) total += v;
  for (long double& v : pmf) v /= total;

  const long double observed = pmf[static_cast<std::size_t>(a - lo)];
  long double sum = 0.0L;
  for (long double v : pmf)
    if (v <= observed * (1.0L + 1e-7L)) sum += v;
  return std::min(sum, 1.0L);
}

// Uniform draws for test-side simulation, independent of library RNG code.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double normal(std::mt19937_64& rng) {
  double u = uniform01(rng);
  while (u == 0.0) u = uniform01(rng);
  const double v = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u)) *
         std::cos(2.0 * 3.14159265358979323846 * v);
}

// P(X > critical) for X noncentral chi-squared(df, lambda), by simulation:
// X = (Z_1 + sqrt(lambda))^2 + sum_{i=2..df} Z_i^2.
inline double noncentral_exceed_mc(double critical, int df, double lambda,
                                   std::int64_t draws, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double shift = std::sqrt(lambda);
  std::int64_t hits = 0;
  for (std::int64_t t = 0; t < draws; ++t) {
    double x = 0.0;
    const double first = normal(rng) + shift;
    x += first * first;
    for (int i = 1; i < df; ++i) {
      const double z = normal(rng);
      x += z * z;
    }
    if (x > critical) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(draws);
}

// Squared chi-squared distance between row profiles i and i':
//   sum_j (p_ij/r_i - p_i'j/r_i')^2 / c_j.
inline double row_chi_distance_sq(const crosstab::IntMatrix& counts,
                                  crosstab::Index i1, crosstab::Index i2) {
  const crosstab::Index c = counts.cols();
  const double n = static_cast<double>(counts.sum());
  std::vector<double> col(static_cast<std::size_t>(c), 0.0);
  for (crosstab::Index i = 0; i < counts.rows(); ++i)
    for (crosstab::Index j = 0; j < c; ++j)
      col[static_cast<std::size_t>(j)] += static_cast<double>(counts(i, j));
  const double r1 = static_cast<double>(counts.row(i1).sum());
  const double r2 = static_cast<double>(counts.row(i2).sum());
  double dist = 0.0;
  for (crosstab::Index j = 0; j < c; ++j) {
    const double p1 = static_cast<double>(counts(i1, j)) / r1;
    const double p2 = static_cast<double>(counts(i2, j)) / r2;
    const double cj = col[static_cast<std::size_t>(j)] / n;
    dist += (p1 - p2) * (p1 - p2) / cj;
  }
  return dist;
}

// Krippendorff alpha (nominal) by direct enumeration of ordered value pairs,
// with no coincidence-matrix shortcut. grid[u][c]: empty optional = missing.
inline std::optional<double> alpha_pair_enumeration(
    const std::vector<std::vector<std::optional<std::string>>>& grid) {
  std::vector<std::vector<std::string>> units;
  for (const auto& row : grid) {
    std::vector<std::string> present;
    for (const auto& cell : row)
      if (cell) present.push_back(*cell);
    if (present.size() >= 2) units.push_back(std::move(present));
  }
  if (units.empty()) return std::nullopt;

  double n = 0.0;
  for (const auto& unit : units) n += static_cast<double>(unit.size());

  double d_o = 0.0;
  for (const auto& unit : units) {
    const double weight = 1.0 / static_cast<double>(unit.size() - 1);
    for (std::size_t i = 0; i < unit.size(); ++i)
      for (std::size_t j = 0; j < unit.size(); ++j)
        if (i != j && unit[i] != unit[j]) d_o += weight;
  }
  d_o /= n;

  std::vector<std::string> pooled;
  for (const auto& unit : units)
    pooled.insert(pooled.end(), unit.begin(), unit.end());
  double disagreements = 0.0;
  for (std::size_t i = 0; i < pooled.size(); ++i)
    for (std::size_t j = 0; j < pooled.size(); ++j)
      if (i != j && pooled[i] != pooled[j]) disagreements += 1.0;
  const double d_e = disagreements / (n * (n - 1.0));

  if (d_e == 0.0) return d_o == 0.0 ? std::optional<double>(1.0) : std::nullopt;
  return 1.0 - d_o / d_e;
}

// Random contingency table with no zero margins.
inline crosstab::IntMatrix random_table(std::mt19937_64& rng,
                                        crosstab::Index max_r,
                                        crosstab::Index max_c,
                                        std::int64_t max_cell) {
  auto bounded = [&](std::int64_t upper) {  // uniform in [0, upper)
    return static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(upper));
  };
  for (;;) {
    const crosstab::Index r = 2 + static_cast<crosstab::Index>(bounded(max_r - 1));
    const crosstab::Index c = 2 + static_cast<crosstab::Index>(bounded(max_c - 1));
    crosstab::IntMatrix counts(r, c);
    for (crosstab::Index i = 0; i < r; ++i)
      for (crosstab::Index j = 0; j < c; ++j)
        counts(i, j) = bounded(max_cell + 1);
    bool ok = counts.sum() > 0;
    for (crosstab::Index i = 0; i < r && ok; ++i)
      if (counts.row(i).sum() == 0) ok = false;
    for (crosstab::Index j = 0; j < c && ok; ++j)
      if (counts.col(j).sum() == 0) ok = false;
    if (ok) return counts;
  }
}

inline std::vector<std::string> index_labels(const char* prefix,
                                             crosstab::Index count) {
  std::vector<std::string> labels;
  for (crosstab::Index i = 0; i < count; ++i)
    labels.push_back(std::string(prefix) + std::to_string(i + 1));
  return labels;
}

inline crosstab::ContingencyTable make_table(const crosstab::IntMatrix& counts) {
  return crosstab::ContingencyTable::build(
      index_labels("r", counts.rows()), index_labels("c", counts.cols()),
      counts);
}

}  // namespace oracle
