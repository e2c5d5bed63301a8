#include "crosstab/effect_power.hpp"

#include <algorithm>
#include <cmath>

#include "crosstab/errors.hpp"

namespace crosstab {

EffectSizes effect_sizes(double chi2, double n, Index r, Index c) {
  if (!std::isfinite(chi2) || chi2 < 0)
    raise(errc::invalid_domain, "chi2 must be finite and nonnegative");
  if (!std::isfinite(n) || n < 1)
    raise(errc::invalid_domain, "n must be at least 1");
  if (r < 2 || c < 2)
    raise(errc::invalid_domain, "table dimensions must be at least 2x2");

  EffectSizes sizes;
  sizes.omega = std::sqrt(chi2 / n);
  const double k = static_cast<double>(std::min(r - 1, c - 1));
  sizes.cramers_v = std::sqrt(chi2 / (n * k));
  if (r == 2 && c == 2) sizes.phi = sizes.omega;
  return sizes;
}

const char* omega_label(double omega) {
  if (omega >= 0.5) return "large";
  if (omega >= 0.3) return "medium";
  if (omega >= 0.1) return "small";
  return "negligible";
}

namespace {

void check_power_domain(double omega, double n, int df, double alpha) {
  if (!std::isfinite(omega) || omega < 0)
    raise(errc::invalid_domain, "omega must be finite and nonnegative");
  if (!std::isfinite(n) || n <= 0)
    raise(errc::invalid_domain, "n must be positive");
  if (df < 1) raise(errc::invalid_domain, "df must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0))
    raise(errc::invalid_domain, "alpha must lie in (0, 1)");
}

}  // namespace

double chi2_power(const PowerQuery& query) {
  check_power_domain(query.omega, query.n, query.df, query.alpha);
  if (query.omega == 0.0) return query.alpha;

  const double critical = chi2_critical(query.alpha, query.df);
  const double lambda = query.n * query.omega * query.omega;
  return 1.0 - noncentral_chi2_cdf(critical, query.df, lambda);
}

double required_n(double omega, int df, double alpha, double target_power) {
  check_power_domain(omega, 1.0, df, alpha);
  if (omega == 0.0)
    raise(errc::invalid_domain, "omega must be positive to solve for n");
  if (!(target_power > 0.0 && target_power < 1.0))
    raise(errc::invalid_domain, "target power must lie in (0, 1)");
  if (target_power <= alpha)
    raise(errc::unachievable,
          "target power must exceed alpha; any n achieves it trivially");

  auto power_at = [&](double n) {
    return chi2_power({omega, n, df, alpha});
  };

  double lo = 0.0;
  double hi = 1.0;
  while (power_at(hi) < target_power) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12)
      raise(errc::unachievable, "no finite n reaches the requested power");
  }
  while (hi - lo > 0.01) {
    const double mid = 0.5 * (lo + hi);
    if (power_at(mid) >= target_power)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace crosstab
