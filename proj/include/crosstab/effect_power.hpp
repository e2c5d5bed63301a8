#pragma once

#include <optional>

#include "crosstab/numerics.hpp"

namespace crosstab {

struct EffectSizes {
  double omega = 0.0;
  double cramers_v = 0.0;
  std::optional<double> phi;  // 2x2 only
};

// omega = sqrt(chi2/n), V = sqrt(chi2/(n*min{r-1,c-1})), phi for 2x2.
EffectSizes effect_sizes(double chi2, double n, Index r, Index c);

// Qualitative benchmark for omega: negligible / small / medium / large at
// cutoffs 0.1, 0.3, 0.5. Applies to omega only; V benchmarks shift with
// table size.
const char* omega_label(double omega);

struct PowerQuery {
  double omega = 0.0;
  double n = 0.0;
  int df = 1;
  double alpha = 0.05;
};

// Power of the chi-squared association test: 1 - F_nc(x*; df, n*omega^2)
// where x* is the central critical value at alpha.
double chi2_power(const PowerQuery& query);

// Smallest real n reaching target_power, bisected to within 0.01.
double required_n(double omega, int df, double alpha, double target_power);

}  // namespace crosstab
