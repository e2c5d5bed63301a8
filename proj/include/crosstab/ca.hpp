#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crosstab/table.hpp"

namespace crosstab {

// s_ij = (O_ij - E_ij) / sqrt(N * E_ij). Squared entries sum to chi2/N.
Matrix standardized_residuals(const ContingencyTable& table);

struct CaSolution {
  // Full spectrum over k = min(r,c)-1 dimensions, nonincreasing; values
  // below 1e-12 of the largest are snapped to zero.
  Vector singular_values;
  Vector variance_explained;
  // Principal coordinates restricted to the first ndim dimensions.
  Matrix row_coords;
  Matrix col_coords;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  Index ndim = 0;

  // True when the table is exactly independent: all residuals vanish and
  // variance fractions are reported as zeros.
  bool zero_inertia = false;
};

CaSolution fit_ca(const ContingencyTable& table, Index ndim);

// One labeled point per row and column category: label,kind,axis1,...
std::string coords_csv(const CaSolution& solution);

// Scatter of row and column points on dimensions d1 (and d2 when the
// solution has more than one); axis titles carry percent variance. Dims are
// zero-based here.
std::string biplot_svg(const CaSolution& solution, Index d1,
                       std::optional<Index> d2);

}  // namespace crosstab
