#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crosstab/numerics.hpp"

namespace crosstab {

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IntVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;
using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Validated, immutable r x c table of nonnegative integer counts with
// distinct labels per axis and precomputed margins.
class ContingencyTable {
 public:
  static ContingencyTable build(std::vector<std::string> row_labels,
                                std::vector<std::string> col_labels,
                                IntMatrix counts,
                                std::optional<std::string> split_label = {});

  Index rows() const { return counts_.rows(); }
  Index cols() const { return counts_.cols(); }
  const std::vector<std::string>& row_labels() const { return row_labels_; }
  const std::vector<std::string>& col_labels() const { return col_labels_; }
  const IntMatrix& counts() const { return counts_; }
  const std::optional<std::string>& split_label() const { return split_label_; }

  const IntVector& row_margins() const { return row_margins_; }
  const IntVector& col_margins() const { return col_margins_; }
  std::int64_t row_margin(Index i) const;
  std::int64_t col_margin(Index j) const;
  std::int64_t total() const { return total_; }

 private:
  ContingencyTable() = default;

  std::vector<std::string> row_labels_;
  std::vector<std::string> col_labels_;
  IntMatrix counts_;
  std::optional<std::string> split_label_;
  IntVector row_margins_;
  IntVector col_margins_;
  std::int64_t total_ = 0;
};

// E_ij = R_i * C_j / N. Raises ZeroMargin naming the offending label.
Matrix expected_matrix(const ContingencyTable& table);

bool has_zero_margin(const ContingencyTable& table);

// Drops all-zero rows and columns; the result keeps the split label.
ContingencyTable prune_empty(const ContingencyTable& table);

// 2x2 view of cell (i, j) against the rest of the table:
// [[O_ij, R_i - O_ij], [C_j - O_ij, N - R_i - C_j + O_ij]].
ContingencyTable collapse_cell(const ContingencyTable& table, Index i, Index j);

struct CriteriaReport {
  double prop_standard = 0.0;  // fraction of cells with E >= 5
  double prop_haber = 0.0;     // fraction with E >= max{5, N/10}
  double prop_andres = 0.0;    // fraction with E > 3.9 (N <= 500) or E > 6.2
  BoolMatrix standard_flags;
  BoolMatrix haber_flags;
  BoolMatrix andres_flags;
};

CriteriaReport criteria_report(const ContingencyTable& table);

}  // namespace crosstab
