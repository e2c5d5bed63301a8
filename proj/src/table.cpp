#include "crosstab/table.hpp"

#include <unordered_set>
#include <utility>

#include "crosstab/errors.hpp"

namespace crosstab {

namespace {

void check_unique(const std::vector<std::string>& labels, const char* axis) {
  std::unordered_set<std::string> seen;
  for (const auto& label : labels) {
    if (!seen.insert(label).second)
      raise(errc::duplicate_label,
            std::string("duplicate ") + axis + " label: " + label);
  }
}

}  // namespace

ContingencyTable ContingencyTable::build(std::vector<std::string> row_labels,
                                         std::vector<std::string> col_labels,
                                         IntMatrix counts,
                                         std::optional<std::string> split_label) {
  if (counts.rows() != static_cast<Index>(row_labels.size()) ||
      counts.cols() != static_cast<Index>(col_labels.size()))
    raise(errc::dimension_mismatch,
          "counts shape does not match label counts");
  if (counts.rows() < 2 || counts.cols() < 2)
    raise(errc::invalid_domain, "table needs at least 2 rows and 2 columns");
  check_unique(row_labels, "row");
  check_unique(col_labels, "column");

  for (Index i = 0; i < counts.rows(); ++i)
    for (Index j = 0; j < counts.cols(); ++j)
      if (counts(i, j) < 0)
        raise(errc::negative_count,
              "negative count at (" + row_labels[static_cast<std::size_t>(i)] +
                  ", " + col_labels[static_cast<std::size_t>(j)] + ")");

  ContingencyTable table;
  table.row_margins_ = counts.rowwise().sum();
  table.col_margins_ = counts.colwise().sum().transpose();
  table.total_ = table.row_margins_.sum();
  if (table.total_ == 0) raise(errc::empty_table, "all counts are zero");

  table.row_labels_ = std::move(row_labels);
  table.col_labels_ = std::move(col_labels);
  table.counts_ = std::move(counts);
  table.split_label_ = std::move(split_label);
  return table;
}

std::int64_t ContingencyTable::row_margin(Index i) const {
  if (i < 0 || i >= rows())
    raise(errc::index_out_of_range, "row index out of range");
  return row_margins_(i);
}

std::int64_t ContingencyTable::col_margin(Index j) const {
  if (j < 0 || j >= cols())
    raise(errc::index_out_of_range, "column index out of range");
  return col_margins_(j);
}

Matrix expected_matrix(const ContingencyTable& table) {
  for (Index i = 0; i < table.rows(); ++i)
    if (table.row_margins()(i) == 0)
      raise(errc::zero_margin,
            "row margin is zero: " +
                table.row_labels()[static_cast<std::size_t>(i)]);
  for (Index j = 0; j < table.cols(); ++j)
    if (table.col_margins()(j) == 0)
      raise(errc::zero_margin,
            "column margin is zero: " +
                table.col_labels()[static_cast<std::size_t>(j)]);

  const double n = static_cast<double>(table.total());
  Vector r = table.row_margins().cast<double>();
  Vector c = table.col_margins().cast<double>();
  return (r * c.transpose()) / n;
}

bool has_zero_margin(const ContingencyTable& table) {
  return (table.row_margins().array() == 0).any() ||
         (table.col_margins().array() == 0).any();
}

ContingencyTable prune_empty(const ContingencyTable& table) {
  std::vector<Index> keep_rows, keep_cols;
  for (Index i = 0; i < table.rows(); ++i)
    if (table.row_margins()(i) > 0) keep_rows.push_back(i);
  for (Index j = 0; j < table.cols(); ++j)
    if (table.col_margins()(j) > 0) keep_cols.push_back(j);

  std::vector<std::string> row_labels, col_labels;
  for (Index i : keep_rows)
    row_labels.push_back(table.row_labels()[static_cast<std::size_t>(i)]);
  for (Index j : keep_cols)
    col_labels.push_back(table.col_labels()[static_cast<std::size_t>(j)]);

  IntMatrix counts(static_cast<Index>(keep_rows.size()),
                   static_cast<Index>(keep_cols.size()));
  for (std::size_t a = 0; a < keep_rows.size(); ++a)
    for (std::size_t b = 0; b < keep_cols.size(); ++b)
      counts(static_cast<Index>(a), static_cast<Index>(b)) =
          table.counts()(keep_rows[a], keep_cols[b]);

  return ContingencyTable::build(std::move(row_labels), std::move(col_labels),
                                 std::move(counts), table.split_label());
}

ContingencyTable collapse_cell(const ContingencyTable& table, Index i, Index j) {
  if (i < 0 || i >= table.rows() || j < 0 || j >= table.cols())
    raise(errc::index_out_of_range, "cell index out of range");

  const std::int64_t o = table.counts()(i, j);
  const std::int64_t ri = table.row_margins()(i);
  const std::int64_t cj = table.col_margins()(j);
  const std::int64_t n = table.total();

  IntMatrix counts(2, 2);
  counts << o, ri - o, cj - o, n - ri - cj + o;

  const std::string& row = table.row_labels()[static_cast<std::size_t>(i)];
  const std::string& col = table.col_labels()[static_cast<std::size_t>(j)];
  return ContingencyTable::build({row, "other:" + row}, {col, "other:" + col},
                                 std::move(counts), table.split_label());
}

CriteriaReport criteria_report(const ContingencyTable& table) {
  const Matrix expected = expected_matrix(table);
  const double n = static_cast<double>(table.total());
  const double haber_threshold = std::max(5.0, n / 10.0);
  const double andres_threshold = n <= 500 ? 3.9 : 6.2;

  CriteriaReport report;
  report.standard_flags = expected.array() >= 5.0;
  report.haber_flags = expected.array() >= haber_threshold;
  report.andres_flags = expected.array() > andres_threshold;

  const double cells = static_cast<double>(expected.size());
  report.prop_standard = report.standard_flags.cast<double>().sum() / cells;
  report.prop_haber = report.haber_flags.cast<double>().sum() / cells;
  report.prop_andres = report.andres_flags.cast<double>().sum() / cells;
  return report;
}

}  // namespace crosstab
