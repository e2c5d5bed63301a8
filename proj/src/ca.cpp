#include "crosstab/ca.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "crosstab/errors.hpp"
#include "crosstab/svg.hpp"

namespace crosstab {

namespace {

std::string repr(double value) {
  char buffer[32];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

}  // namespace

Matrix standardized_residuals(const ContingencyTable& table) {
  const Matrix expected = expected_matrix(table);
  const Matrix observed = table.counts().cast<double>();
  const double n = static_cast<double>(table.total());
  return (observed - expected).cwiseQuotient((n * expected).cwiseSqrt());
}

CaSolution fit_ca(const ContingencyTable& table, Index ndim) {
  const Index k_full = std::min(table.rows(), table.cols()) - 1;
  if (ndim < 1) raise(errc::invalid_domain, "ndim must be at least 1");
  if (ndim > k_full)
    raise(errc::too_many_dimensions,
          "table supports at most " + std::to_string(k_full) + " dimensions");

  const Matrix residuals = standardized_residuals(table);
  const SvdResult decomposition = svd(residuals);

  CaSolution solution;
  solution.row_labels = table.row_labels();
  solution.col_labels = table.col_labels();
  solution.ndim = ndim;

  solution.singular_values = decomposition.singular_values.head(k_full);
  const double largest = solution.singular_values.size() > 0
                             ? solution.singular_values(0)
                             : 0.0;
  for (Index d = 0; d < k_full; ++d)
    if (solution.singular_values(d) < 1e-12 * largest)
      solution.singular_values(d) = 0.0;

  const double inertia = solution.singular_values.squaredNorm();
  solution.zero_inertia = inertia == 0.0;
  solution.variance_explained = Vector::Zero(k_full);
  if (!solution.zero_inertia)
    solution.variance_explained =
        solution.singular_values.array().square() / inertia;

  const double n = static_cast<double>(table.total());
  const Vector row_probs = table.row_margins().cast<double>() / n;
  const Vector col_probs = table.col_margins().cast<double>() / n;

  solution.row_coords = Matrix::Zero(table.rows(), ndim);
  solution.col_coords = Matrix::Zero(table.cols(), ndim);
  for (Index d = 0; d < ndim; ++d) {
    const double sigma = solution.singular_values(d);
    solution.row_coords.col(d) =
        decomposition.left_vectors.col(d).cwiseQuotient(
            row_probs.cwiseSqrt()) *
        sigma;
    solution.col_coords.col(d) =
        decomposition.right_vectors.col(d).cwiseQuotient(
            col_probs.cwiseSqrt()) *
        sigma;
  }
  return solution;
}

std::string coords_csv(const CaSolution& solution) {
  std::string out = "label,kind";
  for (Index d = 0; d < solution.ndim; ++d)
    out += ",axis" + std::to_string(d + 1);
  out += "\n";

  auto emit = [&](const std::vector<std::string>& labels, const Matrix& coords,
                  const char* kind) {
    for (Index i = 0; i < coords.rows(); ++i) {
      std::string label = labels[static_cast<std::size_t>(i)];
      if (label.find_first_of(",\"\n") != std::string::npos) {
        std::string quoted = "\"";
        for (char ch : label) {
          quoted += ch;
          if (ch == '"') quoted += '"';
        }
        quoted += '"';
        label = quoted;
      }
      out += label;
      out += ',';
      out += kind;
      for (Index d = 0; d < coords.cols(); ++d)
        out += "," + repr(coords(i, d));
      out += '\n';
    }
  };
  emit(solution.row_labels, solution.row_coords, "row");
  emit(solution.col_labels, solution.col_coords, "col");
  return out;
}

std::string biplot_svg(const CaSolution& solution, Index d1,
                       std::optional<Index> d2) {
  if (d1 < 0 || d1 >= solution.ndim)
    raise(errc::dimension_unavailable,
          "dimension " + std::to_string(d1 + 1) + " is not in the solution");
  if (d2 && (*d2 < 0 || *d2 >= solution.ndim))
    raise(errc::dimension_unavailable,
          "dimension " + std::to_string(*d2 + 1) + " is not in the solution");

  const double width = 640, height = 520, margin = 60;

  auto coord = [&](const Matrix& coords, Index i, Index axis) {
    return coords(i, axis);
  };

  double max_abs = 0.0;
  auto scan = [&](const Matrix& coords) {
    for (Index i = 0; i < coords.rows(); ++i) {
      max_abs = std::max(max_abs, std::abs(coord(coords, i, d1)));
      if (d2) max_abs = std::max(max_abs, std::abs(coord(coords, i, *d2)));
    }
  };
  scan(solution.row_coords);
  scan(solution.col_coords);
  if (max_abs == 0.0) max_abs = 1.0;

  const double half_w = (width - 2 * margin) / 2;
  const double half_h = (height - 2 * margin) / 2;
  const double scale = std::min(half_w, half_h) / max_abs;
  const double cx = width / 2, cy = height / 2;

  auto px = [&](double x) { return cx + x * scale; };
  auto py = [&](double y) { return cy - y * scale; };

  svg::Document doc(width, height);
  doc.line(margin, cy, width - margin, cy, "stroke=\"#cccccc\"");
  doc.line(cx, margin, cx, height - margin, "stroke=\"#cccccc\"");

  auto pct = [&](Index axis) {
    return svg::fmt(100.0 * solution.variance_explained(axis), 1);
  };
  doc.text(width / 2, height - margin / 3,
           "dim " + std::to_string(d1 + 1) + " (" + pct(d1) + "%)",
           "text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\"");
  if (d2) {
    doc.raw("<text x=\"" + svg::fmt(margin / 3) + "\" y=\"" +
            svg::fmt(height / 2) +
            "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
            "font-size=\"13\" transform=\"rotate(-90 " + svg::fmt(margin / 3) +
            " " + svg::fmt(height / 2) + ")\">dim " + std::to_string(*d2 + 1) +
            " (" + pct(*d2) + "%)</text>\n");
  }

  for (Index i = 0; i < solution.row_coords.rows(); ++i) {
    const double x = px(coord(solution.row_coords, i, d1));
    const double y = py(d2 ? coord(solution.row_coords, i, *d2) : 0.0);
    doc.circle(x, y, 4, "fill=\"#1f6fb5\" class=\"row-point\"");
    doc.text(x + 6, y - 5,
             solution.row_labels[static_cast<std::size_t>(i)],
             "font-family=\"sans-serif\" font-size=\"11\" fill=\"#1f6fb5\"");
  }
  for (Index j = 0; j < solution.col_coords.rows(); ++j) {
    const double x = px(coord(solution.col_coords, j, d1));
    const double y = py(d2 ? coord(solution.col_coords, j, *d2) : 0.0);
    doc.rect(x - 4, y - 4, 8, 8, "fill=\"#c23b22\" class=\"col-point\"");
    doc.text(x + 6, y + 12,
             solution.col_labels[static_cast<std::size_t>(j)],
             "font-family=\"sans-serif\" font-size=\"11\" fill=\"#c23b22\"");
  }
  return doc.str();
}

}  // namespace crosstab
