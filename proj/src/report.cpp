#include "crosstab/report.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crosstab/ca.hpp"
#include "crosstab/effect_power.hpp"
#include "crosstab/errors.hpp"
#include "crosstab/svg.hpp"

namespace crosstab {

namespace {

const char* correction_name(Correction correction) {
  switch (correction) {
    case Correction::none: return "none";
    case Correction::bonferroni: return "bonferroni";
    case Correction::holm: return "holm";
  }
  return "none";
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json counts_to_json(const IntMatrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

void add_warning(Json& warnings, const char* module,
                 const std::string& message) {
  warnings.push_back({{"module", module}, {"message", message}});
}

}  // namespace

AnalysisResult analyze_table(const ContingencyTable& input,
                             const AnalyzeOptions& options,
                             const std::string& source) {
  Json warnings = Json::array();

  ContingencyTable table = input;
  bool pruned = false;
  if (options.prune_empty && has_zero_margin(table)) {
    std::string dropped;
    for (Index i = 0; i < table.rows(); ++i)
      if (table.row_margins()(i) == 0)
        dropped += " row '" + table.row_labels()[static_cast<std::size_t>(i)] +
                   "'";
    for (Index j = 0; j < table.cols(); ++j)
      if (table.col_margins()(j) == 0)
        dropped += " col '" + table.col_labels()[static_cast<std::size_t>(j)] +
                   "'";
    table = prune_empty(table);
    pruned = true;
    add_warning(warnings, "tabular-core", "dropped empty categories:" + dropped);
  }

  const bool two_by_two = table.rows() == 2 && table.cols() == 2;
  const bool use_yates = options.yates ? *options.yates : two_by_two;

  const OmnibusResult plain = chi_squared_test(table, false);
  std::optional<OmnibusResult> corrected;
  if (use_yates) corrected = chi_squared_test(table, true);

  FisherChoice fisher = options.fisher;
  if (fisher == FisherChoice::automatic)
    fisher = two_by_two ? FisherChoice::exact : FisherChoice::montecarlo;

  Json fisher_json;
  if (fisher == FisherChoice::exact) {
    fisher_json = {{"mode", "exact"}, {"p", fisher_exact_2x2(table)}};
  } else if (fisher == FisherChoice::montecarlo) {
    const McEstimate mc =
        fisher_exact_montecarlo(table, options.replicates, options.seed);
    fisher_json = {{"mode", "montecarlo"},
                   {"p", mc.p},
                   {"replicates", options.replicates},
                   {"se", mc.se}};
  } else {
    fisher_json = {{"mode", "off"}};
  }

  const double n = static_cast<double>(table.total());
  const EffectSizes effect =
      effect_sizes(plain.chi2, n, table.rows(), table.cols());

  Json power_grid = Json::array();
  for (double omega : {0.1, 0.3, 0.5})
    power_grid.push_back(
        {{"omega", omega},
         {"power", chi2_power({omega, n, plain.df, options.alpha})}});

  const CriteriaReport criteria = criteria_report(table);
  if (criteria.prop_standard < 1.0 || criteria.prop_haber < 1.0 ||
      criteria.prop_andres < 1.0) {
    char buffer[160];
    std::snprintf(buffer, sizeof(buffer),
                  "expected-frequency criteria not fully met: standard %.3f, "
                  "haber %.3f, andres %.3f",
                  criteria.prop_standard, criteria.prop_haber,
                  criteria.prop_andres);
    add_warning(warnings, "tabular-core", buffer);
  }

  const std::vector<CellResult> cells =
      cellwise_tests(table, options.correction);
  const Index cell_count = table.rows() * table.cols();
  if (options.correction == Correction::none && cell_count > 1)
    add_warning(warnings, "assoc-tests",
                std::to_string(cell_count) +
                    " cellwise tests reported without multiple-comparisons "
                    "correction; family-wise Type I error is compounded");

  Json cellwise = Json::array();
  for (const CellResult& cell : cells) {
    Json entry = {
        {"row", table.row_labels()[static_cast<std::size_t>(cell.row)]},
        {"col", table.col_labels()[static_cast<std::size_t>(cell.col)]},
        {"chi2_yates", cell.chi2_yates},
        {"p", cell.p},
        {"p_adjusted", cell.p_adjusted ? Json(*cell.p_adjusted) : Json()},
        {"p_fisher", fisher_exact_2x2(collapse_cell(table, cell.row, cell.col))},
        {"phi", cell.phi},
        {"direction", std::string(1, cell.direction)},
        {"meets_standard", cell.meets_standard},
        {"meets_haber", cell.meets_haber},
        {"meets_andres", cell.meets_andres}};
    cellwise.push_back(std::move(entry));
  }

  const Matrix pct = pct_diff_matrix(table);

  const Index k_full = std::min(table.rows(), table.cols()) - 1;
  const Index ndim = std::max<Index>(1, std::min(options.ndim, k_full));
  const CaSolution ca = fit_ca(table, ndim);
  if (ca.zero_inertia)
    add_warning(warnings, "correspondence",
                "table is exactly independent; all inertia is zero and "
                "variance fractions are reported as zeros");
  Json singulars = Json::array();
  Json variance = Json::array();
  for (Index d = 0; d < ca.singular_values.size(); ++d) {
    singulars.push_back(ca.singular_values(d));
    variance.push_back(ca.variance_explained(d));
  }

  Json report;
  report["schema_version"] = 1;
  report["input"] = {
      {"source", source},
      {"split", table.split_label() ? Json(*table.split_label()) : Json()},
      {"rows", table.rows()},
      {"cols", table.cols()},
      {"n", table.total()},
      {"row_labels", table.row_labels()},
      {"col_labels", table.col_labels()},
      {"counts", counts_to_json(table.counts())},
      {"pruned", pruned}};
  report["options"] = {{"alpha", options.alpha},
                       {"yates", use_yates},
                       {"fisher", fisher_json["mode"]},
                       {"replicates", options.replicates},
                       {"seed", options.seed},
                       {"correction", correction_name(options.correction)},
                       {"ndim", ndim}};
  Json omnibus = {{"chi2", plain.chi2},
                  {"df", plain.df},
                  {"p_chi2", plain.p_chi2}};
  omnibus["yates"] = corrected ? Json({{"chi2", corrected->chi2},
                                       {"p", corrected->p_chi2}})
                               : Json();
  omnibus["fisher"] = fisher_json;
  report["omnibus"] = std::move(omnibus);
  report["effect"] = {{"omega", effect.omega},
                      {"omega_label", omega_label(effect.omega)},
                      {"cramers_v", effect.cramers_v},
                      {"phi", effect.phi ? Json(*effect.phi) : Json()}};
  report["power"] = {{"alpha", options.alpha},
                     {"df", plain.df},
                     {"n", table.total()},
                     {"grid", std::move(power_grid)}};
  report["criteria"] = {{"prop_standard", criteria.prop_standard},
                        {"prop_haber", criteria.prop_haber},
                        {"prop_andres", criteria.prop_andres}};
  report["cellwise"] = std::move(cellwise);
  report["pct_diff"] = matrix_to_json(pct);
  report["ca"] = {{"ndim", ndim},
                  {"singular_values", std::move(singulars)},
                  {"variance_explained", std::move(variance)},
                  {"zero_inertia", ca.zero_inertia}};
  report["warnings"] = std::move(warnings);

  AnalysisResult result{std::move(report), std::move(table), pct};
  return result;
}

std::string heatmap_svg(const ContingencyTable& table,
                        const Matrix& pct_diff) {
  const Index r = table.rows();
  const Index c = table.cols();
  const double cell_w = 72, cell_h = 40, left = 140, top = 70, pad = 16;
  const double width = left + cell_w * static_cast<double>(c) + pad;
  const double height = top + cell_h * static_cast<double>(r) + pad;

  svg::Document doc(width, height);
  doc.text(left / 2 + (width - left) / 2, top / 2 - 8,
           "% difference from expected",
           "text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"14\"");

  for (Index j = 0; j < c; ++j)
    doc.text(left + cell_w * (static_cast<double>(j) + 0.5), top - 8,
             table.col_labels()[static_cast<std::size_t>(j)],
             "text-anchor=\"middle\" font-family=\"sans-serif\" "
             "font-size=\"11\"");
  for (Index i = 0; i < r; ++i)
    doc.text(left - 8, top + cell_h * (static_cast<double>(i) + 0.5) + 4,
             table.row_labels()[static_cast<std::size_t>(i)],
             "text-anchor=\"end\" font-family=\"sans-serif\" "
             "font-size=\"11\"");

  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < c; ++j) {
      const double x = left + cell_w * static_cast<double>(j);
      const double y = top + cell_h * static_cast<double>(i);
      doc.rect(x, y, cell_w, cell_h,
               "fill=\"" + svg::diverging_color(pct_diff(i, j), 100.0) +
                   "\" stroke=\"#999999\" stroke-width=\"0.5\"");
      doc.text(x + cell_w / 2, y + cell_h / 2 + 4,
               svg::fmt(pct_diff(i, j), 1),
               "text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"11\"");
    }
  }
  return doc.str();
}

Json distribution_stats(std::vector<double> values) {
  if (values.empty()) return Json();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();

  auto quantile = [&](double p) {
    const double h = static_cast<double>(n - 1) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= n) return values[n - 1];
    return values[lo] + frac * (values[lo + 1] - values[lo]);
  };
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) /
      static_cast<double>(n);

  return Json{{"min", values.front()},   {"p10", quantile(0.10)},
              {"p25", quantile(0.25)},   {"median", quantile(0.50)},
              {"mean", mean},            {"p75", quantile(0.75)},
              {"p90", quantile(0.90)},   {"max", values.back()}};
}

Json batch_summary(const std::vector<Json>& reports) {
  std::vector<double> chi2, p_chi2, p_fisher, prop_standard, omega, cramers_v;
  std::vector<double> power_small, power_medium, power_large;
  std::vector<double> cell_chi2, cell_p, cell_p_fisher, cell_phi;
  double cell_count = 0, meets_standard = 0, meets_haber = 0, meets_andres = 0;
  double positive = 0, negative = 0;

  for (const Json& report : reports) {
    const Json& omnibus = report.at("omnibus");
    chi2.push_back(omnibus.at("chi2").get<double>());
    p_chi2.push_back(omnibus.at("p_chi2").get<double>());
    if (omnibus.at("fisher").contains("p"))
      p_fisher.push_back(omnibus.at("fisher").at("p").get<double>());
    prop_standard.push_back(
        report.at("criteria").at("prop_standard").get<double>());
    omega.push_back(report.at("effect").at("omega").get<double>());
    cramers_v.push_back(report.at("effect").at("cramers_v").get<double>());
    for (const Json& point : report.at("power").at("grid")) {
      const double w = point.at("omega").get<double>();
      const double value = point.at("power").get<double>();
      if (w == 0.1) power_small.push_back(value);
      if (w == 0.3) power_medium.push_back(value);
      if (w == 0.5) power_large.push_back(value);
    }
    for (const Json& cell : report.at("cellwise")) {
      cell_count += 1;
      cell_chi2.push_back(cell.at("chi2_yates").get<double>());
      cell_p.push_back(cell.at("p").get<double>());
      cell_p_fisher.push_back(cell.at("p_fisher").get<double>());
      cell_phi.push_back(cell.at("phi").get<double>());
      if (cell.at("meets_standard").get<bool>()) meets_standard += 1;
      if (cell.at("meets_haber").get<bool>()) meets_haber += 1;
      if (cell.at("meets_andres").get<bool>()) meets_andres += 1;
      const std::string direction = cell.at("direction").get<std::string>();
      if (direction == "+") positive += 1;
      if (direction == "-") negative += 1;
    }
  }

  Json summary;
  summary["schema_version"] = 1;
  summary["tables"] = reports.size();
  summary["omnibus_summary"] = {
      {"chi2", distribution_stats(std::move(chi2))},
      {"p_chi2", distribution_stats(std::move(p_chi2))},
      {"p_fisher", distribution_stats(std::move(p_fisher))},
      {"prop_standard", distribution_stats(std::move(prop_standard))},
      {"omega", distribution_stats(std::move(omega))},
      {"cramers_v", distribution_stats(std::move(cramers_v))},
      {"power_small", distribution_stats(std::move(power_small))},
      {"power_medium", distribution_stats(std::move(power_medium))},
      {"power_large", distribution_stats(std::move(power_large))}};
  summary["cellwise_summary"] = {
      {"cells", cell_count},
      {"chi2_yates", distribution_stats(std::move(cell_chi2))},
      {"p", distribution_stats(std::move(cell_p))},
      {"p_fisher", distribution_stats(std::move(cell_p_fisher))},
      {"phi", distribution_stats(std::move(cell_phi))},
      {"prop_meets_standard",
       cell_count > 0 ? Json(meets_standard / cell_count) : Json()},
      {"prop_meets_haber",
       cell_count > 0 ? Json(meets_haber / cell_count) : Json()},
      {"prop_meets_andres",
       cell_count > 0 ? Json(meets_andres / cell_count) : Json()},
      {"prop_direction_positive",
       cell_count > 0 ? Json(positive / cell_count) : Json()},
      {"prop_direction_negative",
       cell_count > 0 ? Json(negative / cell_count) : Json()}};
  return summary;
}

}  // namespace crosstab
