#include <cmath>
#include <string>
#include <vector>

#include "crosstab/report.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace crosstab;

namespace {

ContingencyTable polarized_2x2() {
  IntMatrix counts(2, 2);
  counts << 20, 5, 5, 20;
  return ContingencyTable::build({"A", "B"}, {"yes", "no"}, counts);
}

bool has_warning(const Json& report, const std::string& module,
                 const std::string& fragment) {
  for (const auto& w : report.at("warnings"))
    if (w.at("module") == module &&
        w.at("message").get<std::string>().find(fragment) != std::string::npos)
      return true;
  return false;
}

}  // namespace

TEST_CASE("analyze report carries every section") {
  AnalyzeOptions options;
  const AnalysisResult result =
      analyze_table(polarized_2x2(), options, "demo.csv");
  const Json& r = result.report;

  CHECK(r.at("schema_version") == 1);
  CHECK(r.at("input").at("source") == "demo.csv");
  CHECK(r.at("input").at("rows") == 2);
  CHECK(r.at("input").at("n") == 50);
  CHECK(r.at("omnibus").at("chi2").get<double>() ==
        doctest::Approx(18.0).epsilon(1e-12));
  CHECK(r.at("omnibus").at("df") == 1);
  // 2x2 default applies the continuity correction alongside the plain test.
  CHECK(r.at("omnibus").at("yates").at("chi2").get<double>() ==
        doctest::Approx(15.68).epsilon(1e-12));
  CHECK(r.at("omnibus").at("fisher").at("mode") == "exact");
  CHECK(r.at("omnibus").at("fisher").at("p").get<double>() ==
        doctest::Approx(4.7277678831033365e-05).epsilon(1e-12));
  CHECK(r.at("effect").at("omega").get<double>() ==
        doctest::Approx(0.6).epsilon(1e-12));
  CHECK(r.at("effect").at("omega_label") == "large");
  CHECK(r.at("effect").at("phi").get<double>() ==
        doctest::Approx(0.6).epsilon(1e-12));
  CHECK(r.at("power").at("grid").size() == 3);
  CHECK(r.at("criteria").at("prop_standard") == 1.0);
  CHECK(r.at("cellwise").size() == 4);
  CHECK(r.at("pct_diff").size() == 2);
  CHECK(r.at("ca").at("ndim") == 1);
  CHECK(r.at("ca").at("singular_values")[0].get<double>() ==
        doctest::Approx(0.6).epsilon(1e-9));

  // Four uncorrected cellwise tests must be flagged.
  CHECK(has_warning(r, "assoc-tests", "multiple-comparisons"));
}

TEST_CASE("analyze honors the fisher and correction options") {
  AnalyzeOptions options;
  options.fisher = FisherChoice::off;
  options.correction = Correction::holm;
  const AnalysisResult result =
      analyze_table(polarized_2x2(), options, "demo.csv");
  const Json& r = result.report;
  CHECK(r.at("omnibus").at("fisher").at("mode") == "off");
  CHECK(!r.at("omnibus").at("fisher").contains("p"));
  for (const auto& cell : r.at("cellwise"))
    CHECK(cell.at("p_adjusted").is_number());
  CHECK(!has_warning(r, "assoc-tests", "multiple-comparisons"));
}

TEST_CASE("analyze switches to monte carlo fisher off 2x2") {
  IntMatrix counts(3, 3);
  counts << 8, 2, 3,
            1, 9, 2,
            4, 3, 7;
  AnalyzeOptions options;
  options.replicates = 20000;
  options.seed = 11;
  const AnalysisResult result = analyze_table(
      oracle::make_table(counts), options, "three.csv");
  const Json& fisher = result.report.at("omnibus").at("fisher");
  CHECK(fisher.at("mode") == "montecarlo");
  CHECK(fisher.at("replicates") == 20000);
  CHECK(fisher.at("se").is_number());
  CHECK(fisher.at("p").get<double>() > 0.0);

  const AnalysisResult rerun = analyze_table(
      oracle::make_table(counts), options, "three.csv");
  CHECK(rerun.report.at("omnibus").at("fisher").at("p") == fisher.at("p"));
}

TEST_CASE("analyze warns about expected-frequency problems") {
  IntMatrix counts(2, 2);
  counts << 3, 2, 2, 3;
  AnalyzeOptions options;
  const AnalysisResult result =
      analyze_table(oracle::make_table(counts), options, "tiny.csv");
  CHECK(has_warning(result.report, "tabular-core", "expected"));
}

TEST_CASE("analyze prunes empty categories on request") {
  IntMatrix counts(3, 2);
  counts << 20, 5,
            0, 0,
            5, 20;
  const ContingencyTable t = ContingencyTable::build(
      {"A", "ghost", "B"}, {"yes", "no"}, counts);
  AnalyzeOptions options;
  options.prune_empty = true;
  const AnalysisResult result = analyze_table(t, options, "pruned.csv");
  CHECK(result.report.at("input").at("rows") == 2);
  CHECK(result.report.at("input").at("pruned") == true);
  CHECK(result.table.rows() == 2);
  CHECK(has_warning(result.report, "tabular-core", "ghost"));
}

TEST_CASE("analyze notes zero inertia on independent tables") {
  IntMatrix counts(2, 2);
  counts << 10, 20, 30, 60;
  AnalyzeOptions options;
  const AnalysisResult result =
      analyze_table(oracle::make_table(counts), options, "flat.csv");
  CHECK(result.report.at("ca").at("zero_inertia") == true);
  CHECK(has_warning(result.report, "correspondence", "inertia"));
}

TEST_CASE("analyze report round-trips through serialization") {
  AnalyzeOptions options;
  const AnalysisResult result =
      analyze_table(polarized_2x2(), options, "demo.csv");
  const std::string text = result.report.dump(2);
  const Json parsed = Json::parse(text);
  CHECK(parsed == result.report);
}

TEST_CASE("heatmap svg is deterministic and carries labels") {
  const ContingencyTable t = polarized_2x2();
  const Matrix diff = pct_diff_matrix(t);
  const std::string svg = heatmap_svg(t, diff);
  CHECK(svg == heatmap_svg(t, diff));
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("yes") != std::string::npos);
  CHECK(svg.find("B") != std::string::npos);
  CHECK(svg.find(">60<") != std::string::npos);
  CHECK(svg.find(">-60<") != std::string::npos);
}

TEST_CASE("distribution stats follow interpolated order statistics") {
  // Quantile h = (n-1)p + 1 interpolates adjacent order statistics; for
  // 1..5, p25 sits exactly on the second value.
  const Json stats = distribution_stats({5.0, 3.0, 1.0, 2.0, 4.0});
  CHECK(stats.at("min") == 1.0);
  CHECK(stats.at("max") == 5.0);
  CHECK(stats.at("median") == 3.0);
  CHECK(stats.at("mean") == 3.0);
  CHECK(stats.at("p25") == 2.0);
  CHECK(stats.at("p75") == 4.0);
  CHECK(stats.at("p10").get<double>() == doctest::Approx(1.4).epsilon(1e-12));
  CHECK(stats.at("p90").get<double>() == doctest::Approx(4.6).epsilon(1e-12));

  const Json pair = distribution_stats({1.0, 2.0});
  CHECK(pair.at("median") == 1.5);
  CHECK(pair.at("p25").get<double>() == doctest::Approx(1.25).epsilon(1e-12));

  CHECK(distribution_stats({}).is_null());
  CHECK(distribution_stats({7.0}).at("median") == 7.0);
}

TEST_CASE("batch summary aggregates omnibus and cellwise layers") {
  AnalyzeOptions options;
  std::vector<Json> reports;
  IntMatrix first(2, 2), second(2, 2);
  first << 20, 5, 5, 20;
  second << 12, 9, 10, 14;
  reports.push_back(
      analyze_table(oracle::make_table(first), options, "one.csv").report);
  reports.push_back(
      analyze_table(oracle::make_table(second), options, "two.csv").report);

  const Json summary = batch_summary(reports);
  CHECK(summary.at("tables") == 2);
  CHECK(summary.at("omnibus_summary").at("chi2").at("max").get<double>() ==
        doctest::Approx(18.0).epsilon(1e-12));
  CHECK(summary.at("omnibus_summary").at("omega").at("min").get<double>() >
        0.0);
  CHECK(summary.at("cellwise_summary").at("cells") == 8);
  CHECK(summary.at("cellwise_summary").at("phi").at("mean").is_number());
  CHECK(summary.at("cellwise_summary").at("prop_meets_standard").is_number());
  CHECK(summary.at("cellwise_summary")
            .at("prop_direction_positive")
            .is_number());
}
