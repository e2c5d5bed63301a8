#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "crosstab/assoc.hpp"
#include "crosstab/ca.hpp"
#include "crosstab/compare.hpp"
#include "crosstab/effect_power.hpp"
#include "crosstab/errors.hpp"
#include "crosstab/io.hpp"
#include "crosstab/reliability.hpp"
#include "crosstab/report.hpp"

namespace {

namespace fs = std::filesystem;
using crosstab::Json;

std::string sanitize(const std::string& text) {
  std::string out;
  for (char ch : text)
    out += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' ||
            ch == '-' || ch == '_')
               ? ch
               : '_';
  return out.empty() ? std::string("_") : out;
}

std::string output_stem(const std::string& input,
                        const std::optional<std::string>& split) {
  std::string stem = sanitize(fs::path(input).stem().string());
  if (split) stem += "__" + sanitize(*split);
  return stem;
}

fs::path ensure_out_dir(const std::string& out) {
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

void emit_warnings(const Json& warnings) {
  for (const Json& warning : warnings)
    std::cerr << "warning [" << warning.at("module").get<std::string>()
              << "]: " << warning.at("message").get<std::string>() << "\n";
}

void write_json(const fs::path& path, const Json& value) {
  crosstab::write_file_atomic(path.string(), value.dump(2) + "\n");
  std::cout << "wrote " << path.string() << "\n";
}

void write_text(const fs::path& path, const std::string& content) {
  crosstab::write_file_atomic(path.string(), content);
  std::cout << "wrote " << path.string() << "\n";
}

struct AnalyzeArgs {
  std::vector<std::string> files;
  double alpha = 0.05;
  std::string yates = "auto";
  std::string fisher = "auto";
  std::int64_t replicates = 100000;
  std::uint64_t seed = 0;
  std::string correction = "none";
  bool prune_empty = false;
  crosstab::Index ndim = 2;
  std::string out = ".";
};

crosstab::Correction parse_correction(const std::string& name) {
  if (name == "bonferroni") return crosstab::Correction::bonferroni;
  if (name == "holm") return crosstab::Correction::holm;
  return crosstab::Correction::none;
}

void run_analyze(const AnalyzeArgs& args) {
  crosstab::AnalyzeOptions options;
  options.alpha = args.alpha;
  if (args.yates == "on") options.yates = true;
  if (args.yates == "off") options.yates = false;
  if (args.fisher == "exact")
    options.fisher = crosstab::FisherChoice::exact;
  else if (args.fisher == "montecarlo")
    options.fisher = crosstab::FisherChoice::montecarlo;
  else if (args.fisher == "off")
    options.fisher = crosstab::FisherChoice::off;
  options.replicates = args.replicates;
  options.seed = args.seed;
  options.correction = parse_correction(args.correction);
  options.prune_empty = args.prune_empty;
  options.ndim = args.ndim;

  const fs::path out_dir = ensure_out_dir(args.out);
  std::vector<Json> reports;
  for (const std::string& file : args.files) {
    for (const crosstab::ContingencyTable& table :
         crosstab::read_tables(file)) {
      crosstab::AnalysisResult result =
          crosstab::analyze_table(table, options, fs::path(file).filename());
      emit_warnings(result.report.at("warnings"));

      const std::string stem =
          output_stem(file, result.table.split_label());
      write_json(out_dir / (stem + ".report.json"), result.report);
      write_text(out_dir / (stem + ".pctdiff.svg"),
                 crosstab::heatmap_svg(result.table, result.pct_diff));

      const Json& omnibus = result.report.at("omnibus");
      std::cout << stem << ": chi2=" << omnibus.at("chi2").get<double>()
                << " df=" << omnibus.at("df").get<int>()
                << " p=" << omnibus.at("p_chi2").get<double>()
                << " omega=" << result.report.at("effect").at("omega").get<double>()
                << "\n";
      reports.push_back(std::move(result.report));
    }
  }
  write_json(out_dir / "summary.json", crosstab::batch_summary(reports));
}

struct CaArgs {
  std::string file;
  crosstab::Index ndim = 2;
  bool ndim_given = false;
  std::string dims;
  std::string format = "csv";
  std::string out = ".";
};

std::pair<crosstab::Index, std::optional<crosstab::Index>> parse_dims(
    const std::string& text) {
  const auto comma = text.find(',');
  auto one_based = [](const std::string& item) {
    try {
      const long value = std::stol(item);
      if (value < 1) throw std::invalid_argument("dims");
      return static_cast<crosstab::Index>(value - 1);
    } catch (const std::exception&) {
      crosstab::raise(crosstab::errc::parse_error,
                      "--dims expects 1-based integers like 1,2");
    }
  };
  if (comma == std::string::npos) return {one_based(text), std::nullopt};
  return {one_based(text.substr(0, comma)),
          one_based(text.substr(comma + 1))};
}

void run_ca(const CaArgs& args) {
  const fs::path out_dir = ensure_out_dir(args.out);
  for (const crosstab::ContingencyTable& table :
       crosstab::read_tables(args.file)) {
    const crosstab::Index k_full =
        std::min(table.rows(), table.cols()) - 1;
    crosstab::Index ndim = args.ndim;
    if (!args.ndim_given && ndim > k_full) ndim = k_full;
    const crosstab::CaSolution solution = crosstab::fit_ca(table, ndim);
    if (solution.zero_inertia)
      std::cerr << "warning [correspondence]: table is exactly independent; "
                   "all points sit at the origin\n";

    crosstab::Index d1 = 0;
    std::optional<crosstab::Index> d2;
    if (args.dims.empty()) {
      if (solution.ndim > 1) d2 = 1;
    } else {
      std::tie(d1, d2) = parse_dims(args.dims);
    }

    const std::string stem = output_stem(args.file, table.split_label());
    if (args.format == "json") {
      Json coords;
      coords["schema_version"] = 1;
      coords["ndim"] = solution.ndim;
      Json points = Json::array();
      auto add_points = [&](const std::vector<std::string>& labels,
                            const crosstab::Matrix& matrix,
                            const char* kind) {
        for (crosstab::Index i = 0; i < matrix.rows(); ++i) {
          Json point = {{"label", labels[static_cast<std::size_t>(i)]},
                        {"kind", kind}};
          Json values = Json::array();
          for (crosstab::Index d = 0; d < matrix.cols(); ++d)
            values.push_back(matrix(i, d));
          point["coords"] = std::move(values);
          points.push_back(std::move(point));
        }
      };
      add_points(solution.row_labels, solution.row_coords, "row");
      add_points(solution.col_labels, solution.col_coords, "col");
      coords["points"] = std::move(points);
      Json singulars = Json::array();
      Json variance = Json::array();
      for (crosstab::Index d = 0; d < solution.singular_values.size(); ++d) {
        singulars.push_back(solution.singular_values(d));
        variance.push_back(solution.variance_explained(d));
      }
      coords["singular_values"] = std::move(singulars);
      coords["variance_explained"] = std::move(variance);
      write_json(out_dir / (stem + ".ca_coords.json"), coords);
    } else {
      write_text(out_dir / (stem + ".ca_coords.csv"),
                 crosstab::coords_csv(solution));
    }
    write_text(out_dir / (stem + ".ca_biplot.svg"),
               crosstab::biplot_svg(solution, d1, d2));
  }
}

struct CompareArgs {
  std::string file_a;
  std::string file_b;
  std::int64_t permutations = 999;
  std::uint64_t seed = 0;
  crosstab::Index max_k = 0;  // 0 = full range n-2
  bool tanglegram = false;
  std::string kind = "row";
  std::string out = ".";
};

crosstab::Configuration align_to(const crosstab::Configuration& reference,
                                 const crosstab::Configuration& other,
                                 const std::string& other_name) {
  if (reference.labels() == other.labels()) return other;
  std::vector<std::string> labels;
  crosstab::Matrix coords(reference.size(), other.dims());
  crosstab::Index row = 0;
  for (const std::string& label : reference.labels()) {
    const auto it = std::find(other.labels().begin(), other.labels().end(),
                              label);
    if (it == other.labels().end())
      crosstab::raise(crosstab::errc::label_mismatch,
                      "label '" + label + "' missing from " + other_name);
    const crosstab::Index source =
        static_cast<crosstab::Index>(it - other.labels().begin());
    coords.row(row++) = other.coords().row(source);
    labels.push_back(label);
  }
  if (other.size() != reference.size())
    crosstab::raise(crosstab::errc::label_mismatch,
                    other_name + " carries labels absent from the reference");
  return crosstab::Configuration::build(std::move(labels), std::move(coords));
}

void run_compare(const CompareArgs& args) {
  const crosstab::Configuration a =
      crosstab::read_configuration(args.file_a, args.kind);
  const crosstab::Configuration b_raw =
      crosstab::read_configuration(args.file_b, args.kind);
  const crosstab::Configuration b = align_to(a, b_raw, args.file_b);

  const crosstab::ProcrustesResult fit = crosstab::procrustes_fit(a, b);
  const double p =
      crosstab::procrustes_test(a, b, args.permutations, args.seed);

  const crosstab::Index max_k =
      args.max_k > 0 ? args.max_k : a.size() - 2;
  const crosstab::AgreementResult agreement =
      crosstab::agreement_rates(a, b, max_k);

  Json report;
  report["schema_version"] = 1;
  report["inputs"] = {{"a", args.file_a}, {"b", args.file_b}};
  report["procrustes"] = {{"m2", fit.m2},
                          {"p_value", p},
                          {"permutations", args.permutations},
                          {"seed", args.seed},
                          {"scale", fit.scale}};
  report["agreement"] = {{"ar", agreement.ar},
                         {"adjusted_ar", agreement.adjusted_ar},
                         {"max_k", max_k},
                         {"per_k", agreement.per_k},
                         {"adjusted_per_k", agreement.adjusted_per_k}};

  const fs::path out_dir = ensure_out_dir(args.out);
  if (args.tanglegram) {
    const crosstab::Dendrogram left = crosstab::hcluster(a);
    const crosstab::Dendrogram right = crosstab::hcluster(b);
    report["cophenetic_correlation"] =
        crosstab::cophenetic_correlation(left, right);
    write_text(out_dir / "tanglegram.svg",
               crosstab::tanglegram_svg(left, right));
  }
  write_json(out_dir / "compare.json", report);

  std::cout << "m2=" << fit.m2 << " p=" << p << " ar=" << agreement.ar
            << " adjusted_ar=" << agreement.adjusted_ar << "\n";
}

struct PowerArgs {
  std::vector<double> omegas;
  double n = 0.0;
  bool n_given = false;
  int df = 1;
  double alpha = 0.05;
  bool solve_n = false;
  double target_power = 0.80;
  std::string out = ".";
};

void run_power(const PowerArgs& args) {
  std::vector<double> omegas = args.omegas;
  if (omegas.empty()) omegas = {0.1, 0.3, 0.5};

  if (!args.solve_n && !args.n_given)
    crosstab::raise(crosstab::errc::invalid_domain,
                    "power needs --n, or --solve-n with --power");

  Json rows = Json::array();
  for (double omega : omegas) {
    if (args.solve_n) {
      const double n =
          crosstab::required_n(omega, args.df, args.alpha, args.target_power);
      const double achieved =
          crosstab::chi2_power({omega, n, args.df, args.alpha});
      rows.push_back({{"omega", omega},
                      {"target_power", args.target_power},
                      {"n", n},
                      {"power", achieved}});
      std::cout << "omega=" << omega << " target=" << args.target_power
                << " n=" << n << " power=" << achieved << "\n";
    } else {
      const double power =
          crosstab::chi2_power({omega, args.n, args.df, args.alpha});
      rows.push_back({{"omega", omega}, {"n", args.n}, {"power", power}});
      std::cout << "omega=" << omega << " n=" << args.n
                << " power=" << power << "\n";
    }
  }

  Json report;
  report["schema_version"] = 1;
  report["alpha"] = args.alpha;
  report["df"] = args.df;
  report["solve_n"] = args.solve_n;
  report["grid"] = std::move(rows);
  write_json(ensure_out_dir(args.out) / "power.json", report);
}

struct ReliabilityArgs {
  std::string file;
  std::string metric = "both";
  std::string out = ".";
};

void run_reliability(const ReliabilityArgs& args) {
  const crosstab::CodingMatrix matrix = crosstab::read_coding(args.file);

  Json report;
  report["schema_version"] = 1;
  report["input"] = args.file;
  report["units"] = matrix.units();
  report["coders"] = matrix.coders();
  report["metric"] = args.metric;
  Json warnings = Json::array();

  bool complete = true;
  for (std::size_t u = 0; u < matrix.units() && complete; ++u)
    for (std::size_t c = 0; c < matrix.coders(); ++c)
      if (!matrix.code(u, c)) {
        complete = false;
        break;
      }

  report["kappa"] = Json();
  report["alpha"] = Json();
  if (args.metric == "kappa" || args.metric == "both") {
    if (args.metric == "both" && (matrix.coders() != 2 || !complete)) {
      warnings.push_back(
          {{"module", "saliency-reliability"},
           {"message", "kappa skipped: it needs exactly 2 coders and a "
                       "complete grid"}});
    } else {
      report["kappa"] = crosstab::cohens_kappa(matrix);
    }
  }
  if (args.metric == "alpha" || args.metric == "both")
    report["alpha"] = crosstab::krippendorff_alpha(matrix);
  report["warnings"] = warnings;
  emit_warnings(warnings);

  write_json(ensure_out_dir(args.out) / "reliability.json", report);
  std::cout << "kappa=" << report.at("kappa").dump()
            << " alpha=" << report.at("alpha").dump() << "\n";
}

struct CsiArgs {
  std::string file;
  std::string out = ".";
};

void run_csi(const CsiArgs& args) {
  const crosstab::MentionLists mentions = crosstab::read_mentions(args.file);
  const std::map<std::string, crosstab::Csi> salience =
      crosstab::cognitive_salience(mentions);

  std::vector<std::pair<std::string, crosstab::Csi>> ranked(salience.begin(),
                                                            salience.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& x, const auto& y) {
                     if (x.second.value != y.second.value)
                       return x.second.value > y.second.value;
                     return x.first < y.first;
                   });

  Json categories = Json::array();
  for (const auto& [category, csi] : ranked) {
    categories.push_back({{"category", category},
                          {"mentions", csi.mentions},
                          {"mean_rank", csi.mean_rank},
                          {"csi", csi.value}});
    std::cout << category << ": csi=" << csi.value
              << " mentions=" << csi.mentions
              << " mean_rank=" << csi.mean_rank << "\n";
  }

  Json report;
  report["schema_version"] = 1;
  report["input"] = args.file;
  report["subjects"] = mentions.subjects();
  report["categories"] = std::move(categories);
  write_json(ensure_out_dir(args.out) / "csi.json", report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contingency-table association analysis toolkit"};
  app.require_subcommand(1);

  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand(
      "analyze", "Chi-squared, Fisher, effect sizes, power, cellwise tests");
  analyze->add_option("files", analyze_args.files, "Table CSVs (wide or long)")
      ->required()
      ->expected(-1);
  analyze->add_option("--alpha", analyze_args.alpha, "Significance level")
      ->capture_default_str();
  analyze->add_option("--yates", analyze_args.yates,
                      "Continuity correction: auto|on|off")
      ->check(CLI::IsMember({"auto", "on", "off"}))
      ->capture_default_str();
  analyze->add_option("--fisher", analyze_args.fisher,
                      "Fisher mode: auto|exact|montecarlo|off")
      ->check(CLI::IsMember({"auto", "exact", "montecarlo", "off"}))
      ->capture_default_str();
  analyze->add_option("--replicates", analyze_args.replicates,
                      "Monte Carlo replicates")
      ->capture_default_str();
  analyze->add_option("--seed", analyze_args.seed, "Random seed")
      ->capture_default_str();
  analyze->add_option("--correction", analyze_args.correction,
                      "Cellwise p adjustment: none|bonferroni|holm")
      ->check(CLI::IsMember({"none", "bonferroni", "holm"}))
      ->capture_default_str();
  analyze->add_flag("--prune-empty", analyze_args.prune_empty,
                    "Drop all-zero rows/columns instead of failing");
  analyze->add_option("--ndim", analyze_args.ndim,
                      "Dimensions in the correspondence summary")
      ->capture_default_str();
  analyze->add_option("--out", analyze_args.out, "Output directory")
      ->capture_default_str();
  analyze->callback([&] { run_analyze(analyze_args); });

  CaArgs ca_args;
  auto* ca = app.add_subcommand("ca", "Correspondence analysis and biplot");
  ca->add_option("file", ca_args.file, "Table CSV")->required();
  auto* ndim_opt =
      ca->add_option("--ndim", ca_args.ndim, "Solution dimensions")
          ->capture_default_str();
  ca->add_option("--dims", ca_args.dims,
                 "Plot axes, 1-based, e.g. 1,2 (default: first two)");
  ca->add_option("--format", ca_args.format, "Coordinate dump: csv|json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  ca->add_option("--out", ca_args.out, "Output directory")
      ->capture_default_str();
  ca->callback([&] {
    ca_args.ndim_given = ndim_opt->count() > 0;
    run_ca(ca_args);
  });

  CompareArgs compare_args;
  auto* compare = app.add_subcommand(
      "compare", "Procrustes fit, permutation test, agreement rates");
  compare->add_option("file_a", compare_args.file_a, "Configuration CSV")
      ->required();
  compare->add_option("file_b", compare_args.file_b, "Configuration CSV")
      ->required();
  compare->add_option("--permutations", compare_args.permutations,
                      "Permutation count")
      ->capture_default_str();
  compare->add_option("--seed", compare_args.seed, "Random seed")
      ->capture_default_str();
  compare->add_option("--max-k", compare_args.max_k,
                      "Largest neighborhood size (default n-2)");
  compare->add_flag("--tanglegram", compare_args.tanglegram,
                    "Also cluster both configurations and emit tanglegram.svg");
  compare->add_option("--kind", compare_args.kind,
                      "Point kind to read from coordinate dumps: row|col")
      ->check(CLI::IsMember({"row", "col"}))
      ->capture_default_str();
  compare->add_option("--out", compare_args.out, "Output directory")
      ->capture_default_str();
  compare->callback([&] { run_compare(compare_args); });

  PowerArgs power_args;
  auto* power = app.add_subcommand(
      "power", "Power of the chi-squared test, or solve for n");
  power->add_option("--omega", power_args.omegas,
                    "Effect size(s); default grid 0.1 0.3 0.5");
  auto* n_opt = power->add_option("--n", power_args.n, "Sample size");
  power->add_option("--df", power_args.df, "Degrees of freedom")
      ->capture_default_str();
  power->add_option("--alpha", power_args.alpha, "Significance level")
      ->capture_default_str();
  power->add_flag("--solve-n", power_args.solve_n,
                  "Solve for the smallest n reaching --power");
  power->add_option("--power", power_args.target_power, "Target power")
      ->capture_default_str();
  power->add_option("--out", power_args.out, "Output directory")
      ->capture_default_str();
  power->callback([&] {
    power_args.n_given = n_opt->count() > 0;
    run_power(power_args);
  });

  ReliabilityArgs reliability_args;
  auto* reliability =
      app.add_subcommand("reliability", "Inter-coder agreement measures");
  reliability->add_option("file", reliability_args.file,
                          "Coding CSV (unit,coder,label)")
      ->required();
  reliability->add_option("--metric", reliability_args.metric,
                          "kappa|alpha|both")
      ->check(CLI::IsMember({"kappa", "alpha", "both"}))
      ->capture_default_str();
  reliability->add_option("--out", reliability_args.out, "Output directory")
      ->capture_default_str();
  reliability->callback([&] { run_reliability(reliability_args); });

  CsiArgs csi_args;
  auto* csi = app.add_subcommand("csi", "Cognitive salience of mention lists");
  csi->add_option("file", csi_args.file, "Mentions CSV (subject,rank,category)")
      ->required();
  csi->add_option("--out", csi_args.out, "Output directory")
      ->capture_default_str();
  csi->callback([&] { run_csi(csi_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    return app.exit(error);
  } catch (const crosstab::Error& error) {
    std::cerr << "error [" << crosstab::errc_name(error.code())
              << "]: " << error.what() << "\n";
    return 1;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
  return 0;
}
