#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "crosstab/io.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

RunResult run(const std::string& args) {
  const std::string command = std::string(CROSSTAB_BIN) + " " + args + " 2>&1";
  RunResult result;
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buffer;
  while (std::size_t got = std::fread(buffer.data(), 1, buffer.size(), pipe))
    result.output.append(buffer.data(), got);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

class Scratch {
 public:
  Scratch() {
    dir_ = fs::temp_directory_path() /
           ("crosstab_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Scratch() { std::error_code ec; fs::remove_all(dir_, ec); }

  std::string file(const std::string& name, const std::string& content) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path.string();
  }

  std::string sub(const std::string& name) const {
    return (dir_ / name).string();
  }

 private:
  fs::path dir_;
};

const char* kPolarized =
    ",yes,no\n"
    "A,20,5\n"
    "B,5,20\n";

const char* kThreeByThree =
    ",c1,c2,c3\n"
    "r1,8,2,3\n"
    "r2,1,9,2\n"
    "r3,4,3,7\n";

Json load_json(const std::string& path) {
  return Json::parse(crosstab::read_file(path));
}

}  // namespace

TEST_CASE("analyze writes report, heatmap, and summary") {
  Scratch scratch;
  const std::string input = scratch.file("demo.csv", kPolarized);
  const std::string out = scratch.sub("out");
  const RunResult r = run("analyze " + input + " --out " + out);
  REQUIRE(r.exit_code == 0);
  CHECK(r.output.find("chi2=18 df=1") != std::string::npos);
  CHECK(r.output.find("omega=0.6") != std::string::npos);

  const Json report = load_json(out + "/demo.report.json");
  CHECK(report.at("omnibus").at("chi2").get<double>() ==
        doctest::Approx(18.0).epsilon(1e-12));
  CHECK(report.at("effect").at("cramers_v").get<double>() ==
        doctest::Approx(0.6).epsilon(1e-12));
  CHECK(fs::exists(out + "/demo.pctdiff.svg"));

  const Json summary = load_json(out + "/summary.json");
  CHECK(summary.at("tables") == 1);
  CHECK(summary.at("cellwise_summary").at("cells") == 4);
}

TEST_CASE("analyze fans split input out into per-level reports") {
  Scratch scratch;
  const std::string input = scratch.file("waves.csv",
                                         "row,col,count,split\n"
                                         "A,yes,10,wave1\n"
                                         "A,no,2,wave1\n"
                                         "B,yes,3,wave1\n"
                                         "B,no,9,wave1\n"
                                         "A,yes,4,wave2\n"
                                         "A,no,8,wave2\n"
                                         "B,yes,7,wave2\n"
                                         "B,no,1,wave2\n");
  const std::string out = scratch.sub("out");
  const RunResult r = run("analyze " + input + " --out " + out);
  REQUIRE(r.exit_code == 0);
  CHECK(fs::exists(out + "/waves__wave1.report.json"));
  CHECK(fs::exists(out + "/waves__wave2.report.json"));
  const Json summary = load_json(out + "/summary.json");
  CHECK(summary.at("tables") == 2);
  const Json wave1 = load_json(out + "/waves__wave1.report.json");
  CHECK(wave1.at("input").at("split") == "wave1");
}

TEST_CASE("analyze fails loudly on a zero margin unless pruning") {
  Scratch scratch;
  const std::string input = scratch.file("hollow.csv",
                                         ",yes,no,never\n"
                                         "A,20,5,0\n"
                                         "B,5,20,0\n");
  const std::string out = scratch.sub("out");
  const RunResult bad = run("analyze " + input + " --out " + out);
  CHECK(bad.exit_code == 1);
  CHECK(bad.output.find("ZeroMargin") != std::string::npos);
  CHECK(bad.output.find("never") != std::string::npos);

  const RunResult good =
      run("analyze " + input + " --prune-empty --out " + out);
  REQUIRE(good.exit_code == 0);
  const Json report = load_json(out + "/hollow.report.json");
  CHECK(report.at("input").at("cols") == 2);
  CHECK(report.at("input").at("pruned") == true);
}

TEST_CASE("analyze reruns are byte-identical for a fixed seed") {
  Scratch scratch;
  const std::string input = scratch.file("three.csv", kThreeByThree);
  const std::string out1 = scratch.sub("first");
  const std::string out2 = scratch.sub("second");
  const std::string flags =
      " --fisher montecarlo --replicates 5000 --seed 99 --out ";
  REQUIRE(run("analyze " + input + flags + out1).exit_code == 0);
  REQUIRE(run("analyze " + input + flags + out2).exit_code == 0);
  CHECK(crosstab::read_file(out1 + "/three.report.json") ==
        crosstab::read_file(out2 + "/three.report.json"));
  CHECK(crosstab::read_file(out1 + "/three.pctdiff.svg") ==
        crosstab::read_file(out2 + "/three.pctdiff.svg"));
  CHECK(crosstab::read_file(out1 + "/summary.json") ==
        crosstab::read_file(out2 + "/summary.json"));

  const Json report = load_json(out1 + "/three.report.json");
  CHECK(report.at("omnibus").at("fisher").at("mode") == "montecarlo");
  CHECK(report.at("omnibus").at("fisher").at("replicates") == 5000);
}

TEST_CASE("analyze rejects unreadable and empty input") {
  Scratch scratch;
  const std::string empty = scratch.file("empty.csv", "");
  const RunResult r = run("analyze " + empty);
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("ParseError") != std::string::npos);

  const RunResult missing = run("analyze " + scratch.sub("absent.csv"));
  CHECK(missing.exit_code == 1);
  CHECK(missing.output.find("IoError") != std::string::npos);
}

TEST_CASE("ca clamps the default dimension count to the table rank") {
  Scratch scratch;
  const std::string input = scratch.file("demo.csv", kPolarized);
  const std::string out = scratch.sub("out");
  const RunResult r = run("ca " + input + " --out " + out);
  REQUIRE(r.exit_code == 0);
  const std::string csv = crosstab::read_file(out + "/demo.ca_coords.csv");
  CHECK(csv.substr(0, csv.find('\n')) == "label,kind,axis1");
  CHECK(csv.find("A,row,") != std::string::npos);
  CHECK(csv.find("no,col,") != std::string::npos);
  CHECK(fs::exists(out + "/demo.ca_biplot.svg"));

  // An explicit over-ask still fails.
  const RunResult over = run("ca " + input + " --ndim 2 --out " + out);
  CHECK(over.exit_code == 1);
  CHECK(over.output.find("TooManyDimensions") != std::string::npos);
}

TEST_CASE("ca validates requested plot axes") {
  Scratch scratch;
  const std::string input = scratch.file("three.csv", kThreeByThree);
  const std::string out = scratch.sub("out");
  const RunResult bad = run("ca " + input + " --dims 1,3 --out " + out);
  CHECK(bad.exit_code == 1);
  CHECK(bad.output.find("DimensionUnavailable") != std::string::npos);

  const RunResult good = run("ca " + input + " --dims 2,1 --out " + out);
  CHECK(good.exit_code == 0);
}

TEST_CASE("ca emits json coordinates on request") {
  Scratch scratch;
  const std::string input = scratch.file("three.csv", kThreeByThree);
  const std::string out = scratch.sub("out");
  REQUIRE(run("ca " + input + " --format json --out " + out).exit_code == 0);
  const Json coords = load_json(out + "/three.ca_coords.json");
  CHECK(coords.at("ndim") == 2);
  CHECK(coords.at("points").size() == 6);
  CHECK(coords.at("points")[0].at("kind") == "row");
  CHECK(coords.at("points")[0].at("coords").size() == 2);
  CHECK(coords.at("singular_values").size() == 2);
}

TEST_CASE("compare of a configuration with itself") {
  Scratch scratch;
  // Enough points that the identity permutation is effectively never drawn,
  // keeping the self-comparison p at the 1/(perms+1) floor.
  const std::string points = scratch.file("points.csv",
                                          "label,x,y\n"
                                          "p1,0.0,0.0\n"
                                          "p2,1.0,0.2\n"
                                          "p3,0.3,1.4\n"
                                          "p4,-0.8,0.5\n"
                                          "p5,0.6,-0.7\n"
                                          "p6,1.4,1.1\n"
                                          "p7,-1.2,-0.4\n"
                                          "p8,0.9,-1.3\n"
                                          "p9,-0.5,1.0\n"
                                          "p10,1.8,0.4\n");
  const std::string out = scratch.sub("out");
  const RunResult r = run("compare " + points + " " + points +
                          " --tanglegram --seed 7 --out " + out);
  REQUIRE(r.exit_code == 0);

  const Json report = load_json(out + "/compare.json");
  CHECK(report.at("procrustes").at("m2").get<double>() <= 1e-9);
  CHECK(report.at("procrustes").at("p_value").get<double>() ==
        doctest::Approx(0.001).epsilon(1e-9));
  CHECK(report.at("agreement").at("ar") == 1.0);
  CHECK(report.at("agreement").at("adjusted_ar") == 1.0);
  CHECK(report.at("agreement").at("max_k") == 8);
  CHECK(report.at("cophenetic_correlation").get<double>() ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fs::exists(out + "/tanglegram.svg"));

  // Same seed, same bytes.
  const std::string out2 = scratch.sub("out2");
  REQUIRE(run("compare " + points + " " + points +
              " --tanglegram --seed 7 --out " + out2)
              .exit_code == 0);
  CHECK(crosstab::read_file(out + "/compare.json") ==
        crosstab::read_file(out2 + "/compare.json"));
}

TEST_CASE("compare aligns rows of b by label") {
  Scratch scratch;
  const std::string a = scratch.file("a.csv",
                                     "label,x,y\n"
                                     "p1,0.0,0.0\n"
                                     "p2,1.0,0.2\n"
                                     "p3,0.3,1.4\n"
                                     "p4,-0.8,0.5\n");
  const std::string b = scratch.file("b.csv",
                                     "label,x,y\n"
                                     "p3,0.3,1.4\n"
                                     "p1,0.0,0.0\n"
                                     "p4,-0.8,0.5\n"
                                     "p2,1.0,0.2\n");
  const std::string out = scratch.sub("out");
  const RunResult r = run("compare " + a + " " + b + " --out " + out);
  REQUIRE(r.exit_code == 0);
  const Json report = load_json(out + "/compare.json");
  CHECK(report.at("procrustes").at("m2").get<double>() <= 1e-9);
  CHECK(report.at("agreement").at("ar") == 1.0);

  const std::string c = scratch.file("c.csv",
                                     "label,x,y\n"
                                     "p1,0.0,0.0\n"
                                     "p2,1.0,0.2\n"
                                     "p9,0.3,1.4\n"
                                     "p4,-0.8,0.5\n");
  const RunResult bad = run("compare " + a + " " + c + " --out " + out);
  CHECK(bad.exit_code == 1);
  CHECK(bad.output.find("LabelMismatch") != std::string::npos);
}

TEST_CASE("compare consumes correspondence coordinate dumps") {
  Scratch scratch;
  const std::string input = scratch.file("three.csv", kThreeByThree);
  const std::string out = scratch.sub("out");
  REQUIRE(run("ca " + input + " --out " + out).exit_code == 0);
  const std::string dump = out + "/three.ca_coords.csv";

  const RunResult rows = run("compare " + dump + " " + dump + " --out " +
                             scratch.sub("rows"));
  REQUIRE(rows.exit_code == 0);
  const RunResult cols = run("compare " + dump + " " + dump +
                             " --kind col --out " + scratch.sub("cols"));
  REQUIRE(cols.exit_code == 0);
  const Json report = load_json(scratch.sub("cols") + "/compare.json");
  CHECK(report.at("procrustes").at("m2").get<double>() <= 1e-9);
}

TEST_CASE("compare validates the neighborhood bound") {
  Scratch scratch;
  const std::string points = scratch.file("points.csv",
                                          "label,x,y\n"
                                          "p1,0.0,0.0\n"
                                          "p2,1.0,0.2\n"
                                          "p3,0.3,1.4\n"
                                          "p4,-0.8,0.5\n");
  const RunResult r = run("compare " + points + " " + points +
                          " --max-k 3 --out " + scratch.sub("out"));
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("KOutOfRange") != std::string::npos);
}

TEST_CASE("power evaluates a grid and solves for n") {
  Scratch scratch;
  const std::string out = scratch.sub("out");
  const RunResult grid = run("power --n 87.21 --out " + out);
  REQUIRE(grid.exit_code == 0);
  const Json report = load_json(out + "/power.json");
  REQUIRE(report.at("grid").size() == 3);
  CHECK(report.at("grid")[1].at("omega") == 0.3);
  CHECK(report.at("grid")[1].at("power").get<double>() ==
        doctest::Approx(0.80).epsilon(0.005));

  const RunResult solved =
      run("power --omega 0.3 --solve-n --power 0.8 --out " + out);
  REQUIRE(solved.exit_code == 0);
  const Json solution = load_json(out + "/power.json");
  CHECK(solution.at("solve_n") == true);
  CHECK(solution.at("grid")[0].at("n").get<double>() ==
        doctest::Approx(87.21).epsilon(0.001));
}

TEST_CASE("power at zero effect reports alpha itself") {
  Scratch scratch;
  const std::string out = scratch.sub("out");
  const RunResult r = run("power --omega 0 --n 250 --alpha 0.05 --out " + out);
  REQUIRE(r.exit_code == 0);
  const Json report = load_json(out + "/power.json");
  CHECK(report.at("grid")[0].at("power") == 0.05);
}

TEST_CASE("power argument validation") {
  Scratch scratch;
  const RunResult no_n = run("power --omega 0.3 --out " + scratch.sub("o1"));
  CHECK(no_n.exit_code == 1);
  CHECK(no_n.output.find("InvalidDomain") != std::string::npos);

  const RunResult hopeless =
      run("power --omega 0.3 --solve-n --power 0.04 --out " +
          scratch.sub("o2"));
  CHECK(hopeless.exit_code == 1);
  CHECK(hopeless.output.find("Unachievable") != std::string::npos);
}

TEST_CASE("reliability on a perfect two-coder grid") {
  Scratch scratch;
  const std::string input = scratch.file("coding.csv",
                                         "unit,coder,label\n"
                                         "u1,a,x\nu1,b,x\n"
                                         "u2,a,y\nu2,b,y\n"
                                         "u3,a,x\nu3,b,x\n"
                                         "u4,a,z\nu4,b,z\n");
  const std::string out = scratch.sub("out");
  const RunResult r = run("reliability " + input + " --out " + out);
  REQUIRE(r.exit_code == 0);
  const Json report = load_json(out + "/reliability.json");
  CHECK(report.at("kappa") == 1.0);
  CHECK(report.at("alpha") == 1.0);
  CHECK(report.at("units") == 4);
  CHECK(report.at("coders") == 2);
}

TEST_CASE("reliability skips kappa when it does not apply") {
  Scratch scratch;
  const std::string input = scratch.file("trio.csv",
                                         "unit,coder,label\n"
                                         "u1,a,x\nu1,b,x\nu1,c,x\n"
                                         "u2,a,y\nu2,b,y\nu2,c,x\n"
                                         "u3,a,x\nu3,b,y\nu3,c,y\n");
  const std::string out = scratch.sub("out");
  const RunResult both = run("reliability " + input + " --out " + out);
  REQUIRE(both.exit_code == 0);
  CHECK(both.output.find("kappa skipped") != std::string::npos);
  const Json report = load_json(out + "/reliability.json");
  CHECK(report.at("kappa").is_null());
  CHECK(report.at("alpha").is_number());

  const RunResult forced =
      run("reliability " + input + " --metric kappa --out " + out);
  CHECK(forced.exit_code == 1);
  CHECK(forced.output.find("InvalidDomain") != std::string::npos);
}

TEST_CASE("csi ranks categories by salience") {
  Scratch scratch;
  const std::string input = scratch.file("mentions.csv",
                                         "subject,rank,category\n"
                                         "s1,1,a\ns1,2,b\n"
                                         "s2,1,a\n"
                                         "s3,1,a\n"
                                         "s4,1,a\n"
                                         "s5,1,a\n");
  const std::string out = scratch.sub("out");
  const RunResult r = run("csi " + input + " --out " + out);
  REQUIRE(r.exit_code == 0);
  const Json report = load_json(out + "/csi.json");
  CHECK(report.at("subjects") == 5);
  REQUIRE(report.at("categories").size() == 2);
  CHECK(report.at("categories")[0].at("category") == "a");
  CHECK(report.at("categories")[0].at("csi") == 1.0);
  CHECK(report.at("categories")[1].at("category") == "b");
  CHECK(report.at("categories")[1].at("csi") == 0.1);
  CHECK(report.at("categories")[1].at("mean_rank") == 2.0);
}

TEST_CASE("bad command lines exit nonzero") {
  Scratch scratch;
  CHECK(run("").exit_code != 0);
  CHECK(run("frobnicate x.csv").exit_code != 0);
  CHECK(run("analyze").exit_code != 0);
  CHECK(run("ca " + scratch.sub("nope.csv") + " --format yaml").exit_code !=
        0);
}
