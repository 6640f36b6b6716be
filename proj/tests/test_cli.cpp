#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "pmarket/replication.hpp"
#include "pmarket/scenario.hpp"
#include "pmarket/serialize.hpp"
#include "pmarket/verify.hpp"

using namespace pmarket;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("pmarket_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path_ / name) << text;
    return path_ / name;
  }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int config_error_line(const std::string& yaml) {
  try {
    parse_scenario(yaml, "case.yaml", ".");
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(Scenario, ErrorsCarryLineNumbers) {
  EXPECT_EQ(config_error_line("engine: finite\nmodel:\n  builder: nope\nrealization: {X1: 0}\n"), 3);
  EXPECT_EQ(config_error_line("engine: quantum\n"), 1);
  EXPECT_EQ(config_error_line("engine: finite\nmodel:\n  builder: parity\nrealization: {X9: 0}\n"), 4);
  EXPECT_EQ(config_error_line("engine: finite\nmodel:\n  builder: parity\n"
                              "realization: {X1: 0}\nschedule: [1, 3]\n"),
            5);
  EXPECT_EQ(config_error_line("engine: mixture\nrealization:\n  x1: 0\n  x2: 1\n"), 3);
  EXPECT_EQ(config_error_line("engine: gaussian\nmodel:\n  k: 1\n  h: 1\n"
                              "  dispersion: [[1, 0, 0], [0, 1, 0], [0, 0, 1]]\n"
                              "realization:\n  x: [1, 2]\n  z: [1]\n"),
            7);
  EXPECT_EQ(config_error_line("engine: finite\nmodel: [\n"), 3);
}

TEST(Scenario, InlineTableWithRationalWeights) {
  const auto cfg = parse_scenario(R"(engine: finite
model:
  variables:
    - {name: H1, values: [0, 1]}
    - {name: H2, values: [0, 1]}
    - {name: A, values: [0, 1]}
  target: A
  experts:
    - private: H1
    - private: H2
  atoms:
    - {assignment: [0, 0, 1], weight: 1/4}
    - {assignment: [0, 1, 0], weight: 1/4}
    - {assignment: [1, 0, 0], weight: 1/4}
    - {assignment: {H1: 1, H2: 1, A: 1}, weight: 1/4}
realization: {H1: 1, H2: 1}
)",
                                  "inline.yaml", ".");
  const auto& s = std::get<FiniteScenario>(cfg.scenario);
  EXPECT_EQ(s.model.table().size(), 4u);
  EXPECT_EQ(s.realization, (Assignment{1, 1, 1}));
  EXPECT_EQ(cfg.trace_path, "inline.trace.json");
  EXPECT_EQ(cfg.report_path, "inline.report.json");
}

TEST(Scenario, UnnormalizedWeightsNeedFlag) {
  const std::string base = R"(engine: finite
model:
  variables:
    - {name: H, values: [0, 1]}
    - {name: A, values: [0, 1]}
  target: A
  experts: [{private: H}]
  atoms:
    - {assignment: [0, 0], weight: 1}
    - {assignment: [1, 1], weight: 2}
realization: {H: 0}
)";
  EXPECT_THROW(parse_scenario(base, "w.yaml", "."), ConfigError);
  std::string flagged = base;
  flagged.insert(flagged.find("  atoms"), "  normalize: true\n");
  EXPECT_NO_THROW(parse_scenario(flagged, "w.yaml", "."));
}

TEST(Scenario, DatasetColumnRanges) {
  TempDir dir;
  dir.write("toy.csv", "a,b,c,d\n1,0,0,1\n0,2,0,1\n0,0,3,1\n1,1,1,2\n");
  const auto cfg = parse_scenario(R"(engine: gaussian
model:
  dataset: {path: toy.csv, x_columns: 1-2, z_columns: [3], y_column: 4, n_expected: 4}
realization: {x: [1, 0], z: [2]}
)",
                                  "toy.yaml", dir.path());
  const auto& g = std::get<GaussianScenario>(cfg.scenario);
  EXPECT_EQ(g.model.k(), 2u);
  EXPECT_EQ(g.model.h(), 1u);
  EXPECT_EQ(cfg.trace_path, "toy.trace.csv");
}

TEST(CmdRun, ParityWritesVacuousReport) {
  TempDir dir;
  const auto cfg = dir.write("parity.yaml", "engine: finite\nmodel:\n  builder: parity\n"
                                            "realization: {X1: 1, X2: 0}\noutput:\n"
                                            "  trace: " + (dir.path() / "t.json").string() +
                                                "\n  report: " + (dir.path() / "r.json").string() +
                                                "\n");
  std::ostringstream out, err;
  ASSERT_EQ(cmd_run(cfg, out, err), 0) << err.str();
  const auto report = Json::parse(slurp(dir.path() / "r.json"));
  EXPECT_EQ(report["classification"], "vacuous");
  EXPECT_EQ(report["limit"], "1/2");
  EXPECT_EQ(report["engine"], "finite");
  for (const char* key : {"mode", "rounds", "schedule", "prior", "pooled"}) {
    EXPECT_TRUE(report.contains(key)) << key;
  }
  const auto trace = Json::parse(slurp(dir.path() / "t.json"));
  EXPECT_EQ(trace["steps"][0]["forecast"], "1/2");
}

TEST(CmdRun, MixtureReportIsLimited) {
  TempDir dir;
  const auto cfg = dir.write("ts.yaml", "engine: mixture\nmodel: {mu: 0}\n"
                                        "realization: {x1: 1, x2: 1}\noutput:\n"
                                        "  trace: " + (dir.path() / "t.json").string() +
                                            "\n  report: " + (dir.path() / "r.json").string() +
                                            "\n");
  std::ostringstream out, err;
  ASSERT_EQ(cmd_run(cfg, out, err), 0) << err.str();
  const auto report = Json::parse(slurp(dir.path() / "r.json"));
  EXPECT_EQ(report["classification"], "limited");
  EXPECT_EQ(report["limit"]["components"].size(), 2u);
}

TEST(CmdRun, GaussianTraceCsvColumns) {
  TempDir dir;
  const auto cfg = dir.write("g.yaml", "engine: gaussian\nmodel:\n  k: 1\n  h: 1\n"
                                       "  dispersion: [[2, 0.5, 1], [0.5, 1, 0.3], [1, 0.3, 2]]\n"
                                       "realization: {x: [1.0], z: [-0.5]}\noutput:\n"
                                       "  trace: " + (dir.path() / "t.csv").string() +
                                           "\n  report: " + (dir.path() / "r.json").string() +
                                           "\n");
  std::ostringstream out, err;
  ASSERT_EQ(cmd_run(cfg, out, err), 0) << err.str();
  const auto csv = slurp(dir.path() / "t.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "round,expert,mean,sd,new_statistic_added");
  EXPECT_EQ(Json::parse(slurp(dir.path() / "r.json"))["classification"], "complete");
}

TEST(CmdRun, ExitCodes) {
  TempDir dir;
  std::ostringstream out, err;
  EXPECT_EQ(cmd_run(dir.write("bad.yaml", "engine: finite\nmodel: {builder: x}\n"), out, err), 2);
  EXPECT_NE(err.str().find("bad.yaml:2:"), std::string::npos) << err.str();
  EXPECT_EQ(cmd_run(dir.path() / "missing.yaml", out, err), 2);
  const auto gauss = dir.write("nodata.yaml",
                               "engine: gaussian\nmodel:\n  dataset: {path: absent.csv, "
                               "x_columns: 1, z_columns: 2, y_column: 3}\n"
                               "realization: {x: [1], z: [1]}\n");
  EXPECT_EQ(cmd_run(gauss, out, err), 4);
  const auto engine_err = dir.write(
      "engine.yaml", "engine: gaussian\nmodel:\n  k: 1\n  h: 1\n"
                     "  dispersion: [[1, 0, 0], [0, 1, 0], [0, 0, 1]]\nrealization: {x: [1], z: [1]}\n"
                     "max_rounds: 1\noutput: {trace: " + (dir.path() / "t.csv").string() +
                         ", report: " + (dir.path() / "r.json").string() + "}\n");
  EXPECT_EQ(cmd_run(engine_err, out, err), 3);
}

TEST(CmdVerify, DeterministicAndPassing) {
  for (Suite s : {Suite::martingale, Suite::vacuity, Suite::bounds, Suite::mixture}) {
    std::ostringstream a, b;
    EXPECT_EQ(cmd_verify(s, 5, 10, a), 0) << a.str();
    cmd_verify(s, 5, 10, b);
    EXPECT_EQ(a.str(), b.str());
  }
  std::ostringstream c, d;
  cmd_verify(Suite::bounds, 6, 10, c);
  cmd_verify(Suite::bounds, 5, 10, d);
  EXPECT_NE(c.str(), d.str());
  EXPECT_FALSE(parse_suite("nope").has_value());
  EXPECT_EQ(parse_suite("all"), Suite::all);
}

TEST(Replication, PublishedComparison) {
  const auto c = compare_published("u1", "40.62", 40.6163);
  EXPECT_TRUE(c.ok);
  EXPECT_DOUBLE_EQ(c.tolerance, 0.005);
  EXPECT_FALSE(compare_published("u9", "39.73917", 39.73925).ok);
  EXPECT_TRUE(compare_published("v", "36.593865", 36.5938645).ok);
}

TEST(Replication, MissingDatasetExitsWithGuidance) {
  std::ostringstream out, err;
  EXPECT_EQ(cmd_replicate_table1("/nonexistent/93cars.csv", {}, out, err), 4);
  EXPECT_NE(err.str().find("PMARKET_DATA_DIR"), std::string::npos);
}

TEST(Serialize, FiniteModelRoundTripsThroughScenario) {
  const auto model = build_overlapping_bernoulli(1, 1, 0);
  Json scenario{{"engine", "finite"}, {"model", finite_model_to_json(model)}};
  scenario["realization"] = Json{{"X1", 1}, {"X2", 1}};
  // JSON is valid YAML.
  const auto cfg = parse_scenario(scenario.dump(), "rt.yaml", ".");
  EXPECT_EQ(std::get<FiniteScenario>(cfg.scenario).model.table(), model.table());
}
