#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "netspec/config.hpp"
#include "netspec/csv.hpp"
#include "netspec/errors.hpp"
#include "netspec/fixture.hpp"
#include "netspec/pipeline.hpp"
#include "support/oracles.hpp"
#include "support/paths.hpp"

using namespace netspec;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
};

Outcome run_cli(const std::string& args) {
  const std::string cmd = std::string(NETSPEC_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("netspec_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
};

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

const char* kSmallRun = R"({
  "scenario": "cyclic-known",
  "graph": { "kind": "erdos_renyi", "n": 5, "edge_prob": 0.6, "seed": 3 },
  "w": { "kind": "random_weights", "seed": 4 },
  "y0": { "seed": 5 },
  "consensus": { "alpha": 10, "beta": 10, "step": "auto", "t_max": 20, "v_tol": 1e-14, "sample_every": 0.5 }
})";

}  // namespace

TEST_F(CliTest, ValidateShippedFixtures) {
  for (const char* f : {"paper_scenario1.json", "paper_scenario2_adjacency.json",
                        "paper_scenario2_perturbed.json"}) {
    const Outcome o = run_cli("validate --fixture " + q(testpaths::fixture(f)));
    EXPECT_EQ(o.code, 0) << f;
    EXPECT_NE(o.out.find("assumption 1: ok"), std::string::npos);
  }
}

TEST_F(CliTest, ValidateReportsViolations) {
  const fs::path f = write("bad.json", R"({"n":3,"edges":[[1,2],[2,3]],
    "w":[0,1,0.5, 1,0,1, 0,1,0]})");
  const Outcome o = run_cli("validate --fixture " + q(f));
  EXPECT_EQ(o.code, kExitConfig);
  EXPECT_NE(o.out.find("violation: w(1,3) = 0.5"), std::string::npos);
}

TEST_F(CliTest, DisconnectedFixtureIsRejected) {
  const fs::path f = write("diag.json", R"({"n":2,"edges":[],"w":[1,0,0,2]})");
  const fs::path cfg = write("cfg.json", R"({"scenario":"cyclic-known",
    "graph":{"fixture":"diag.json"},"w":{"kind":"fixture"}})");
  EXPECT_EQ(run_cli("run --config " + q(cfg) + " --out " + q(dir_ / "out")).code, kExitConfig);
  EXPECT_EQ(run_cli("validate --fixture " + q(f)).code, kExitConfig);
}

TEST_F(CliTest, OracleOnSixNodeFixture) {
  const Outcome o = run_cli("oracle --fixture " + q(testpaths::fixture("paper_scenario1.json")));
  ASSERT_EQ(o.code, 0);
  std::istringstream in(o.out);
  std::string line;
  std::getline(in, line);
  ASSERT_EQ(line.rfind("W x*: ", 0), 0u);
  std::istringstream xs(line.substr(6));
  std::vector<double> x;
  for (double v; xs >> v;) x.push_back(v);
  const Fixture f = load_fixture(testpaths::fixture("paper_scenario1.json"));
  const auto want = oracle::charpoly_via_eigen(f.assignment.w);
  ASSERT_EQ(x.size(), 6u);
  for (std::size_t k = 0; k < 6; ++k) EXPECT_NEAR(x[k], want[k], 1e-12);
  std::getline(in, line);
  ComplexVector roots;
  for (double re, im; in >> re >> im;) roots.push_back({re, im});
  EXPECT_TRUE(oracle::same_multiset(roots, oracle::eigenvalues(f.assignment.w), 1e-10));
}

TEST_F(CliTest, OracleOnIdentity) {
  const fs::path f = write("id.json", R"({"n":3,"edges":[[1,2],[2,3]],"w":[1,0,0,0,1,0,0,0,1]})");
  const Outcome o = run_cli("oracle --fixture " + q(f));
  ASSERT_EQ(o.code, 0);
  std::istringstream in(o.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "W x*: -1 3 -3");
  std::getline(in, line);
  int count = 0;
  // A triple root is only determined to about eps^(1/3).
  for (double re, im; in >> re >> im; ++count) EXPECT_LE(distance({re, im}, {1, 0}), 1e-4);
  EXPECT_EQ(count, 3);
}

TEST_F(CliTest, OracleRoundTripOnRandomW) {
  const fs::path cfg = write("cfg.json", kSmallRun);
  const Outcome o = run_cli("oracle --config " + q(cfg));
  ASSERT_EQ(o.code, 0);
  std::istringstream in(o.out);
  std::string line;
  std::getline(in, line);
  std::istringstream xs(line.substr(6));
  std::vector<double> x;
  for (double v; xs >> v;) x.push_back(v);
  std::getline(in, line);
  ComplexVector roots;
  for (double re, im; in >> re >> im;) roots.push_back({re, im});
  const auto back = oracle::expand_roots(roots);
  ASSERT_EQ(back.size(), x.size());
  for (std::size_t k = 0; k < x.size(); ++k) EXPECT_NEAR(back[k], x[k], 1e-9);
}

TEST_F(CliTest, RunWritesParseableArtifacts) {
  const fs::path cfg = write("cfg.json", kSmallRun);
  const fs::path out = dir_ / "out";
  const Outcome o = run_cli("run --config " + q(cfg) + " --out " + q(out));
  ASSERT_EQ(o.code, 0) << o.out;
  EXPECT_NE(o.out.find("status: ok"), std::string::npos);

  const auto trace = stage1_trace_from_table(read_csv(out / "stage1_trace.csv"));
  EXPECT_EQ(trace.size(), 6u);
  const FlowTrace flow = flow_trace_from_table(read_csv(out / "flow_trace.csv"));
  EXPECT_EQ(flow.node_count, 5u);
  EXPECT_GT(flow.samples.size(), 2u);
  const auto spectra = spectrum_from_table(read_csv(out / "spectrum_trace.csv"));
  EXPECT_FALSE(spectra.empty());

  // Write/read cycles are exact.
  std::ostringstream a, b;
  write_csv(a, flow_trace_table(flow));
  b << oracle::read_file(out / "flow_trace.csv");
  EXPECT_EQ(a.str(), b.str());

  std::ifstream rin(out / "report.json");
  const auto rep = nlohmann::json::parse(rin);
  EXPECT_EQ(rep["status"], "ok");
  EXPECT_EQ(rep["stage1"]["rank"], 5);
  EXPECT_TRUE(rep["stage1"]["condition_estimate"].is_number());
  EXPECT_EQ(rep["oracle"]["x_star"].size(), 5u);
  EXPECT_EQ(rep["oracle"]["spectrum"].size(), 5u);
  EXPECT_EQ(rep["final"]["nodes"].size(), 5u);
  EXPECT_TRUE(rep["final"].contains("max_spectrum_error"));
  EXPECT_TRUE(rep["consensus"].contains("V_initial"));
}

TEST_F(CliTest, RunIsBitIdentical) {
  const fs::path cfg = write("cfg.json", kSmallRun);
  ASSERT_EQ(run_cli("run --config " + q(cfg) + " --out " + q(dir_ / "a")).code, 0);
  ASSERT_EQ(run_cli("run --config " + q(cfg) + " --out " + q(dir_ / "b")).code, 0);
  for (const char* f : {"stage1_trace.csv", "flow_trace.csv", "spectrum_trace.csv", "report.json"}) {
    const std::string x = oracle::read_file(dir_ / "a" / f);
    EXPECT_FALSE(x.empty()) << f;
    EXPECT_EQ(x, oracle::read_file(dir_ / "b" / f)) << f;
  }
}

TEST_F(CliTest, SeedOverride) {
  const fs::path cfg = write("cfg.json", kSmallRun);
  ASSERT_EQ(run_cli("run --config " + q(cfg) + " --seed 1 --out " + q(dir_ / "a")).code, 0);
  ASSERT_EQ(run_cli("run --config " + q(cfg) + " --seed 1 --out " + q(dir_ / "b")).code, 0);
  ASSERT_EQ(run_cli("run --config " + q(cfg) + " --seed 2 --out " + q(dir_ / "c")).code, 0);
  ASSERT_EQ(run_cli("run --config " + q(cfg) + " --out " + q(dir_ / "d")).code, 0);
  const std::string a = oracle::read_file(dir_ / "a" / "stage1_trace.csv");
  EXPECT_EQ(a, oracle::read_file(dir_ / "b" / "stage1_trace.csv"));
  EXPECT_NE(a, oracle::read_file(dir_ / "c" / "stage1_trace.csv"));
  EXPECT_NE(a, oracle::read_file(dir_ / "d" / "stage1_trace.csv"));
}

TEST_F(CliTest, SingularStageOneExitsThree) {
  const fs::path cfg = write("cfg.json", R"({"scenario":"cyclic-known",
    "graph":{"kind":"complete","n":3},"w":{"kind":"adjacency"},"y0":{"seed":1}})");
  const Outcome o = run_cli("run --config " + q(cfg) + " --out " + q(dir_ / "out"));
  EXPECT_EQ(o.code, kExitSingular);
  EXPECT_NE(o.out.find("status: singular"), std::string::npos);
  std::ifstream rin(dir_ / "out" / "report.json");
  const auto rep = nlohmann::json::parse(rin);
  EXPECT_EQ(rep["stage1"]["rank"], 2);
}

TEST_F(CliTest, PerturbationRescuesCompleteGraph) {
  const fs::path cfg = write("cfg.json", R"({"scenario":"cyclic-unknown",
    "graph":{"kind":"complete","n":3},"w":{"kind":"adjacency"},"y0":{"seed":1},
    "perturbation":{"magnitude":0.1,"seed":2},
    "consensus":{"step":"auto","t_max":2000,"v_tol":1e-16,"sample_every":10}})");
  const Outcome o = run_cli("run --config " + q(cfg) + " --out " + q(dir_ / "out"));
  EXPECT_EQ(o.code, 0) << o.out;
  std::ifstream rin(dir_ / "out" / "report.json");
  const auto rep = nlohmann::json::parse(rin);
  EXPECT_EQ(rep["stage1"]["rank"], 3);
  EXPECT_TRUE(rep.contains("w_bar"));
  EXPECT_TRUE(rep["final"].contains("max_spectrum_error_vs_w_bar"));
}

TEST_F(CliTest, OversizedStepExitsFour) {
  const fs::path cfg = write("cfg.json", R"({"scenario":"cyclic-known",
    "graph":{"kind":"erdos_renyi","n":5,"edge_prob":0.6,"seed":3},
    "w":{"kind":"random_weights","seed":4},"y0":{"seed":5},
    "consensus":{"alpha":10,"beta":10,"step":0.5,"t_max":50,"sample_every":0.5}})");
  const Outcome o = run_cli("run --config " + q(cfg) + " --out " + q(dir_ / "out"));
  EXPECT_EQ(o.code, kExitIntegration);
}

TEST_F(CliTest, ConfigErrors) {
  const std::string out = " --out " + q(dir_ / "out");
  EXPECT_EQ(run_cli("run --config " + q(dir_ / "missing.json")).code, kExitConfig);
  EXPECT_EQ(run_cli("run --config " + q(write("a.json", "{ not json")) + out).code, kExitConfig);
  EXPECT_EQ(run_cli("run --config " + q(write("b.json", R"({"scenario":"cyclic-unknown",
    "graph":{"kind":"path","n":3},"w":{"kind":"adjacency"}})")) + out).code,
            kExitConfig);
  EXPECT_EQ(run_cli("run --config " + q(write("c.json", R"({"scenario":"cyclic-known",
    "graph":{"fixture":"nowhere.json"},"w":{"kind":"fixture"}})")) + out).code,
            kExitConfig);
  EXPECT_EQ(run_cli("run --config " + q(write("d.json", R"({"scenario":"sideways",
    "graph":{"kind":"path","n":3},"w":{"kind":"adjacency"}})")) + out).code,
            kExitConfig);
  EXPECT_EQ(run_cli("run --config " + q(write("e.json", R"({"scenario":"cyclic-known",
    "graph":{"kind":"path","n":3},"w":{"kind":"adjacency"},"consensus":{"alpha":-1}})")) + out).code,
            kExitConfig);
  EXPECT_EQ(run_cli("frobnicate").code, kExitConfig);
  EXPECT_EQ(run_cli("run").code, kExitConfig);
}

TEST_F(CliTest, SweepEmptyMagnitudesIsConfigError) {
  const fs::path cfg = write("cfg.json", R"({"scenario":"cyclic-known",
    "graph":{"kind":"complete","n":3},"w":{"kind":"adjacency"},"sweep":{"magnitudes":[]}})");
  EXPECT_EQ(run_cli("sweep --config " + q(cfg) + " --out " + q(dir_ / "out")).code, kExitConfig);
}

TEST_F(CliTest, SweepCompleteGraph) {
  const fs::path cfg = write("cfg.json", R"({"scenario":"cyclic-known",
    "graph":{"kind":"complete","n":3},"w":{"kind":"adjacency"},
    "sweep":{"magnitudes":[0.0, 0.1],"trials":50,"seed":8}})");
  const Outcome o = run_cli("sweep --config " + q(cfg) + " --out " + q(dir_ / "out"));
  ASSERT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("\n0,50,0,"), std::string::npos) << o.out;
  EXPECT_NE(o.out.find("\n0.10000000000000001,50,1,"), std::string::npos) << o.out;
  const auto trials = sweep_from_table(read_csv(dir_ / "out" / "sweep.csv"));
  ASSERT_EQ(trials.size(), 100u);
  for (const auto& t : trials) EXPECT_EQ(t.rank, t.magnitude > 0 ? 3u : 2u);

  // Command-line magnitudes replace the config list.
  const Outcome o2 = run_cli("sweep --config " + q(cfg) + " --magnitudes 0.2,0.02 --trials 4 --out " +
                             q(dir_ / "out2"));
  ASSERT_EQ(o2.code, 0);
  EXPECT_EQ(sweep_from_table(read_csv(dir_ / "out2" / "sweep.csv")).size(), 8u);
}

TEST_F(CliTest, SweepIsBitIdentical) {
  const fs::path cfg = write("cfg.json", R"({"scenario":"cyclic-known",
    "graph":{"fixture":")" + testpaths::fixture("paper_scenario2_adjacency.json").string() + R"("},
    "w":{"kind":"fixture"},"sweep":{"magnitudes":[0.2,0.02],"trials":20,"seed":1}})");
  ASSERT_EQ(run_cli("sweep --config " + q(cfg) + " --out " + q(dir_ / "a")).code, 0);
  ASSERT_EQ(run_cli("sweep --config " + q(cfg) + " --out " + q(dir_ / "b")).code, 0);
  EXPECT_EQ(oracle::read_file(dir_ / "a" / "sweep.csv"), oracle::read_file(dir_ / "b" / "sweep.csv"));
}

TEST(Config, PresetsParse) {
  const RunConfig s1 = load_config(testpaths::preset("scenario1_paper.json"));
  EXPECT_EQ(s1.scenario, Scenario::CyclicKnown);
  EXPECT_EQ(s1.alpha, 10.0);
  EXPECT_EQ(s1.beta, 10.0);
  EXPECT_TRUE(s1.y0.from_fixture);
  ASSERT_TRUE(s1.reference_spectrum);
  EXPECT_EQ(s1.reference_spectrum->size(), 6u);

  const RunConfig s2 = load_config(testpaths::preset("scenario2_paper.json"));
  EXPECT_EQ(s2.scenario, Scenario::CyclicUnknown);
  EXPECT_EQ(s2.alpha, 100.0);
  EXPECT_EQ(s2.beta, 10.0);
  ASSERT_TRUE(s2.perturbation);
  EXPECT_EQ(s2.perturbation->magnitude, 0.2);
  EXPECT_TRUE(s2.perturbation->fixture);
  EXPECT_FALSE(s2.step.has_value());
}

TEST(Config, ScenarioTwoPresetResolvesToShippedMatrices) {
  const Problem p = resolve_problem(load_config(testpaths::preset("scenario2_paper.json")));
  ASSERT_TRUE(p.used);
  EXPECT_EQ(p.used->w, load_fixture(testpaths::fixture("paper_scenario2_perturbed.json")).assignment.w);
  EXPECT_EQ(p.target.w, load_fixture(testpaths::fixture("paper_scenario2_adjacency.json")).assignment.w);
}

TEST(Config, PerturbedFixtureMustStayWithinMagnitude) {
  nlohmann::json doc = nlohmann::json::parse(oracle::read_file(testpaths::preset("scenario2_paper.json")));
  doc["perturbation"]["magnitude"] = 0.05;
  const RunConfig cfg = config_from_json(doc, testpaths::source_dir() / "presets");
  EXPECT_THROW(resolve_problem(cfg), ConfigError);
}

TEST(Config, SeedOverrideUsesDistinctStreams) {
  nlohmann::json doc = nlohmann::json::parse(kSmallRun);
  RunConfig cfg = config_from_json(doc, ".");
  override_seeds(cfg, 42);
  EXPECT_NE(cfg.graph.seed, cfg.w.seed);
  EXPECT_NE(cfg.w.seed, cfg.y0.seed);
  RunConfig again = config_from_json(doc, ".");
  override_seeds(again, 42);
  EXPECT_EQ(cfg.y0.seed, again.y0.seed);
}
