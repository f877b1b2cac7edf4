#include <gtest/gtest.h>

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qsd/cli.hpp"

using namespace qsd;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "qsd");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("qsd_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    ::unsetenv("QSD_SEED");
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write_state(const std::string& name, const HermitianOperator& op) const {
    std::ofstream(path(name)) << io::to_json(op).dump();
    return path(name);
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, ComputeSdOfEqualFilesIsZero) {
  const auto rho = write_state("rho.json", HermitianOperator::diagonal({0.25, 0.75}));
  const auto r = run({"compute", "--measure", "sd", "--alpha", "0.5", rho, rho});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "0\n");
}

TEST_F(CliTest, ComputeReOfDistinctPureStatesIsInf) {
  const auto a = write_state("a.json", HermitianOperator::diagonal({1.0, 0.0}));
  const auto b = write_state("b.json", HermitianOperator::diagonal({0.0, 1.0}));
  const auto r = run({"compute", "--measure", "re", a, b});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "inf\n");
}

TEST_F(CliTest, ComputeTraceDistanceOnTightFamily) {
  const auto a = write_state("a.json", HermitianOperator::diagonal({0.3, 0.0, 0.7}));
  const auto b = write_state("b.json", HermitianOperator::diagonal({0.0, 0.3, 0.7}));
  const auto r = run({"compute", "--measure", "trace-dist", a, b});
  EXPECT_EQ(r.code, 0);
  EXPECT_NEAR(std::stod(r.out), 0.3, 1e-15);
}

TEST_F(CliTest, ComputeEveryMeasure) {
  ASSERT_EQ(run({"random", "state", "--dim", "3", "--seed", "1", "--out", path("a.json")}).code, 0);
  ASSERT_EQ(run({"random", "state", "--dim", "3", "--seed", "2", "--out", path("b.json")}).code, 0);
  ASSERT_EQ(run({"random", "ensemble", "--dim", "3", "--n", "2", "--seed", "3", "--out", path("e.json")}).code, 0);
  ASSERT_EQ(run({"random", "hamiltonian", "--dim", "3", "--seed", "4", "--out", path("h1.json")}).code, 0);
  ASSERT_EQ(run({"random", "hamiltonian", "--dim", "3", "--seed", "5", "--out", path("h2.json")}).code, 0);
  const auto a = path("a.json");
  const auto b = path("b.json");
  const DensityMatrix ra = io::state_from_json(io::read_json_file(a));
  const DensityMatrix rb = io::state_from_json(io::read_json_file(b));

  auto value = [](const Result& r) {
    EXPECT_EQ(r.code, 0) << r.err;
    return std::stod(r.out);
  };
  EXPECT_DOUBLE_EQ(value(run({"compute", "--measure", "entropy", a})), von_neumann_entropy(ra));
  EXPECT_DOUBLE_EQ(value(run({"compute", "--measure", "re", a, b})), relative_entropy(ra, rb).value);
  EXPECT_DOUBLE_EQ(value(run({"compute", "--measure", "sd", "--alpha", "0.3", a, b})),
                   skew_divergence(ra, rb, SkewParameter(0.3)));
  EXPECT_DOUBLE_EQ(value(run({"compute", "--measure", "dsd", "--alpha", "0.3", a, b})),
                   differential_skew_divergence(ra, rb, 0.3));
  EXPECT_DOUBLE_EQ(value(run({"compute", "--measure", "fidelity", a, b})), fidelity(ra, rb));
  EXPECT_DOUBLE_EQ(value(run({"compute", "--measure", "chi2log", a, b})), chi2_log(ra, rb));
  const Ensemble e = io::ensemble_from_json(io::read_json_file(path("e.json")));
  EXPECT_DOUBLE_EQ(value(run({"compute", "--measure", "chi", path("e.json")})), holevo_chi(e));
  const auto h1 = io::operator_from_json(io::read_json_file(path("h1.json")));
  const auto h2 = io::operator_from_json(io::read_json_file(path("h2.json")));
  EXPECT_DOUBLE_EQ(value(run({"compute", "--measure", "mixing-rate", path("e.json"), path("h1.json"), path("h2.json")})),
                   mixing_rate(MixingExperiment(e, h1, h2, 0.0)));
  EXPECT_TRUE(std::isfinite(
      value(run({"compute", "--measure", "mixing-rate", "--t", "0.5", path("e.json"), path("h1.json"), path("h2.json")}))));
}

TEST_F(CliTest, ComputeExitCodes) {
  const auto rho = write_state("rho.json", HermitianOperator::diagonal({0.5, 0.5}));
  EXPECT_EQ(run({"compute", "--measure", "sd", "--alpha", "1.5", rho, rho}).code, 3);
  EXPECT_EQ(run({"compute", "--measure", "sd", rho, rho}).code, 2);
  EXPECT_EQ(run({"compute", "--measure", "nonsense", rho}).code, 2);
  EXPECT_EQ(run({"compute", "--measure", "entropy", rho, rho}).code, 2);
  EXPECT_EQ(run({"compute", "--measure", "entropy", path("missing.json")}).code, 4);
  std::ofstream(path("bad.json")) << "{oops";
  EXPECT_EQ(run({"compute", "--measure", "entropy", path("bad.json")}).code, 2);
  const auto not_state = write_state("ns.json", HermitianOperator::diagonal({0.5, 0.6}));
  EXPECT_EQ(run({"compute", "--measure", "entropy", not_state}).code, 3);
  EXPECT_EQ(run({}).code, 2);
}

TEST_F(CliTest, RandomIsDeterministicPerSeed) {
  for (const char* kind : {"state", "ensemble", "hamiltonian", "channel"}) {
    ASSERT_EQ(run({"random", kind, "--dim", "3", "--seed", "9", "--out", path("x.json")}).code, 0);
    ASSERT_EQ(run({"random", kind, "--dim", "3", "--seed", "9", "--out", path("y.json")}).code, 0);
    EXPECT_EQ(slurp(path("x.json")), slurp(path("y.json"))) << kind;
  }
}

TEST_F(CliTest, RandomOutputsValidate) {
  ASSERT_EQ(run({"random", "state", "--dim", "4", "--out", path("s.json")}).code, 0);
  EXPECT_NO_THROW(io::state_from_json(io::read_json_file(path("s.json"))));
  ASSERT_EQ(run({"random", "ensemble", "--dim", "4", "--n", "3", "--out", path("e.json")}).code, 0);
  const auto j = io::read_json_file(path("e.json"));
  double total = 0.0;
  for (const auto& w : j["weights"]) total += w.get<double>();
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_EQ(j["states"].size(), 3u);
  ASSERT_EQ(run({"random", "channel", "--dim", "2", "--n", "3", "--out", path("c.json")}).code, 0);
  EXPECT_LE(kraus_completeness_defect(io::channel_from_json(io::read_json_file(path("c.json")))), 1e-10);
  const auto stdout_run = run({"random", "hamiltonian", "--dim", "2"});
  EXPECT_EQ(stdout_run.code, 0);
  EXPECT_NO_THROW(io::operator_from_json(io::parse_text(stdout_run.out)));
}

TEST_F(CliTest, RandomErrors) {
  EXPECT_EQ(run({"random", "state", "--dim", "0"}).code, 2);
  EXPECT_EQ(run({"random", "widget", "--dim", "2"}).code, 2);
  EXPECT_EQ(run({"random", "state", "--dim", "2", "--out", path("no/such/dir/x.json")}).code, 4);
}

TEST_F(CliTest, SeedEnvironmentOverridesDefault) {
  ASSERT_EQ(run({"random", "state", "--dim", "3", "--out", path("default.json")}).code, 0);
  ASSERT_EQ(run({"random", "state", "--dim", "3", "--seed", "42", "--out", path("explicit.json")}).code, 0);
  EXPECT_EQ(slurp(path("default.json")), slurp(path("explicit.json")));
  ::setenv("QSD_SEED", "7", 1);
  ASSERT_EQ(run({"random", "state", "--dim", "3", "--out", path("env.json")}).code, 0);
  ::unsetenv("QSD_SEED");
  ASSERT_EQ(run({"random", "state", "--dim", "3", "--seed", "7", "--out", path("seven.json")}).code, 0);
  EXPECT_EQ(slurp(path("env.json")), slurp(path("seven.json")));
  EXPECT_NE(slurp(path("env.json")), slurp(path("default.json")));
}

TEST_F(CliTest, VerifyWritesReportAndExitsZero) {
  const auto r = run({"verify", "--suite", "core", "--dims", "2,3", "--trials", "3", "--seed", "1", "--out", path("r.json")});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = io::read_json_file(path("r.json"));
  EXPECT_EQ(j["suite"], "core");
  EXPECT_EQ(j["seed"], 1);
  EXPECT_EQ(j["trials"], 3);
  EXPECT_EQ(j["dims"], (io::json{2, 3}));
  EXPECT_EQ(j["total_violations"], 0);
}

TEST_F(CliTest, VerifyIsDeterministic) {
  const std::vector<std::string> args{"verify", "--suite", "frechet", "--dims", "2", "--trials", "2", "--seed", "5"};
  auto a = io::parse_text(run(args).out);
  auto b = io::parse_text(run(args).out);
  a.erase("wall_time");
  b.erase("wall_time");
  EXPECT_EQ(a, b);
}

TEST_F(CliTest, VerifyUsageErrors) {
  EXPECT_EQ(run({"verify", "--trials", "0"}).code, 2);
  EXPECT_EQ(run({"verify", "--dims", "2,x"}).code, 2);
  EXPECT_EQ(run({"verify", "--dims", "0"}).code, 2);
  EXPECT_EQ(run({"verify", "--suite", "nope"}).code, 2);
}

TEST_F(CliTest, VerifyReportsViolationsWithExitOne) {
  EXPECT_EQ(run({"verify", "--suite", "core", "--dims", "2", "--trials", "1", "--tol", "-1"}).code, 2);
  // At zero tolerance the rounding residual of an identity check counts as a violation.
  const auto r = run({"verify", "--suite", "sim", "--dims", "3", "--trials", "4", "--seed", "3", "--tol", "0", "--out",
                      path("strict.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("violation: sim.sd_representation"), std::string::npos);
  const auto j = io::read_json_file(path("strict.json"));
  EXPECT_GT(j["total_violations"].get<int>(), 0);
  bool embedded = false;
  for (const auto& c : j["checks"])
    if (c["check_id"] == "sim.sd_representation") embedded = c.contains("worst_case_inputs");
  EXPECT_TRUE(embedded);
}
