#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "qsd/verify.hpp"

using namespace qsd;
using namespace qsd::verify;

TEST(Registry, CoversEveryInvariant) {
  EXPECT_NO_THROW(assert_registry_complete(registry()));
  EXPECT_TRUE(uncovered_invariants(registry()).empty());
}

TEST(Registry, CompletenessAssertionDetectsGaps) {
  std::vector<Check> partial(registry().begin(), registry().end());
  partial.erase(std::remove_if(partial.begin(), partial.end(),
                               [](const Check& c) { return c.invariant == "sd-range"; }),
                partial.end());
  EXPECT_THROW(assert_registry_complete(partial), std::logic_error);
  EXPECT_EQ(uncovered_invariants(partial), std::vector<std::string>{"sd-range"});

  std::vector<Check> dup(registry().begin(), registry().end());
  dup.push_back(dup.front());
  EXPECT_THROW(assert_registry_complete(dup), std::logic_error);
}

TEST(Registry, EveryModuleIsRepresented) {
  std::set<std::string> modules;
  for (const auto& inv : invariant_catalog()) modules.insert(inv.module);
  EXPECT_EQ(modules, (std::set<std::string>{"hermitian-core", "divergence-measures", "frechet-calculus",
                                            "ensemble-analysis"}));
}

TEST(RunCheck, CountsViolationsAndEmbedsWorstCase) {
  Check failing{"test.failing", "", "slack = -1 on odd trials", Suite::core, 0.5, 1, [](std::size_t d, Rng& rng) {
                  const bool odd = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
                  return TrialResult{odd ? -1.0 : 1.0, {{"rho", random_state(d, rng).op()}}, {{"odd", odd ? 1.0 : 0.0}}};
                }};
  const std::vector<std::size_t> dims{2, 3};
  const auto rec = run_check(failing, dims, 20, 1, 1e-8);
  EXPECT_EQ(rec.trials, 40u);
  EXPECT_GT(rec.violations, 0u);
  EXPECT_LT(rec.violations, 40u);
  EXPECT_DOUBLE_EQ(rec.worst_slack, -1.0);
  EXPECT_DOUBLE_EQ(rec.tolerance, 0.5);
  ASSERT_TRUE(rec.worst_case_inputs.has_value());
  EXPECT_EQ((*rec.worst_case_inputs)["states"]["rho"]["format"], "qsd-state-v1");
}

TEST(RunCheck, SlackWithinToleranceIsNotAViolation) {
  Check near{"test.near", "", "slack = -1e-9", Suite::core, std::nullopt, 1,
             [](std::size_t, Rng&) { return TrialResult{-1e-9, {}, {}}; }};
  const std::vector<std::size_t> dims{2};
  const auto rec = run_check(near, dims, 5, 1, 1e-8);
  EXPECT_EQ(rec.violations, 0u);
  EXPECT_FALSE(rec.worst_case_inputs.has_value());
  EXPECT_EQ(run_check(near, dims, 5, 1, 1e-10).violations, 5u);
}

TEST(RunCheck, ExceptionsAreViolations) {
  Check throwing{"test.throwing", "", "throws", Suite::core, std::nullopt, 1,
                 [](std::size_t, Rng&) -> TrialResult { throw DomainError("boom"); }};
  const std::vector<std::size_t> dims{2};
  const auto rec = run_check(throwing, dims, 3, 1, 1e-8);
  EXPECT_EQ(rec.violations, 3u);
  ASSERT_TRUE(rec.first_error.has_value());
  EXPECT_NE(rec.first_error->find("boom"), std::string::npos);
}

TEST(RunSuite, CoreSuitePassesAndIsDeterministic) {
  const std::vector<std::size_t> dims{2, 3};
  const auto a = run_suite("core", dims, 4, 42);
  const auto b = run_suite("core", dims, 4, 42);
  EXPECT_TRUE(a.passed());
  ASSERT_EQ(a.checks.size(), b.checks.size());
  for (std::size_t i = 0; i < a.checks.size(); ++i) {
    EXPECT_EQ(a.checks[i].id, b.checks[i].id);
    EXPECT_EQ(a.checks[i].worst_slack, b.checks[i].worst_slack);
  }
  auto ja = a.to_json();
  auto jb = b.to_json();
  ja.erase("wall_time");
  jb.erase("wall_time");
  EXPECT_EQ(ja, jb);
}

TEST(RunSuite, StreamsDependOnCheckNotSelection) {
  const std::vector<std::size_t> dims{2};
  const auto core = run_suite("core", dims, 3, 7);
  const auto all = run_suite("all", dims, 3, 7);
  for (const auto& c : core.checks) {
    const auto it = std::find_if(all.checks.begin(), all.checks.end(), [&](const CheckRecord& r) { return r.id == c.id; });
    ASSERT_NE(it, all.checks.end());
    EXPECT_EQ(it->worst_slack, c.worst_slack);
  }
}

TEST(RunSuite, ReportShape) {
  const std::vector<std::size_t> dims{2};
  const auto rep = run_suite("sim", dims, 2, 5);
  const auto j = rep.to_json();
  for (const char* key : {"suite", "seed", "dims", "trials", "tolerance", "checks", "coverage", "wall_time"})
    EXPECT_TRUE(j.contains(key)) << key;
  ASSERT_FALSE(j["checks"].empty());
  for (const auto& c : j["checks"]) {
    for (const char* key : {"check_id", "label", "trials", "worst_slack", "violations", "tolerance"})
      EXPECT_TRUE(c.contains(key)) << key;
    EXPECT_EQ(c["suite"], "sim");
  }
}

TEST(RunSuite, RejectsBadArguments) {
  const std::vector<std::size_t> dims{2};
  const std::vector<std::size_t> zero_dim{0};
  EXPECT_THROW(run_suite("bogus", dims, 1, 1), DomainError);
  EXPECT_THROW(run_suite("core", dims, 0, 1), DomainError);
  EXPECT_THROW(run_suite("core", zero_dim, 1, 1), DomainError);
}
