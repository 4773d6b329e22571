#include <filesystem>

#include <gtest/gtest.h>

#include "horolab/error.hpp"
#include "horolab/json_io.hpp"
#include "horolab/verify.hpp"

using namespace horolab;

TEST(Verify, EverySuitePasses) {
  for (const auto& name : suite_names()) {
    const SuiteResult r = run_suite(name);
    for (const auto& c : r.checks) EXPECT_TRUE(c.passed) << name << " / " << c.name << ": " << c.detail;
    EXPECT_TRUE(r.passed());
    const Json j = Json::parse(r.to_json());
    EXPECT_EQ(j["suite"], name);
    EXPECT_EQ(j["checks"].size(), r.checks.size());
  }
}

TEST(Verify, BoundsSuiteWritesReport) {
  const auto dir = std::filesystem::temp_directory_path() / "horolab_verify_test";
  std::filesystem::remove_all(dir);
  VerifyOptions opt;
  opt.out_dir = dir.string();
  ASSERT_TRUE(run_suite("bounds", opt).passed());
  const Json report = load_json_file((dir / "bound_report.json").string());
  EXPECT_GT(report["D2"].get<double>(), 0.0);
  EXPECT_FALSE(report["c_dJ"].empty());
  EXPECT_TRUE(std::filesystem::exists(dir / "bound_report.csv"));
  std::filesystem::remove_all(dir);
}

TEST(Verify, Errors) {
  EXPECT_THROW(run_suite("nope"), ArgumentError);
  EXPECT_THROW(run_criterion(0), ArgumentError);
  EXPECT_THROW(run_criterion(kCriterionCount + 1), ArgumentError);
}
