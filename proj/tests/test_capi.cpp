#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "horolab/horolab.h"

namespace {

const char* kLine = R"({"dims":[2],"rates":[1],"factors":[[[0,1]]]})";
const char* kDiagonal = R"({"dims":[2,2],"rates":[1,1],"factors":[[[0,1]],[[0,1]]]})";

struct Curve {
  hl_curve* p = nullptr;
  ~Curve() { hl_curve_free(p); }
};

}  // namespace

TEST(CApi, StatusAndErrors) {
  EXPECT_STREQ(hl_status_name(HL_OK), "ok");
  hl_curve* c = nullptr;
  EXPECT_EQ(hl_curve_from_json("{", &c), HL_ERR_PARSE);
  EXPECT_EQ(c, nullptr);
  EXPECT_NE(std::string(hl_last_error()), "");
  EXPECT_EQ(hl_curve_from_json(nullptr, &c), HL_ERR_NULL);
  EXPECT_EQ(hl_curve_from_json(R"({"dims":[2],"rates":[1],"factors":[[[0,1],[1]]]})", &c), HL_ERR_ARGUMENT);
  EXPECT_EQ(hl_curve_load("/nonexistent.json", &c), HL_ERR_IO);
  double x = 0;
  EXPECT_EQ(hl_haar_cusp_fraction(0.5, &x), HL_ERR_ARGUMENT);
  EXPECT_EQ(hl_haar_cusp_fraction(3.0, &x), HL_OK);
  EXPECT_STREQ(hl_last_error(), "");
  EXPECT_NEAR(x, 1 / M_PI, 1e-15);
  EXPECT_EQ(hl_c_dJ(1, 0, 1, &x), HL_OK);
  EXPECT_NEAR(x, 0.5, 1e-9);
  hl_curve_free(nullptr);
  hl_report_free(nullptr);
}

TEST(CApi, CurveEval) {
  Curve c;
  ASSERT_EQ(hl_curve_from_json(R"({"dims":[2,3],"rates":[1,1],"factors":[[[0,1]],[[1],[0,0,1]]]})", &c.p), HL_OK);
  int k = 0;
  ASSERT_EQ(hl_curve_factor_count(c.p, &k), HL_OK);
  EXPECT_EQ(k, 2);
  double buf[3];
  size_t n = 0;
  EXPECT_EQ(hl_curve_eval(c.p, 0.5, buf, 2, &n), HL_ERR_ARGUMENT);
  EXPECT_EQ(n, 3u);
  ASSERT_EQ(hl_curve_eval(c.p, 0.5, buf, 3, &n), HL_OK);
  EXPECT_DOUBLE_EQ(buf[0], 0.5);
  EXPECT_DOUBLE_EQ(buf[1], 1.0);
  EXPECT_DOUBLE_EQ(buf[2], 0.25);
}

TEST(CApi, Obstruct) {
  Curve c;
  ASSERT_EQ(hl_curve_from_json(kDiagonal, &c.p), HL_OK);
  double measure = -1;
  char* diag = nullptr;
  ASSERT_EQ(hl_obstruct_json(c.p, R"({"partition":[[1,2]],"m":[2],"mobius":"identity"})", 1e-9, 101, &measure, &diag),
            HL_OK);
  EXPECT_EQ(measure, 1.0);
  ASSERT_NE(diag, nullptr);
  EXPECT_NE(std::string(diag).find("\"kind\": \"mobius\""), std::string::npos);
  hl_string_free(diag);

  hl_unstable_spec* u = nullptr;
  ASSERT_EQ(hl_unstable_spec_from_json(c.p, R"({"powers":[1,0],"null_vectors":[[2,2,1],[1,0,0]]})", &u), HL_OK);
  ASSERT_EQ(hl_obstruct_unstable(c.p, u, 1e-9, 101, &measure, nullptr), HL_OK);
  EXPECT_EQ(measure, 0.0);
  hl_unstable_spec_free(u);

  hl_mobius_spec* m = nullptr;
  EXPECT_EQ(hl_mobius_spec_from_json(c.p, R"({"partition":[[1]],"m":[1]})", &m), HL_ERR_ARGUMENT);
  EXPECT_EQ(m, nullptr);
  EXPECT_EQ(hl_obstruct_json(c.p, R"({"powers":[1,1],"null_vectors":[[1,1,1],[1,0,0]]})", 1e-9, 101, &measure, nullptr),
            HL_ERR_CONSISTENCY);
}

TEST(CApi, Verify) {
  int passed = 0;
  char* result = nullptr;
  ASSERT_EQ(hl_verify_suite("core", 7, nullptr, &passed, &result), HL_OK);
  EXPECT_EQ(passed, 1);
  EXPECT_NE(std::string(result).find("\"suite\": \"core\""), std::string::npos);
  hl_string_free(result);
  EXPECT_EQ(hl_verify_suite("nope", 7, nullptr, &passed, nullptr), HL_ERR_ARGUMENT);
  ASSERT_EQ(hl_verify_criterion(3, 7, &passed, nullptr), HL_OK);
  EXPECT_EQ(passed, 1);
  EXPECT_EQ(hl_verify_criterion(13, 7, &passed, nullptr), HL_ERR_ARGUMENT);
}

TEST(CApi, Experiment) {
  const auto dir = std::filesystem::temp_directory_path() / "horolab_capi_test";
  std::filesystem::remove_all(dir);
  const std::string cfg = std::string(R"({"curve":)") + kLine + R"(,"t":[2,6],"s":[0.2,0.4],"eta_count":50,"seed":3})";
  hl_report* r = nullptr;
  ASSERT_EQ(hl_experiment_run_json(cfg.c_str(), &r), HL_OK);
  size_t n = 0;
  ASSERT_EQ(hl_report_sample_count(r, &n), HL_OK);
  EXPECT_EQ(n, 200u);
  double cusp = -1;
  ASSERT_EQ(hl_report_cusp_fraction(r, 1, 0, 2.0, &cusp), HL_OK);
  EXPECT_GE(cusp, 0.0);
  EXPECT_LE(cusp, 1.0);
  EXPECT_EQ(hl_report_cusp_fraction(r, 2, 0, 2.0, &cusp), HL_ERR_ARGUMENT);
  EXPECT_EQ(hl_report_cusp_fraction(r, 0, 1, 2.0, &cusp), HL_ERR_ARGUMENT);

  char* csv = nullptr;
  ASSERT_EQ(hl_report_csv(r, &csv), HL_OK);
  EXPECT_EQ(std::string(csv).rfind("s,t,eta,re_z,im_z,theta,factor\n", 0), 0u);
  hl_string_free(csv);

  const std::string json = (dir / "r.json").string(), svg = (dir / "svg").string();
  ASSERT_EQ(hl_report_set_outputs(r, json.c_str(), "", svg.c_str()), HL_OK);
  ASSERT_EQ(hl_report_write(r), HL_OK);
  EXPECT_TRUE(std::filesystem::exists(json));
  EXPECT_FALSE(std::filesystem::is_empty(svg));
  hl_report_free(r);
  std::filesystem::remove_all(dir);

  const std::string late = std::string(R"({"curve":)") + kLine + R"(,"t":[13],"s":[0.2],"eta_count":5})";
  EXPECT_EQ(hl_experiment_run_json(late.c_str(), &r), HL_ERR_PRECISION);
  EXPECT_EQ(hl_experiment_run_file("/nonexistent.json", &r), HL_ERR_IO);
}
