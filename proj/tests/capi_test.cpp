#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "stochmatch/stochmatch.h"

namespace {

const char* kTriangle = R"({"kind":"general","nodes":["a","b","c"],"edges":[
  {"u":"a","v":"b","p":1,"w":1},{"u":"b","v":"c","p":1,"w":1},{"u":"a","v":"c","p":1,"w":1}]})";

struct Owned {
  char* s = nullptr;
  ~Owned() { sm_string_free(s); }
  std::string str() const { return s ? s : ""; }
};

TEST(CApi, ParseSolveAndFree) {
  sm_instance* inst = nullptr;
  ASSERT_EQ(sm_instance_parse(kTriangle, &inst), SM_OK);
  EXPECT_STREQ(sm_instance_kind(inst), "general");
  EXPECT_EQ(sm_instance_edge_count(inst), 3u);
  Owned gen, deg, dump;
  ASSERT_EQ(sm_solve_lp(inst, SM_LP_GEN, &gen.s, &dump.s), SM_OK);
  EXPECT_NE(gen.str().find("\"objective\": 1.0"), std::string::npos) << gen.str();
  EXPECT_NE(dump.str().find("blossom"), std::string::npos);
  ASSERT_EQ(sm_solve_lp(inst, SM_LP_DEG, &deg.s, nullptr), SM_OK);
  EXPECT_NE(deg.str().find("\"objective\": 1.5"), std::string::npos) << deg.str();
  sm_instance_free(inst);
}

TEST(CApi, ErrorCodesAndMessages) {
  sm_instance* inst = nullptr;
  EXPECT_EQ(sm_instance_parse("{", &inst), SM_PARSE_ERROR);
  EXPECT_NE(std::string(sm_last_error()), "");
  EXPECT_EQ(sm_instance_load("/nonexistent.json", &inst), SM_IO_ERROR);
  ASSERT_EQ(sm_instance_parse(kTriangle, &inst), SM_OK);
  EXPECT_EQ(std::string(sm_last_error()), "");
  Owned out;
  EXPECT_EQ(sm_solve_lp(inst, SM_LP_BIP, &out.s, nullptr), SM_NOT_BIPARTITE);
  EXPECT_EQ(sm_solve_lp(inst, SM_LP_ONL, &out.s, nullptr), SM_INVALID_ARGUMENT);
  EXPECT_EQ(sm_solve_lp(nullptr, SM_LP_GEN, &out.s, nullptr), SM_INVALID_ARGUMENT);
  sm_instance_free(inst);
}

TEST(CApi, ValidateReportsViolations) {
  sm_instance* inst = nullptr;
  ASSERT_EQ(sm_instance_parse(R"({"kind":"general","nodes":["a","b"],
      "edges":[{"u":"a","v":"b","p":0,"w":1}]})",
                              &inst),
            SM_OK);
  int ok = 1;
  Owned report;
  ASSERT_EQ(sm_instance_validate(inst, &ok, &report.s), SM_OK);
  EXPECT_EQ(ok, 0);
  EXPECT_NE(report.str().find("probability out of (0,1]"), std::string::npos);
  sm_offline_options opt;
  sm_offline_options_default(&opt);
  Owned csv;
  EXPECT_EQ(sm_simulate_offline(inst, &opt, &csv.s, nullptr), SM_VALIDATION_FAILED);
  sm_instance_free(inst);
}

TEST(CApi, GenerateRoundTrip) {
  sm_generator_spec spec;
  sm_generator_spec_default(&spec);
  spec.kind = "online";
  spec.left = 3;
  spec.right = 4;
  sm_instance* a = nullptr;
  ASSERT_EQ(sm_generate(&spec, 9, &a), SM_OK);
  Owned text, again;
  ASSERT_EQ(sm_instance_to_json(a, &text.s), SM_OK);
  sm_instance* b = nullptr;
  ASSERT_EQ(sm_instance_parse(text.s, &b), SM_OK);
  ASSERT_EQ(sm_instance_to_json(b, &again.s), SM_OK);
  EXPECT_EQ(text.str(), again.str());
  spec.kind = "nonsense";
  sm_instance* c = nullptr;
  EXPECT_EQ(sm_generate(&spec, 9, &c), SM_INVALID_ARGUMENT);
  sm_instance_free(a);
  sm_instance_free(b);
}

TEST(CApi, SimulationsAreSeeded) {
  sm_instance* inst = nullptr;
  ASSERT_EQ(sm_instance_parse(kTriangle, &inst), SM_OK);
  sm_offline_options opt;
  sm_offline_options_default(&opt);
  opt.policy = "alg1";
  opt.trials = 200;
  opt.seed = 5;
  Owned a, b, summary;
  ASSERT_EQ(sm_simulate_offline(inst, &opt, &a.s, &summary.s), SM_OK);
  ASSERT_EQ(sm_simulate_offline(inst, &opt, &b.s, nullptr), SM_OK);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().rfind("trial,profit,probes,decision\n", 0), 0u);
  EXPECT_NE(summary.str().find("\"mean\""), std::string::npos);
  opt.policy = "basic";
  Owned bad;
  EXPECT_EQ(sm_simulate_offline(inst, &opt, &bad.s, nullptr), SM_INVALID_ARGUMENT);
  sm_instance_free(inst);
}

TEST(CApi, Constants) {
  double delta = 0.0, ratio = 0.0, g = 0.0;
  ASSERT_EQ(sm_optimize_delta(SM_MODE_GENERAL, &delta, &ratio), SM_OK);
  EXPECT_NEAR(1.0 / ratio, 3.709, 1e-3);
  ASSERT_EQ(sm_attenuation_g(1.0, &g), SM_OK);
  EXPECT_EQ(g, 1.0 / 3.0);
  EXPECT_EQ(sm_attenuation_h(0.0, &g), SM_INVALID_ARGUMENT);
}

TEST(CApi, OracleJson) {
  sm_instance* inst = nullptr;
  ASSERT_EQ(sm_instance_parse(kTriangle, &inst), SM_OK);
  Owned out;
  ASSERT_EQ(sm_oracle(inst, &out.s), SM_OK);
  EXPECT_NE(out.str().find("\"expected_opt\": 1.0"), std::string::npos) << out.str();
  EXPECT_NE(out.str().find("\"lp\": \"gen\""), std::string::npos);
  sm_instance_free(inst);
}

}  // namespace
