#include <gtest/gtest.h>

#include "zfqft/experiments.hpp"

using namespace zfqft;

namespace {
std::string parse_error(const std::string& text) {
  try {
    parse_config_string(text, "cfg.toml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}
}  // namespace

TEST(Config, Defaults) {
  Config c = parse_config_string("");
  EXPECT_EQ(c.seed, 1u);
  EXPECT_FALSE(c.smatrix.has_value());
  EXPECT_EQ(c.smatrix_list().size(), 4u);
  EXPECT_EQ(c.tolerance("zf"), 1e-10);
  EXPECT_EQ(c.tolerance("car"), 1e-12);
  EXPECT_EQ(c.scatter.check, "kernel");
  EXPECT_THROW(c.tolerance("nonsense"), ConfigError);
}

TEST(Config, FullExample) {
  Config c = parse_config_string(R"(
seed = 42
smatrix = { kind = "sinh_factor", b = 0.7853981633974483 }
grid = { theta_min = -1.5, theta_max = 1.5, n_points = 20 }
truncation = 2
[tolerances]
zf = 1e-9
[locality]
mode = "majorana"
component = -1
separations = [0.0, 4.0]
[scatter]
check = "pfg"
out = [{ kind = "bump", center = -0.5, width = 0.3 }]
chi = { rap_lo = -3.0, rap_hi = 3.0 }
[formfactors]
family = "free-majorana"
sign = -1
[car]
sizes = [[1, 1], [2, 2]]
)");
  EXPECT_EQ(c.seed, 42u);
  ASSERT_TRUE(c.smatrix.has_value());
  EXPECT_EQ(c.smatrix->kind(), SKind::sinh_factor);
  EXPECT_EQ(c.grid->n_points, 20);
  EXPECT_EQ(*c.truncation, 2);
  EXPECT_EQ(c.tolerance("zf"), 1e-9);
  EXPECT_TRUE(c.locality.explicit_mode);
  EXPECT_EQ(c.locality.mode, LocalityMode::majorana_vs_phiprime);
  EXPECT_EQ(c.locality.component, -1);
  EXPECT_EQ(c.scatter.out.size(), 1u);
  EXPECT_EQ(c.scatter.chi.rap_hi, 3.0);
  EXPECT_EQ(c.ff.params.sign, -1);
  EXPECT_EQ(c.car.sizes.size(), 2u);
}

TEST(Config, StringDescriptorForS) {
  Config c = parse_config_string("smatrix = \"const:-1\"\n");
  EXPECT_TRUE(c.smatrix->is_constant(-1));
  Config p = parse_config_string("smatrix = { kind = \"product\", bs = [0.5, 1.0] }\n");
  EXPECT_EQ(p.smatrix->parameters().size(), 2u);
}

TEST(Config, SyntaxErrorsCarryLineAndColumn) {
  std::string e = parse_error("seed = 1\n[scatter\ncheck = \"pfg\"\n");
  EXPECT_EQ(e.rfind("cfg.toml:2:", 0), 0u) << e;
}

TEST(Config, SemanticErrorsCarryLineAndColumn) {
  EXPECT_EQ(parse_error("seed = 1\n[scatter]\nchek = 1\n").rfind("cfg.toml:3:1", 0), 0u);
  std::string e = parse_error("seed = 1\n\n[tolerances]\nzf = -1.0\n");
  EXPECT_EQ(e.rfind("cfg.toml:4:", 0), 0u) << e;
  EXPECT_NE(e.find("positive"), std::string::npos);
}

TEST(Config, RejectsBadValues) {
  EXPECT_FALSE(parse_error("seed = -3\n").empty());
  EXPECT_FALSE(parse_error("seed = \"x\"\n").empty());
  EXPECT_FALSE(parse_error("truncation = 9\n").empty());
  EXPECT_FALSE(parse_error("grid = { theta_min = 1.0, theta_max = -1.0 }\n").empty());
  EXPECT_FALSE(parse_error("smatrix = \"wobble:1\"\n").empty());
  EXPECT_FALSE(parse_error("[tolerances]\nmystery = 1e-3\n").empty());
  EXPECT_FALSE(parse_error("[formfactors]\nfamily = \"sine-gordon\"\n").empty());
  EXPECT_FALSE(parse_error("[car]\nsizes = [[4, 4]]\n").empty());
  EXPECT_FALSE(parse_error("[scatter]\ncheck = \"everything\"\n").empty());
  EXPECT_FALSE(parse_error("[locality]\ncomponent = 3\n").empty());
}

TEST(Config, ToleranceOverrides) {
  Config c;
  c.apply_override("zf=1e-6");
  EXPECT_EQ(c.tolerance("zf"), 1e-6);
  EXPECT_THROW(c.apply_override("zf"), ConfigError);
  EXPECT_THROW(c.apply_override("zf=abc"), ConfigError);
  EXPECT_THROW(c.apply_override("zf=-1"), ConfigError);
  EXPECT_THROW(c.apply_override("what=1"), ConfigError);
}

TEST(Config, MissingFile) { EXPECT_THROW(load_config("/nonexistent/zfqft.toml"), ConfigError); }

TEST(Report, SchemaAndDeterministicLayout) {
  Config c;
  c.symmetry.samples = 20;
  Outcome a = run_check_smatrix(c), b = run_check_smatrix(c);
  Json ja = report_json(c, a), jb = report_json(c, b);
  EXPECT_EQ(ja["schema"], 1);
  EXPECT_EQ(ja["tool"], "zfqft");
  EXPECT_EQ(ja["command"], "check-smatrix");
  EXPECT_TRUE(ja["passed"].get<bool>());
  EXPECT_EQ(ja.dump(), jb.dump());
  EXPECT_EQ(ja["result"]["rows"].size(), 4u);
}

TEST(Report, GradedPermuteExamplesPass) {
  Outcome o;
  Json rows = graded_permute_examples(3, 1e-12, o);
  EXPECT_EQ(rows.size(), 4u);
  EXPECT_TRUE(o.passed);
}
