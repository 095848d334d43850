#include <gtest/gtest.h>

#include "zfqft/smatrix.hpp"

using namespace zfqft;

TEST(SMatrix, ConstantsEvaluate) {
  EXPECT_EQ(ScatteringFunction::constant(1)(cplx(0.3, 0.2)), cplx(1.0));
  for (cplx z : {cplx(0.0), cplx(-2.0, 1.0), cplx(5.0, 3.0)}) EXPECT_EQ(ScatteringFunction::constant(-1)(z), cplx(-1.0));
}

TEST(SMatrix, SinhFactorAtZeroIsMinusOne) {
  auto S = ScatteringFunction::sinh_factor(pi / 4);
  EXPECT_NEAR(std::abs(S(0.0) - cplx(-1.0)), 0.0, 1e-15);
  // closed form at a generic point
  cplx z(0.4, 0.9);
  cplx want = (std::sinh(z) - I * std::sin(pi / 4)) / (std::sinh(z) + I * std::sin(pi / 4));
  EXPECT_LT(std::abs(S(z) - want), 1e-14);
}

TEST(SMatrix, ProductMultipliesFactors) {
  auto P = ScatteringFunction::product({pi / 4, 1.2});
  cplx z(0.7, 0.3);
  EXPECT_LT(std::abs(P(z) - ScatteringFunction::sinh_factor(pi / 4)(z) * ScatteringFunction::sinh_factor(1.2)(z)),
            1e-14);
}

TEST(SMatrix, ParseDescriptors) {
  EXPECT_TRUE(ScatteringFunction::parse("const:-1").is_constant(-1));
  EXPECT_EQ(ScatteringFunction::parse("sinh:0.5").kind(), SKind::sinh_factor);
  EXPECT_EQ(ScatteringFunction::parse("product:0.5,1.0").parameters().size(), 2u);
  EXPECT_THROW(ScatteringFunction::parse("nope:1"), ConfigError);
  EXPECT_THROW(ScatteringFunction::parse("sinh"), ConfigError);
  EXPECT_THROW(ScatteringFunction::parse("sinh:abc"), ConfigError);
}

TEST(SMatrix, MinusOneResidualsVanish) {
  auto r = verify_symmetries(ScatteringFunction::constant(-1), strip_samples(100), 1e-12);
  EXPECT_EQ(r.max_residual(), 0.0);
  EXPECT_TRUE(r.passed());
}

TEST(SMatrix, BuiltinsPassOnHaltonSamples) {
  auto samples = strip_samples(200);
  for (const auto& S : {ScatteringFunction::constant(1), ScatteringFunction::sinh_factor(pi / 4),
                        ScatteringFunction::sinh_factor(0.3), ScatteringFunction::product({pi / 4, 1.2})}) {
    auto r = verify_symmetries(S, samples, 1e-12);
    EXPECT_TRUE(r.passed()) << S.descriptor() << " " << r.max_residual();
  }
}

TEST(SMatrix, RealLineUnitarity) {
  auto S = ScatteringFunction::product({0.4, 1.1, 2.0});
  for (double t = -3; t <= 3; t += 0.25) EXPECT_NEAR(std::abs(S(t) * S(-t) - cplx(1.0)), 0.0, 1e-13);
}

TEST(SMatrix, ExponentialIsRejected) {
  auto bad = ScatteringFunction::custom("exp", [](cplx z) { return std::exp(z); });
  auto r = verify_symmetries(bad, strip_samples(50), 1e-12);
  EXPECT_FALSE(r.passed());
  EXPECT_GT(r.max_residual(), 0.1);
}

TEST(SMatrix, SamplesStayInsideStrip) {
  StripRectangle rect;
  for (cplx z : strip_samples(500, rect)) {
    EXPECT_GT(z.imag(), 0.0);
    EXPECT_LT(z.imag(), pi);
    EXPECT_GE(z.real(), rect.re_min);
    EXPECT_LE(z.real(), rect.re_max);
  }
}
