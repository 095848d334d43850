#include <gtest/gtest.h>

#include "zfqft/formfactors.hpp"

using namespace zfqft;

namespace {
const RapidityGrid grid{-2.0, 2.0, 8, 1.0};
const TestFunction f0 = TestFunction::gaussian({0.1, -0.2}, {0.4, 0.5});

Sampler quick() {
  Sampler s;
  s.samples = 30;
  s.polydiscs = 10;
  s.contour_points = 128;
  return s;
}
}  // namespace

TEST(Coefficients, IdentityOperator) {
  auto sp = FockSpace::make(grid, ScatteringFunction::constant(1), 2);
  FockOperator one{sp, sparse_identity(sp->dim())};
  EXPECT_NEAR(std::abs(coefficients_from_operator(one, 0, 0).c(0, 0) - cplx(1.0)), 0.0, 1e-14);
  EXPECT_LT(coefficients_from_operator(one, 1, 0).max_abs(), 1e-14);
  EXPECT_LT(coefficients_from_operator(one, 1, 1).max_abs(), 1e-13);
  EXPECT_LT(coefficients_from_operator(one, 2, 0).max_abs(), 1e-14);
}

TEST(Coefficients, FieldHasOnlyFirstOrderTerms) {
  auto sp = FockSpace::make(grid, ScatteringFunction::sinh_factor(0.8), 3);
  FockOperator a = phi(sp, f0);
  EXPECT_LT((coefficients_from_operator(a, 1, 0).c.col(0) - mass_shell_restrict(grid, f0, +1)).norm(), 1e-13);
  EXPECT_LT((coefficients_from_operator(a, 0, 1).c.row(0).transpose() - mass_shell_restrict(grid, f0, -1)).norm(),
            1e-13);
  EXPECT_LT(coefficients_from_operator(a, 0, 0).max_abs(), 1e-14);
  EXPECT_LT(coefficients_from_operator(a, 1, 1).max_abs(), 1e-13);
  EXPECT_LT(coefficients_from_operator(a, 2, 1).max_abs(), 1e-12);
}

TEST(Coefficients, CreatorTimesAnnihilator) {
  auto sp = FockSpace::make(grid, ScatteringFunction::sinh_factor(0.8), 3);
  Vec p1(8), p2(8);
  for (int k = 0; k < 8; ++k) {
    p1[k] = cplx(std::cos(k), 0.2 * k);
    p2[k] = cplx(1.0 / (k + 1), -std::sin(k));
  }
  FockOperator a = creation(sp, p1) * annihilation(sp, p2);
  CoefficientTensor c = coefficients_from_operator(a, 1, 1);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) EXPECT_LT(std::abs(c({i}, {j}) - p1[i] * p2[j]), 1e-12);
  EXPECT_LT(coefficients_from_operator(a, 0, 0).max_abs(), 1e-13);
  EXPECT_LT(coefficients_from_operator(a, 1, 0).max_abs(), 1e-13);
}

TEST(Coefficients, RoundTripThroughNormalOrdering) {
  auto sp = FockSpace::make(grid, ScatteringFunction::constant(1), 3);
  CoefficientTensor t{8, 2, 1, Mat(64, 8)};
  for (Index r = 0; r < 64; ++r)
    for (Index c = 0; c < 8; ++c) {
      // symmetric in the two creation slots, as any S = 1 coefficient is
      Index a = r / 8, b = r % 8;
      t.c(r, c) = cplx(std::cos(0.3 * (a + b) + c), std::sin(0.1 * a * b - c));
    }
  CoefficientTensor back = coefficients_from_operator(normal_ordered_operator(sp, t), 2, 1);
  EXPECT_LT((back.c - t.c).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(coefficients_from_operator(normal_ordered_operator(sp, t), 2, 2), PreconditionError);
}

TEST(Families, ConstantPassesExactly) {
  auto F = constant_family(2.5);
  auto fw = verify_fw(F, 3, quick()), fd = verify_fd(F, 3, quick());
  EXPECT_TRUE(fw.passed());
  EXPECT_TRUE(fd.passed());
  EXPECT_EQ(fd.worst("FD1"), 0.0);
  EXPECT_EQ(fd.worst("FD4"), 0.0);
  EXPECT_EQ(F({}), cplx(2.5));
}

TEST(Families, IsingFermionWedgeAxioms) {
  auto F = builtin_family("ising-fermion-g");
  auto fw = verify_fw(F, 3, quick());
  EXPECT_TRUE(fw.passed());
  EXPECT_LT(fw.worst("FW1"), 1e-9);
  EXPECT_LT(fw.worst("FW2"), 1e-9);
}

TEST(Families, IsingFermionOneParticleAntiperiodic) {
  auto F = builtin_family("ising-fermion-g");
  for (cplx z : {cplx(0.3, 0.4), cplx(-1.0, 2.0), cplx(0.8, -0.5)})
    EXPECT_LT(std::abs(F({z + 2.0 * pi * I}) + F({z})), 1e-10 * std::max(1.0, std::abs(F({z}))));
  auto fd = verify_fd(F, 1, quick());
  EXPECT_LT(fd.worst("FD3"), 1e-10);
}

TEST(Families, IsingFermionThreeParticleResidue) {
  auto F = builtin_family("ising-fermion-g");
  auto fd = verify_fd(F, 3, quick());
  EXPECT_TRUE(fd.passed());
  EXPECT_LT(fd.worst("FD4"), 1e-6);
  // even orders vanish, so the two-particle residues are zero as well
  EXPECT_EQ(F({cplx(0.1), cplx(0.7)}), cplx(0.0));
  std::vector<cplx> z{cplx(-1.0), cplx(0.2), cplx(1.1)};
  cplx got = numeric_residue(F, z, 1, 3, 1e-2, 256), want = predicted_residue(F, z, 1, 3);
  EXPECT_GT(std::abs(want), 1e-6);
  EXPECT_LT(std::abs(got - want), 1e-6 * std::abs(want));
}

TEST(Families, WrongExchangeFactorFlagged) {
  FormFactorFamily bad = constant_family(0.0);
  bad.name = "asymmetric";
  bad.eval = [](const std::vector<cplx>& z) -> cplx { return z.size() == 2 ? std::exp(0.5 * z[0]) : cplx(0.0); };
  auto fw = verify_fw(bad, 2, quick());
  EXPECT_FALSE(fw.passed());
  EXPECT_GT(fw.worst("FW2"), 0.1);
}

TEST(Families, FreeMajoranaMatchesField) {
  auto sp = FockSpace::make(grid, ScatteringFunction::constant(-1), 3);
  for (int c : {1, -1}) {
    auto F = free_majorana_family(f0, c);
    FockOperator psi = majorana(sp, f0, c);
    EXPECT_LT(boundary_match(F, psi, 1, 0), 1e-8);
    EXPECT_LT(coefficients_from_operator(psi, 2, 0).max_abs(), 1e-12);
    EXPECT_LT(coefficients_from_operator(psi, 1, 1).max_abs(), 1e-12);
    EXPECT_EQ(F({cplx(0.1), cplx(0.5)}), cplx(0.0));
    EXPECT_EQ(F({cplx(0.1), cplx(0.5), cplx(-0.4)}), cplx(0.0));
  }
}

TEST(Boundary, FieldAgainstItsFamily) {
  auto sp = FockSpace::make(grid, ScatteringFunction::constant(1), 2);
  auto F = left_field_family(f0, sp->S());
  FockOperator a = phi(sp, f0);
  EXPECT_LT(boundary_match(F, a, 1, 0), 1e-8);
  EXPECT_LT(boundary_match(F, a, 0, 1), 1e-8);
  // a different smearing function shows up at the size of the difference
  auto G = left_field_family(f0.translated({0.0, 0.3}), sp->S());
  EXPECT_GT(boundary_match(G, a, 1, 0), 1e-3);
}

TEST(Boundary, ConstantAgainstIdentity) {
  auto sp = FockSpace::make(grid, ScatteringFunction::constant(1), 2);
  FockOperator one{sp, sparse_identity(sp->dim())};
  EXPECT_LT(boundary_match(constant_family(1.0), one, 0, 0), 1e-15);
}

TEST(Boundary, IsingRoundTrip) {
  auto sp = FockSpace::make(grid, ScatteringFunction::constant(1), 3);
  auto F = builtin_family("ising-fermion-g");
  FockOperator a = family_operator(sp, F, 2);
  Reflection r = reflect(sp);
  for (int k = 0; k <= 2; ++k)
    for (int m = 0; m <= k; ++m) {
      EXPECT_LT(boundary_match(F, a, m, k - m), 1e-8) << m << "," << k - m;
      EXPECT_LT(reflected_boundary_match(F, a, m, k - m, r), 1e-8) << m << "," << k - m;
    }
}

TEST(Families, UnknownNameRejected) { EXPECT_THROW(builtin_family("sine-gordon"), ConfigError); }
