#include <gtest/gtest.h>

#include <cstdio>
#include <random>

#include "zfqft/fockspace.hpp"

using namespace zfqft;

namespace {

const RapidityGrid small{-2.0, 2.0, 9, 1.0};

Vec random_vec(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> g;
  Vec v(n);
  for (Index i = 0; i < n; ++i) {
    double re = g(rng), im = g(rng);
    v[i] = cplx(re, im);
  }
  return v;
}

// random S-symmetric state supported on sectors <= m
FockState random_state(const SpacePtr& sp, std::mt19937_64& rng, int m) {
  SpMat q = sp->symmetric_basis(m);
  return {sp, Vec(q * random_vec(rng, q.cols()))};
}

Vec gauss_on(const RapidityGrid& g, double c, double w) {
  Vec v(g.n_points);
  for (int k = 0; k < g.n_points; ++k) v[k] = std::exp(-0.5 * std::pow((g.node(k) - c) / w, 2));
  return v;
}

}  // namespace

class ZfBuiltins : public ::testing::TestWithParam<const char*> {};

TEST_P(ZfBuiltins, ExchangeRelationsHold) {
  auto sp = FockSpace::make(small, ScatteringFunction::parse(GetParam()), 3);
  auto r = verify_zf_relations(sp, 1, 64, 1e-10);
  EXPECT_TRUE(r.passed()) << r.creators << " " << r.annihilators << " " << r.mixed;
  EXPECT_EQ(r.pairs, 81u);
}

INSTANTIATE_TEST_SUITE_P(All, ZfBuiltins, ::testing::Values("const:1", "const:-1", "sinh:0.785398163397448",
                                                            "product:0.785398163397448,1.2"));

TEST(Fock, ZfNeedsThreeSectors) {
  auto sp = FockSpace::make(small, ScatteringFunction::constant(1), 2);
  EXPECT_THROW(verify_zf_relations(sp), PreconditionError);
}

TEST(Fock, CreationOnVacuumGivesOneParticleState) {
  auto sp = FockSpace::make(small, ScatteringFunction::sinh_factor(0.7), 2);
  Vec psi = gauss_on(small, 0.2, 0.5);
  FockState st = zf_create(sp, psi, FockState::vacuum(sp));
  EXPECT_LT((st.wavefunction(1) - psi).norm(), 1e-14);
  EXPECT_EQ(st.sector(0).norm(), 0.0);
  EXPECT_EQ(st.sector(2).norm(), 0.0);
}

TEST(Fock, PauliExclusionForMinusOne) {
  auto sp = FockSpace::make(small, ScatteringFunction::constant(-1), 2);
  Vec psi = gauss_on(small, 0.0, 0.7);
  FockState st = zf_create(sp, psi, zf_create(sp, psi, FockState::vacuum(sp)));
  EXPECT_LT(st.norm(), 1e-14);
}

TEST(Fock, TwoParticleNormMatchesDoubleSum) {
  auto sp = FockSpace::make(small, ScatteringFunction::sinh_factor(pi / 4), 2);
  Vec p1 = gauss_on(small, -0.6, 0.4), p2 = gauss_on(small, 0.5, 0.6);
  FockState st = zf_create(sp, p1, zf_create(sp, p2, FockState::vacuum(sp)));
  const auto& S = sp->S();
  const double dt = small.spacing();
  cplx want = 0;
  for (int a = 0; a < 9; ++a)
    for (int b = 0; b < 9; ++b) {
      cplx t_ab = p1[a] * p2[b], t_ba = p1[b] * p2[a];
      want += std::conj(t_ab) * t_ab + std::conj(t_ab) * S(small.node(b) - small.node(a)) * t_ba;
    }
  want *= dt * dt;
  EXPECT_NEAR(std::abs(st.inner(st) - want), 0.0, 1e-12 * std::abs(want));
  EXPECT_LT(st.s_symmetry_residual(), 1e-13);
}

TEST(Fock, AnnihilatorKillsVacuum) {
  auto sp = FockSpace::make(small, ScatteringFunction::constant(1), 2);
  EXPECT_EQ(zf_annihilate(sp, gauss_on(small, 0, 1), FockState::vacuum(sp)).norm(), 0.0);
}

TEST(Fock, PointAnnihilatorAfterCreator) {
  auto sp = FockSpace::make(small, ScatteringFunction::sinh_factor(0.4), 2);
  FockState vac = FockState::vacuum(sp);
  for (int a = 0; a < 9; ++a)
    for (int b = 0; b < 9; ++b) {
      FockState r = apply(point_annihilation(sp, a), apply(point_creation(sp, b), vac));
      Vec want = a == b ? Vec(vac.coords() / small.spacing()) : Vec(Vec::Zero(sp->dim()));
      EXPECT_LT((r.coords() - want).norm(), 1e-12) << a << "," << b;
    }
}

TEST(Fock, CreatorAnnihilatorAdjointness) {
  auto sp = FockSpace::make(small, ScatteringFunction::product({0.5, 1.3}), 3);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    Vec psi = random_vec(rng, 9);
    FockState x = random_state(sp, rng, 3), y = random_state(sp, rng, 2);
    cplx lhs = x.inner(apply(creation(sp, psi), y));
    cplx rhs = apply(annihilation(sp, psi.conjugate()), x).inner(y);
    EXPECT_LT(std::abs(lhs - rhs), 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST(Fock, GradingFlipsOddOperators) {
  auto sp = FockSpace::make(small, ScatteringFunction::constant(1), 3);
  FockOperator g = grading(sp);
  FockOperator c = creation(sp, gauss_on(small, 0, 1));
  EXPECT_EQ(max_abs(SpMat((g * c * g + c).mat)), 0.0);
  EXPECT_EQ(max_abs(SpMat((g * g).mat - sparse_identity(sp->dim()))), 0.0);
  EXPECT_EQ(apply(g, FockState::vacuum(sp)).coords(), FockState::vacuum(sp).coords());
  EXPECT_EQ(c.grade, Grade::odd);
  EXPECT_EQ(g.grade, Grade::even);
}

TEST(Fock, TwistValues) {
  auto sp = FockSpace::make(small, ScatteringFunction::constant(1), 3);
  FockOperator z = twist(sp);
  FockState vac = FockState::vacuum(sp);
  EXPECT_LT((apply(z, vac).coords() - vac.coords()).norm(), 1e-16);
  Vec psi = gauss_on(small, 0.3, 0.5);
  FockState one = one_particle_state(sp, psi);
  EXPECT_LT((apply(z, one).coords() + I * one.coords()).norm(), 1e-15);
  EXPECT_LT(max_abs(SpMat((z.adjoint() * z).mat - sparse_identity(sp->dim()))), 1e-14);
}

TEST(Fock, TranslationGroupLaw) {
  auto sp = FockSpace::make(small, ScatteringFunction::constant(1), 3);
  FockState vac = FockState::vacuum(sp);
  EXPECT_LT(max_abs(SpMat(translate(sp, {0, 0}).mat - sparse_identity(sp->dim()))), 1e-16);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int t = 0; t < 10; ++t) {
    std::array<double, 2> x{u(rng), u(rng)}, y{u(rng), u(rng)};
    FockOperator lhs = translate(sp, x) * translate(sp, y), rhs = translate(sp, {x[0] + y[0], x[1] + y[1]});
    EXPECT_LT(max_abs(SpMat(lhs.mat - rhs.mat)), 1e-13);
    EXPECT_LT((apply(translate(sp, x), vac).coords() - vac.coords()).norm(), 1e-16);
  }
}

TEST(Fock, ReflectionBasics) {
  auto sp = FockSpace::make(small, ScatteringFunction::sinh_factor(0.9), 3);
  Reflection r = reflect(sp);
  FockState vac = FockState::vacuum(sp);
  EXPECT_LT((r.J.apply(vac).coords() - vac.coords()).norm(), 1e-16);
  Vec psi = gauss_on(small, 0.3, 0.5) * cplx(0.6, 0.8);
  EXPECT_LT((r.J.apply(one_particle_state(sp, psi)).wavefunction(1) - psi.conjugate()).norm(), 1e-14);
  // U(j) is an involution
  EXPECT_LT(max_abs(SpMat(r.Uj_squared - sparse_identity(sp->dim()))), 1e-14);
}

TEST(Fock, ReflectionReversesTwoParticleProducts) {
  auto sp = FockSpace::make(small, ScatteringFunction::sinh_factor(0.9), 3);
  Reflection r = reflect(sp);
  Vec p1 = gauss_on(small, -0.5, 0.5) * cplx(0.3, 1.0), p2 = gauss_on(small, 0.7, 0.4) * cplx(1.0, -0.2);
  FockState vac = FockState::vacuum(sp);
  FockState lhs = r.J.apply(zf_create(sp, p1, zf_create(sp, p2, vac)));
  FockState rhs = zf_create(sp, p2.conjugate(), zf_create(sp, p1.conjugate(), vac));
  EXPECT_LT((lhs.coords() - rhs.coords()).norm(), 1e-10 * rhs.norm());
}

TEST(Fock, HamiltonianSpectrum) {
  auto sp = FockSpace::make(small, ScatteringFunction::constant(1), 2);
  FockOperator h = hamiltonian(sp);
  EXPECT_EQ(apply(h, FockState::vacuum(sp)).norm(), 0.0);
  ASSERT_NEAR(small.node(4), 0.0, 1e-15);
  EXPECT_NEAR(h.mat.coeff(sp->offset(1) + 4, sp->offset(1) + 4).real(), 1.0, 1e-15);
  double lowest = INFINITY, nearest = INFINITY;
  for (int k = 0; k < 9; ++k) {
    lowest = std::min(lowest, h.mat.coeff(sp->offset(1) + k, sp->offset(1) + k).real());
    nearest = std::min(nearest, std::abs(small.node(k)));
  }
  EXPECT_NEAR(lowest, std::cosh(nearest), 1e-15);
}

TEST(Fock, SymmetrizerIsProjector) {
  auto sp = FockSpace::make(small, ScatteringFunction::sinh_factor(pi / 4), 3);
  std::mt19937_64 rng(9);
  for (int n : {2, 3}) {
    Vec t = random_vec(rng, sp->sector_dim(n));
    Vec p = s_symmetrize(*sp, n, t);
    EXPECT_LT((s_symmetrize(*sp, n, p) - p).norm(), 1e-12 * p.norm());
  }
}

TEST(Fock, ConstantsGiveOrdinarySymmetrization) {
  auto plus = FockSpace::make(small, ScatteringFunction::constant(1), 2);
  auto minus = FockSpace::make(small, ScatteringFunction::constant(-1), 2);
  std::mt19937_64 rng(2);
  Vec t = random_vec(rng, 81);
  Vec ps = s_symmetrize(*plus, 2, t), pa = s_symmetrize(*minus, 2, t);
  for (int a = 0; a < 9; ++a)
    for (int b = 0; b < 9; ++b) {
      EXPECT_LT(std::abs(ps[a * 9 + b] - 0.5 * (t[a * 9 + b] + t[b * 9 + a])), 1e-15);
      EXPECT_LT(std::abs(pa[a * 9 + b] - 0.5 * (t[a * 9 + b] - t[b * 9 + a])), 1e-15);
    }
  for (int a = 0; a < 9; ++a) EXPECT_EQ(pa[a * 9 + a], cplx(0.0));
}

TEST(Fock, StateDumpRoundTrip) {
  auto sp = FockSpace::make(small, ScatteringFunction::constant(1), 2);
  std::mt19937_64 rng(4);
  FockState st = random_state(sp, rng, 2);
  std::string path = ::testing::TempDir() + "zfqft_state.bin";
  write_state(st, path);
  FockState back = read_state(sp, path);
  EXPECT_LT((back.coords() - st.coords()).norm(), 1e-14 * st.norm());
  std::remove(path.c_str());
}

TEST(Fock, GridValidation) {
  EXPECT_THROW(FockSpace::make({1.0, -1.0, 8, 1.0}, ScatteringFunction::constant(1), 2), ConfigError);
  EXPECT_THROW(FockSpace::make(small, ScatteringFunction::constant(1), 7), ConfigError);
}
