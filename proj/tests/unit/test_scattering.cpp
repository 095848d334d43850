#include <gtest/gtest.h>

#include <random>

#include "zfqft/scattering.hpp"

using namespace zfqft;

namespace {
const RapidityGrid grid{-2.0, 2.0, 24, 1.0};
ChiFilter wide_chi() {
  ChiFilter c;
  c.rap_lo = -2.5;
  c.rap_hi = 2.5;
  return c;
}
SpacePtr space(const ScatteringFunction& S, int nmax) { return FockSpace::make(grid, S, nmax); }
}  // namespace

TEST(Packets, EvolutionAtTimeZeroIsInverseFourier) {
  WavePacket f = WavePacket::gaussian(0.8, 0.6);
  for (double x : {-2.0, -0.3, 0.0, 1.1, 3.0}) {
    cplx want = 0.6 / std::sqrt(2 * pi) * std::exp(-0.5 * 0.36 * x * x) * std::exp(I * 0.8 * x);
    EXPECT_LT(std::abs(packet_evolve(f, 0.0, x) - want), 1e-13);
  }
}

TEST(Packets, MassIsConserved) {
  WavePacket f = WavePacket::gaussian(0.0, 1.0);
  auto mass = [&](double tau) {
    double h = 0.05, s = 0;
    for (double x = -tau - 12; x <= tau + 12; x += h) s += std::norm(packet_evolve(f, tau, x)) * h;
    return s;
  };
  // Parseval: int |f(tau, x)|^2 dx = (2 pi)^-1 int |f~|^2 dk = 1 / (2 sqrt(pi)) for s = 1
  double want = 1.0 / (2 * std::sqrt(pi));
  for (double tau : {0.0, 1.0, 5.0}) EXPECT_NEAR(mass(tau), want, 1e-8) << tau;
}

TEST(Packets, PeakMovesWithGroupVelocity) {
  WavePacket f = WavePacket::gaussian(1.0, 0.15);
  const double tau = 10.0, v = 1.0 / std::sqrt(2.0);
  double best = -1, at = 0;
  for (double x = 4.0; x <= 10.0; x += 0.02) {
    double a = std::abs(packet_evolve(f, tau, x));
    if (a > best) best = a, at = x;
  }
  EXPECT_NEAR(at, v * tau, 0.05 * v * tau);
}

TEST(Packets, BumpRapiditySupportIsExact) {
  WavePacket p = WavePacket::bump(0.3, 0.2);
  auto r = p.raps();
  EXPECT_NEAR(r[0], 0.1, 1e-14);
  EXPECT_NEAR(r[1], 0.5, 1e-14);
  EXPECT_EQ(p.at_rapidity(0.09), cplx(0.0));
  EXPECT_GT(std::abs(p.at_rapidity(0.3)), 0.3);
}

TEST(ChiAverage, UnitFilterOnlyRescales) {
  auto sp = space(ScatteringFunction::constant(1), 2);
  Vec psi = WavePacket::bump(0.0, 0.5).rapidity_vector(grid);
  FockOperator a = phi_of_vector(sp, psi);
  FockOperator b = chi_average(a, ChiFilter::identity());
  EXPECT_LT(max_abs(SpMat(b.mat - pfg_scale * a.mat)), 1e-14);
}

TEST(ChiAverage, VacuumExpectation) {
  auto sp = space(ScatteringFunction::constant(1), 2);
  FockOperator h = hamiltonian(sp) + FockOperator{sp, sparse_identity(sp->dim())};
  ChiFilter chi = wide_chi();
  FockState vac = FockState::vacuum(sp);
  cplx got = vac.inner(apply(chi_average(h, chi), vac));
  EXPECT_EQ(got, pfg_scale * chi(0.0, 0.0) * vac.inner(apply(h, vac)));
}

TEST(ChiAverage, NegativeEnergyTransfersVanish) {
  auto sp = space(ScatteringFunction::constant(1), 3);
  Vec psi = WavePacket::bump(0.0, 0.5).rapidity_vector(grid);
  FockOperator a = chi_average(phi_of_vector(sp, psi), wide_chi());
  // the annihilation half lowers the energy, so only sector-raising entries survive
  for (int k = 0; k < a.mat.outerSize(); ++k)
    for (SpMat::InnerIterator it(a.mat, k); it; ++it)
      EXPECT_GT(sp->sector_of(it.row()), sp->sector_of(it.col()));
}

TEST(Pfg, CompliantFilterGivesCreator) {
  for (double s : {1.0, -1.0}) {
    auto sp = space(ScatteringFunction::constant(s), 3);
    Vec psi = WavePacket::bump(0.2, 0.6).rapidity_vector(grid);
    EXPECT_LT(pfg_residual(sp, psi, wide_chi()), 1e-10);
  }
}

TEST(Pfg, PacketOutsidePlateauRejected) {
  auto sp = space(ScatteringFunction::constant(1), 2);
  ChiFilter narrow;
  narrow.rap_lo = -0.2;
  narrow.rap_hi = 0.2;
  Vec psi = WavePacket::bump(0.8, 0.5).rapidity_vector(grid);
  EXPECT_THROW(pfg_creator(sp, psi, narrow), PreconditionError);
  // averaging anyway leaves a visible defect
  FockOperator d = chi_average(phi_of_vector(sp, psi), narrow) - creation(sp, psi) * cplx(pfg_scale);
  EXPECT_GT(restricted_norm(d, sp->nmax()), 1e-3);
}

TEST(Pfg, TauIndependence) {
  auto sp = FockSpace::make({-2.0, 2.0, 12, 1.0}, ScatteringFunction::sinh_factor(0.6), 2);
  Vec psi = WavePacket::bump(0.2, 0.6).rapidity_vector(sp->grid());
  WavePacket f = WavePacket::gaussian(0.0, 1.0);
  FockOperator a0 = pfg_tau(sp, psi, wide_chi(), f, 0.0);
  for (double tau : {1.0, 5.0}) EXPECT_LT(restricted_norm(pfg_tau(sp, psi, wide_chi(), f, tau) - a0, 1), 1e-8);
}

TEST(GradedSymmetrizer, EvenGradesGiveOrdinarySymmetrizer) {
  auto G = graded_symmetrizer(3, {1, 1, 1});
  for (int s : G.signs) EXPECT_EQ(s, 1);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  Vec t(27);
  for (auto& x : t) x = n(rng);
  Vec p = G.apply(t, 3);
  EXPECT_LT(std::abs(p[0 * 9 + 1 * 3 + 2] - p[2 * 9 + 1 * 3 + 0]), 1e-15);
  EXPECT_LT(std::abs(p[0 * 9 + 1 * 3 + 2] - p[1 * 9 + 0 * 3 + 2]), 1e-15);
}

TEST(GradedSymmetrizer, OddPairAntisymmetrizes) {
  auto G = graded_symmetrizer(2, {-1, -1});
  Vec psi(4);
  psi << 1.0, cplx(0.5, 1.0), -2.0, 0.3;
  EXPECT_EQ(G.apply(tensor_product({psi, psi}), 4).norm(), 0.0);
  EXPECT_EQ(G.sign_of({1, 0}), -1);
}

TEST(GradedSymmetrizer, IsProjectorForUniformGrades) {
  for (auto grades : {std::vector<int>{-1, -1, -1}, std::vector<int>{1, 1, 1}}) {
    SpMat P = graded_symmetrizer(3, grades).matrix(3);
    EXPECT_LT(max_abs(SpMat(P * P - P)), 1e-13);
  }
  EXPECT_THROW(graded_symmetrizer(2, {1}), PreconditionError);
}

TEST(GradedSymmetrizer, MixedGradeSigns) {
  // only crossings of two odd labels count
  auto G = graded_symmetrizer(3, {1, -1, -1});
  EXPECT_EQ(G.sign_of({1, 0, 2}), 1);
  EXPECT_EQ(G.sign_of({0, 2, 1}), -1);
  EXPECT_EQ(G.sign_of({2, 1, 0}), -1);
  EXPECT_EQ(G.sign_of({1, 2, 0}), 1);
}

TEST(GradedSymmetrizer, NormOfDisjointProducts) {
  const int d = 8;
  auto bump = [&](int at) {
    Vec v = Vec::Zero(d);
    v[at] = 1.0;
    v[at + 1] = cplx(0.4, -0.3);
    return v;
  };
  for (int n : {2, 3}) {
    std::vector<Vec> fs;
    for (int j = 0; j < n; ++j) fs.push_back(bump(2 * j + 1));
    Vec t = tensor_product(fs);
    Vec p = graded_symmetrizer(n, std::vector<int>(n, -1)).apply(t, d);
    EXPECT_NEAR(p.squaredNorm(), t.squaredNorm() / factorial(n), 1e-14);
  }
}

TEST(Scattering, SingleOutStateIsThePacket) {
  auto sp = space(ScatteringFunction::sinh_factor(0.5), 2);
  WavePacket a = WavePacket::bump(0.3, 0.5);
  FockState w = w_out(sp, {a}, wide_chi());
  EXPECT_LT((w.wavefunction(1) - a.rapidity_vector(grid)).norm(), 1e-12);
}

TEST(Scattering, FreeTwoParticleNorm) {
  auto sp = space(ScatteringFunction::constant(1), 2);
  WavePacket a = WavePacket::bump(-0.8, 0.4), b = WavePacket::bump(0.8, 0.4);
  FockState w = w_out(sp, {a, b}, wide_chi());
  double na = a.rapidity_vector(grid).squaredNorm() * grid.spacing();
  double nb = b.rapidity_vector(grid).squaredNorm() * grid.spacing();
  EXPECT_NEAR(w.norm() * w.norm(), na * nb, 1e-8 * na * nb);
}

TEST(Scattering, ReversedOrderRejected) {
  auto sp = space(ScatteringFunction::constant(1), 2);
  WavePacket a = WavePacket::bump(-0.8, 0.4), b = WavePacket::bump(0.8, 0.4);
  EXPECT_THROW(w_out(sp, {b, a}, wide_chi()), OrderingError);
  EXPECT_THROW(w_out(sp, {a, WavePacket::bump(-0.6, 0.4)}, wide_chi()), OrderingError);
}

TEST(Scattering, OneParticleElementIsInnerProduct) {
  auto sp = space(ScatteringFunction::sinh_factor(0.9), 2);
  WavePacket a = WavePacket::bump(0.1, 0.5), b = WavePacket::bump(0.2, 0.5);
  Vec va = a.rapidity_vector(grid), vb = b.rapidity_vector(grid);
  cplx want = va.dot(vb) * grid.spacing();
  EXPECT_LT(std::abs(s_matrix_element(sp, {a}, {b}, wide_chi()) - want), 1e-12);
}

TEST(Scattering, ConstantTwoBodyFactors) {
  for (double s : {1.0, -1.0}) {
    auto sp = space(ScatteringFunction::constant(s), 2);
    cplx ph = extracted_two_body_phase(sp, WavePacket::bump(-0.8, 0.4), WavePacket::bump(0.8, 0.4), wide_chi());
    EXPECT_LT(std::abs(ph - cplx(-s)), 1e-10) << s;
  }
}

TEST(Scattering, SwappedOutPacketsFlipSign) {
  auto sp = space(ScatteringFunction::sinh_factor(0.7), 2);
  WavePacket a = WavePacket::bump(-0.8, 0.4), b = WavePacket::bump(0.8, 0.4);
  FockState ab = w_out_unordered(sp, {a, b}, wide_chi()), ba = w_out_unordered(sp, {b, a}, wide_chi());
  EXPECT_LT((ab.coords() + ba.coords()).norm(), 1e-14 * ab.norm());
}

TEST(Kernel, Values) {
  auto Sb = ScatteringFunction::sinh_factor(pi / 4);
  EXPECT_EQ(analytic_kernel(Sb, {0.3}, {0.3}), cplx(1.0));
  EXPECT_LT(std::abs(analytic_kernel(Sb, {0.5, -0.5}, {-0.5, 0.5}) + Sb(1.0)), 1e-15);
  EXPECT_EQ(analytic_kernel(ScatteringFunction::constant(1), {0.1, 0.9}, {0.1, 0.9}), cplx(-1.0));
  EXPECT_EQ(analytic_kernel(ScatteringFunction::constant(-1), {0.1, 0.9}, {0.1, 0.9}), cplx(1.0));
  EXPECT_EQ(analytic_kernel(Sb, {0.1, 0.9}, {0.1, 0.8}), cplx(0.0));
}
