#pragma once

#include "fockspace.hpp"
#include "quadrature.hpp"

namespace zfqft {

enum class TestKind { gaussian, bump };

// Real smearing function on 1+1 Minkowski space, product form in (x0, x1).
//   gaussian: A exp(-(x0-c0)^2/(2 w0^2) - (x1-c1)^2/(2 w1^2))
//   bump:     A h((x0-c0)/w0) h((x1-c1)/w1),  h(s) = exp(-1/(1-s^2)) on |s| < 1
// Fourier convention: f~(p) = (2 pi)^-1 int f(x) exp(i p.x) d^2x with p.x = p0 x0 - p1 x1.
struct TestFunction {
  TestKind kind = TestKind::gaussian;
  std::array<double, 2> center{0.0, 0.0};
  std::array<double, 2> width{0.5, 0.5};
  double amplitude = 1.0;
  double eps_tail = 1e-8;

  static TestFunction gaussian(std::array<double, 2> c, std::array<double, 2> w, double a = 1.0) {
    return {TestKind::gaussian, c, w, a};
  }
  static TestFunction bump(std::array<double, 2> c, std::array<double, 2> radius, double a = 1.0) {
    return {TestKind::bump, c, radius, a};
  }

  double value(double x0, double x1) const {
    double s0 = (x0 - center[0]) / width[0], s1 = (x1 - center[1]) / width[1];
    if (kind == TestKind::gaussian) return amplitude * std::exp(-0.5 * (s0 * s0 + s1 * s1));
    return amplitude * bump1(s0) * bump1(s1);
  }

  cplx ft(cplx p0, cplx p1) const {
    cplx phase = std::exp(I * (p0 * center[0] - p1 * center[1]));
    if (kind == TestKind::gaussian) {
      cplx a0 = p0 * width[0], a1 = p1 * width[1];
      return amplitude * width[0] * width[1] * std::exp(-0.5 * (a0 * a0 + a1 * a1)) * phase;
    }
    return amplitude / (2 * pi) * phase * width[0] * bump_ft(p0 * width[0]) * width[1] * bump_ft(p1 * width[1]);
  }
  cplx ft(double p0, double p1) const { return ft(cplx(p0), cplx(p1)); }

  // f(. - a)
  TestFunction translated(std::array<double, 2> a) const {
    TestFunction g = *this;
    g.center = {center[0] + a[0], center[1] + a[1]};
    return g;
  }
  // (j.f)(x) = f(-x)
  TestFunction reflected() const {
    TestFunction g = *this;
    g.center = {-center[0], -center[1]};
    return g;
  }

  // Semi-axes of the (effective) support: an ellipse for gaussians (level eps_tail), a box for bumps.
  std::array<double, 2> support_radius() const {
    if (kind == TestKind::bump) return width;
    double r = std::sqrt(2.0 * std::log(1.0 / eps_tail));
    return {r * width[0], r * width[1]};
  }

  // Extent of the support along the light-cone coordinates u = x1 + x0, v = x1 - x0.
  std::array<double, 4> lightcone_extent() const {
    auto r = support_radius();
    double ext = kind == TestKind::bump ? r[0] + r[1] : std::hypot(r[0], r[1]);
    double u = center[1] + center[0], v = center[1] - center[0];
    return {u - ext, u + ext, v - ext, v + ext};
  }

  static double bump1(double s) { return std::abs(s) < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; }

  // int_{-1}^{1} h(s) e^{iks} ds for complex k
  static cplx bump_ft(cplx k) {
    auto f = [k](double s) { return 2.0 * bump1(s) * std::cos(k * s); };
    return integrate(f, 0.0, 1.0, 1e-12);
  }
};

// Both supports (effective for gaussians) lie in W_L + a and W_R + b with b - a in W_R.
inline bool wedge_separated(const TestFunction& left, const TestFunction& right) {
  auto l = left.lightcone_extent(), r = right.lightcone_extent();
  return r[0] > l[1] && r[2] > l[3];
}

// theta -> f~(sign p(theta)) on the nodes
inline Vec mass_shell_restrict(const RapidityGrid& g, const TestFunction& f, int sign) {
  Vec v(g.n_points);
  for (int k = 0; k < g.n_points; ++k) v[k] = f.ft(sign * g.energy(k), sign * g.momentum(k));
  return v;
}

// phi(psi) = z^dag(psi) + z(conj psi), the extension of the field to one-particle vectors
inline FockOperator phi_of_vector(const SpacePtr& space, const Vec& psi) {
  return creation(space, psi) + annihilation(space, psi.conjugate());
}

// phi(f) = z^dag(f~ o p) + z(f~ o (-p))
inline FockOperator phi(const SpacePtr& space, const TestFunction& f) {
  const auto& g = space->grid();
  return creation(space, mass_shell_restrict(g, f, +1)) + annihilation(space, mass_shell_restrict(g, f, -1));
}

inline FockOperator phi_prime(const SpacePtr& space, const TestFunction& f, const Reflection& r) {
  return r.J.conjugate(phi(space, f.reflected()));
}
inline FockOperator phi_prime(const SpacePtr& space, const TestFunction& f) {
  return phi_prime(space, f, reflect(space));
}

inline FockOperator phi_hat(const SpacePtr& space, const TestFunction& f, const Reflection& r) {
  FockOperator z = twist(space);
  return z * phi_prime(space, f, r) * z.adjoint();
}
inline FockOperator phi_hat(const SpacePtr& space, const TestFunction& f) { return phi_hat(space, f, reflect(space)); }

// e^{i pi (-2 +- 1)/4} e^{+-theta/2} f~(p(theta))
inline Vec majorana_amplitude(const RapidityGrid& g, const TestFunction& f, int component) {
  cplx phase = std::exp(I * (pi * (-2.0 + component) / 4.0));
  Vec v = mass_shell_restrict(g, f, +1);
  for (int k = 0; k < g.n_points; ++k) v[k] *= phase * std::exp(component * g.node(k) / 2.0);
  return v;
}

// psi_+-(f) = z^dag(amplitude) + its adjoint; only for S = -1.
inline FockOperator majorana(const SpacePtr& space, const TestFunction& f, int component) {
  if (!space->S().is_constant(-1.0)) throw PreconditionError("majorana fields need S = -1");
  if (component != 1 && component != -1) throw PreconditionError("majorana component must be +1 or -1");
  FockOperator c = creation(space, majorana_amplitude(space->grid(), f, component));
  return c + c.adjoint();
}

inline int default_locality_sector(const FockSpace& s) { return std::max(0, s.nmax() - 2); }

// ||AB + BA|| on S-symmetric inputs of sectors <= N_max - 2
inline double graded_commutator_norm(const FockOperator& A, const FockOperator& B) {
  if (A.grade != Grade::odd || B.grade != Grade::odd)
    throw GradeError("graded_commutator_norm needs two odd operators");
  SpMat q = A.space->symmetric_basis(default_locality_sector(*A.space));
  return spectral_norm(SpMat(A.mat * SpMat(B.mat * q) + B.mat * SpMat(A.mat * q)));
}

inline double commutator_norm(const FockOperator& A, const FockOperator& B) {
  SpMat q = A.space->symmetric_basis(default_locality_sector(*A.space));
  return spectral_norm(SpMat(A.mat * SpMat(B.mat * q) - B.mat * SpMat(A.mat * q)));
}

enum class LocalityMode { phi_vs_phihat, majorana_vs_phiprime };

struct LocalityRow {
  double separation;
  double anticommutator;
  double commutator;
};

struct LocalityReport {
  std::string descriptor;
  LocalityMode mode = LocalityMode::phi_vs_phihat;
  int component = 1;
  std::vector<LocalityRow> rows;
  bool separated_at_max = false;

  // The norm that twisted locality says should vanish for the chosen pair.
  double relevant(const LocalityRow& r) const {
    return mode == LocalityMode::phi_vs_phihat ? r.anticommutator : r.commutator;
  }
  double decay_ratio() const {
    return rows.size() < 2 ? 1.0 : relevant(rows.front()) / std::max(relevant(rows.back()), 1e-300);
  }
  bool strictly_decreasing() const {
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (!(relevant(rows[i]) < relevant(rows[i - 1]))) return false;
    return true;
  }
  double floor() const {
    double m = INFINITY;
    for (auto& r : rows) m = std::min(m, relevant(r));
    return m;
  }
};

// Translates g by (0, d) for each separation d. In phi_vs_phihat mode the pair is
// (phi(f), phi^(g_d)); in majorana mode (S = -1) it is (psi_c(f), phi'(g_d)).
inline LocalityReport wedge_locality_report(const SpacePtr& space, const TestFunction& f, const TestFunction& g,
                                            const std::vector<double>& separations,
                                            LocalityMode mode = LocalityMode::phi_vs_phihat, int component = 1) {
  if (separations.empty()) throw PreconditionError("no separations given");
  double dmax = *std::max_element(separations.begin(), separations.end());
  LocalityReport rep;
  rep.descriptor = space->S().descriptor();
  rep.mode = mode;
  rep.component = component;
  rep.separated_at_max = wedge_separated(f, g.translated({0.0, dmax}));
  if (!rep.separated_at_max)
    throw PreconditionError("test function supports are not wedge-separated even at the largest separation");
  Reflection r = reflect(space);
  FockOperator a = mode == LocalityMode::phi_vs_phihat ? phi(space, f) : majorana(space, f, component);
  for (double d : separations) {
    TestFunction gd = g.translated({0.0, d});
    FockOperator b = mode == LocalityMode::phi_vs_phihat ? phi_hat(space, gd, r) : phi_prime(space, gd, r);
    rep.rows.push_back({d, graded_commutator_norm(a, b), commutator_norm(a, b)});
  }
  return rep;
}

}  // namespace zfqft
