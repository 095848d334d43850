#pragma once

#include <random>

#include "fields.hpp"

namespace zfqft {

// f_{m,n} on the node grid: rows run over theta multi-indices, columns over eta multi-indices,
// both lexicographic.
struct CoefficientTensor {
  int d = 0, m = 0, n = 0;
  Mat c;

  cplx operator()(const std::vector<int>& i, const std::vector<int>& j) const {
    Index r = 0, q = 0;
    for (int a : i) r = r * d + a;
    for (int b : j) q = q * d + b;
    return c(r, q);
  }
  double max_abs() const { return c.size() ? c.cwiseAbs().maxCoeff() : 0.0; }
};

namespace detail {

inline Index reverse_index(Index J, int n, int d) {
  Index out = 0;
  for (int k = 0; k < n; ++k) {
    out = out * d + J % d;
    J /= d;
  }
  return out;
}

inline Mat sector_block(const FockOperator& A, int rows_sector, int cols_sector) {
  const FockSpace& s = *A.space;
  return Mat(A.mat.block(s.offset(rows_sector), s.offset(cols_sector), s.sector_dim(rows_sector),
                         s.sector_dim(cols_sector)));
}

}  // namespace detail

// O_{m,n}[c] = int d^m theta d^n eta / (m! n!) c(theta, eta) z^dag(theta_1)..z^dag(theta_m) z(eta_1)..z(eta_n)
// on the grid, restricted to S-symmetric inputs.
inline FockOperator normal_ordered_operator(const SpacePtr& space, const CoefficientTensor& t) {
  const FockSpace& s = *space;
  const int d = s.points(), m = t.m, n = t.n;
  if (t.d != d || t.c.rows() != ipow(d, m) || t.c.cols() != ipow(d, n))
    throw PreconditionError("coefficient tensor does not match the grid");
  // C'(i, jrev) = c(i, rev jrev): the annihilators strip the leading slots in reverse order
  Mat cr(t.c.rows(), t.c.cols());
  for (Index J = 0; J < t.c.cols(); ++J) cr.col(detail::reverse_index(J, n, d)) = t.c.col(J);
  const double base = std::pow(s.dtheta(), 0.5 * (m + n)) / (factorial(m) * factorial(n));
  SpMat total(s.dim(), s.dim());
  for (int N = n; N <= s.nmax(); ++N) {
    const int rest = N - n, M = rest + m;
    if (M > s.nmax()) break;
    const double w = base * std::sqrt(factorial(N) / factorial(rest)) * std::sqrt(factorial(M) / factorial(rest));
    const Index tail = ipow(d, rest);
    std::vector<Trip> trips;
    for (Index i = 0; i < cr.rows(); ++i)
      for (Index j = 0; j < cr.cols(); ++j) {
        cplx v = cr(i, j);
        if (v == cplx(0.0)) continue;
        for (Index r = 0; r < tail; ++r) trips.emplace_back(i * tail + r, j * tail + r, w * v);
      }
    SpMat k(s.sector_dim(M), s.sector_dim(N));
    k.setFromTriplets(trips.begin(), trips.end());
    SpMat blk = s.sector_projector(M) * SpMat(k * s.sector_projector(N));
    std::vector<Trip> out;
    for (int col = 0; col < blk.outerSize(); ++col)
      for (SpMat::InnerIterator it(blk, col); it; ++it)
        out.emplace_back(s.offset(M) + it.row(), s.offset(N) + it.col(), it.value());
    SpMat full(s.dim(), s.dim());
    full.setFromTriplets(out.begin(), out.end());
    total += full;
  }
  return {space, total};
}

// f_{m,n}[A] by triangular inversion: the (m <- n) block of A minus the contributions of the lower
// terms on the same diagonal (m - r, n - r), projected and divided by the top-term normalization.
inline CoefficientTensor coefficients_from_operator(const FockOperator& A, int m, int n) {
  const FockSpace& s = *A.space;
  if (m < 0 || n < 0 || m + n > s.nmax())
    throw PreconditionError("coefficient order m + n exceeds the reliable sectors");
  const int d = s.points();
  FockOperator residual = A;
  CoefficientTensor out;
  for (int r = std::min(m, n); r >= 0; --r) {
    const int mm = m - r, nn = n - r;
    Mat b = detail::sector_block(residual, mm, nn);
    SpMat pm = s.sector_projector(mm), pn = s.sector_projector(nn);
    const double kappa = std::pow(s.dtheta(), 0.5 * (mm + nn)) / std::sqrt(factorial(mm) * factorial(nn));
    Mat top = Mat(pm * b) * Mat(pn) / kappa;
    CoefficientTensor t{d, mm, nn, Mat(top.rows(), top.cols())};
    for (Index J = 0; J < top.cols(); ++J) t.c.col(detail::reverse_index(J, nn, d)) = top.col(J);
    if (r == 0) {
      out = std::move(t);
      break;
    }
    residual = residual - normal_ordered_operator(A.space, t);
  }
  return out;
}

// omega(t) = ell log(1 + t)
struct Indicatrix {
  double ell = 1.0;
  double operator()(double t) const { return ell * std::log1p(t); }

  // Subadditivity defect max(omega(s+t) - omega(s) - omega(t)) and max omega(t)/t on t >= t_tail.
  std::pair<double, double> sampled_check(std::uint64_t seed, int samples = 200, double t_tail = 1e6) const {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    double defect = -INFINITY, ratio = 0;
    for (int i = 0; i < samples; ++i) {
      double a = std::expm1(u(rng)), b = std::expm1(u(rng));
      defect = std::max(defect, (*this)(a + b) - (*this)(a) - (*this)(b));
      double t = t_tail * std::exp(u(rng) / 5);
      ratio = std::max(ratio, (*this)(t) / t);
    }
    return {defect, ratio};
  }
};

struct FormFactorFamily {
  std::string name;
  ScatteringFunction S = ScatteringFunction::constant(1.0);
  double mass = 1.0;
  double radius = 1.0;
  Indicatrix omega;
  int k_limit = 4;
  std::function<cplx(const std::vector<cplx>&)> eval;
  std::function<bool(int k, int m, int n)> pole = [](int, int, int) { return false; };
  bool double_cone = true;  // false for families meant only for the wedge axioms

  cplx operator()(const std::vector<cplx>& z) const {
    if (static_cast<int>(z.size()) > k_limit) throw PreconditionError("particle number beyond the family's range");
    cplx v = eval(z);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw PoleError("form factor evaluator is not finite");
    return v;
  }
  // Declared poles at z_n - z_m = i pi, 1-based, m < n.
  std::vector<std::pair<int, int>> declared_poles(int k) const {
    std::vector<std::pair<int, int>> out;
    for (int a = 1; a <= k; ++a)
      for (int b = a + 1; b <= k; ++b)
        if (pole(k, a, b)) out.emplace_back(a, b);
    return out;
  }
};

inline std::array<cplx, 2> total_momentum(const std::vector<cplx>& z, double mu) {
  cplx p0 = 0, p1 = 0;
  for (cplx x : z) {
    p0 += mu * std::cosh(x);
    p1 += mu * std::sinh(x);
  }
  return {p0, p1};
}

// Smallest r with the (effective) support inside |x0| + |x1| < r.
inline double double_cone_radius(const TestFunction& g) {
  auto r = g.support_radius();
  return std::abs(g.center[0]) + std::abs(g.center[1]) + r[0] + r[1];
}

inline FormFactorFamily constant_family(cplx c, const ScatteringFunction& S = ScatteringFunction::constant(1.0)) {
  FormFactorFamily f;
  f.name = "constant";
  f.S = S;
  f.radius = 0.0;
  f.eval = [c](const std::vector<cplx>& z) { return z.empty() ? c : cplx(0.0); };
  return f;
}

// S = 1: F_{2k} = 0, F_{2k+1} = (-1)^k / ((4 pi)^k k!) g~(p(z)) sum_sigma e^{-+ z_sigma(1)/2}
// prod_i sech((z_sigma(2i) - z_sigma(2i+1))/2). sign = +1 picks e^{-z/2}, sign = -1 picks e^{+z/2}.
inline FormFactorFamily ising_fermion_family(const TestFunction& g, int sign, double mu = 1.0) {
  if (sign != 1 && sign != -1) throw PreconditionError("sign must be +1 or -1");
  FormFactorFamily f;
  f.name = sign > 0 ? "ising-fermion-g(-)" : "ising-fermion-g(+)";
  f.S = ScatteringFunction::constant(1.0);
  f.mass = mu;
  f.radius = double_cone_radius(g);
  f.eval = [g, sign, mu](const std::vector<cplx>& z) -> cplx {
    const int k = static_cast<int>(z.size());
    if (k % 2 == 0) return 0.0;
    const int h = (k - 1) / 2;
    cplx sum = 0;
    for (const auto& s : all_permutations(k)) {
      cplx t = std::exp(-0.5 * sign * z[s[0]]);
      for (int i = 0; i < h; ++i) t /= std::cosh(0.5 * (z[s[2 * i + 1]] - z[s[2 * i + 2]]));
      sum += t;
    }
    auto p = total_momentum(z, mu);
    return (h % 2 ? -1.0 : 1.0) / (std::pow(4 * pi, h) * factorial(h)) * g.ft(p[0], p[1]) * sum;
  };
  f.pole = [](int k, int, int) { return k % 2 == 1 && k >= 3; };
  return f;
}

// S = -1, the coefficients of the Majorana component psi_c(f): F_1 only.
inline FormFactorFamily free_majorana_family(const TestFunction& f0, int component, double mu = 1.0) {
  if (component != 1 && component != -1) throw PreconditionError("majorana component must be +1 or -1");
  FormFactorFamily f;
  f.name = component > 0 ? "free-majorana(+)" : "free-majorana(-)";
  f.S = ScatteringFunction::constant(-1.0);
  f.mass = mu;
  f.radius = double_cone_radius(f0);
  f.eval = [f0, component, mu](const std::vector<cplx>& z) -> cplx {
    if (z.size() != 1) return 0.0;
    auto p = total_momentum(z, mu);
    return std::exp(I * (pi * (-2.0 + component) / 4.0)) * std::exp(0.5 * component * z[0]) * f0.ft(p[0], p[1]);
  };
  return f;
}

// F_1 = f~ o p: the left wedge field phi(f). Wedge axioms only.
inline FormFactorFamily left_field_family(const TestFunction& f0, const ScatteringFunction& S, double mu = 1.0) {
  FormFactorFamily f;
  f.name = "left-field";
  f.S = S;
  f.mass = mu;
  f.radius = double_cone_radius(f0);
  f.double_cone = false;
  f.eval = [f0, mu](const std::vector<cplx>& z) -> cplx {
    if (z.size() != 1) return 0.0;
    auto p = total_momentum(z, mu);
    return f0.ft(p[0], p[1]);
  };
  return f;
}

struct FamilyParams {
  TestFunction g = TestFunction::bump({0.0, 0.0}, {0.5, 0.5});
  int sign = 1;
  cplx constant = 1.0;
  double mass = 1.0;
  double ell = 1.0;
  ScatteringFunction S = ScatteringFunction::constant(1.0);
};

inline FormFactorFamily builtin_family(const std::string& name, const FamilyParams& p = {}) {
  FormFactorFamily f;
  if (name == "ising-fermion-g") f = ising_fermion_family(p.g, p.sign, p.mass);
  else if (name == "free-majorana") f = free_majorana_family(p.g, p.sign, p.mass);
  else if (name == "constant") f = constant_family(p.constant, p.S);
  else if (name == "left-field") f = left_field_family(p.g, p.S, p.mass);
  else throw ConfigError("unknown form factor family '" + name + "'");
  f.omega.ell = p.ell;
  return f;
}

// ---- boundary values ----

// Richardson limit eps -> 0 of v(eps) from eps, eps/2, eps/4 (kills the O(eps), O(eps^2) terms).
template <class T>
T richardson3(const T& f1, const T& f2, const T& f4) {
  return f1 / 3.0 - 2.0 * f2 + f4 * (8.0 / 3.0);
}

// Point inside the ordered tube approaching (t_1..t_m, t_{m+1} + i pi, ..) + shift: position j of k
// gets the offset eps j / (k + 1), so the largest offset stays below eps.
inline std::vector<cplx> boundary_point(const std::vector<double>& t, int m, double eps, double shift) {
  const int k = static_cast<int>(t.size());
  std::vector<cplx> z(k);
  for (int a = 0; a < k; ++a) {
    double off = eps * (a < m ? a + 1 : k - a) / (k + 1);
    z[a] = cplx(t[a], a < m ? shift + off : shift + pi - off);
  }
  return z;
}

inline cplx boundary_value(const FormFactorFamily& F, const std::vector<double>& t, int m, double shift = 0.0,
                           double eps = 1e-2) {
  return richardson3(F(boundary_point(t, m, eps, shift)), F(boundary_point(t, m, eps / 2, shift)),
                     F(boundary_point(t, m, eps / 4, shift)));
}

// F_{m+n}(theta + i0, eta + i pi - i0) on the grid (shift = 0), or the reflected boundary
// F_{m+n}(theta - i pi + i0, eta - i0) (shift = -pi).
inline CoefficientTensor boundary_tensor(const FormFactorFamily& F, const RapidityGrid& g, int m, int n,
                                         double eps = 1e-2, double shift = 0.0) {
  const int d = g.n_points, k = m + n;
  auto at = [&](double e) {
    Mat out(ipow(d, m), ipow(d, n));
    std::vector<double> t(k);
    for (Index r = 0; r < out.rows(); ++r)
      for (Index c = 0; c < out.cols(); ++c) {
        Index rr = r, cc = c;
        for (int a = m - 1; a >= 0; --a, rr /= d) t[a] = g.node(static_cast<int>(rr % d));
        for (int b = n - 1; b >= 0; --b, cc /= d) t[m + b] = g.node(static_cast<int>(cc % d));
        out(r, c) = F(boundary_point(t, m, e, shift));
      }
    return out;
  };
  Mat f1 = at(eps), f2 = at(eps / 2), f4 = at(eps / 4);
  double d12 = (f1 - f2).cwiseAbs().maxCoeff(), d24 = (f2 - f4).cwiseAbs().maxCoeff();
  double scale = std::max({1.0, f1.cwiseAbs().maxCoeff()});
  if (d24 > d12 + 1e-12 * scale) throw PoleError("boundary extrapolation diverges (pole near the boundary)");
  return {d, m, n, richardson3(f1, f2, f4)};
}

inline double boundary_match(const FormFactorFamily& F, const FockOperator& A, int m, int n) {
  CoefficientTensor c = coefficients_from_operator(A, m, n);
  CoefficientTensor b = boundary_tensor(F, A.space->grid(), m, n);
  return (c.c - b.c).cwiseAbs().maxCoeff();
}

// sqrt((-1)^k) with values in the closed upper half plane
inline cplx sqrt_sign(int k) { return k % 2 ? I : cplx(1.0); }

// Coefficients of U(j) A^* U(j) against sqrt((-1)^{m+n}) F_{m+n}(theta - i pi + i0, eta - i0).
inline double reflected_boundary_match(const FormFactorFamily& F, const FockOperator& A, int m, int n,
                                       const Reflection& r) {
  FockOperator b = r.Uj.conjugate(A.adjoint());
  CoefficientTensor c = coefficients_from_operator(b, m, n);
  CoefficientTensor t = boundary_tensor(F, A.space->grid(), m, n, 1e-2, -pi);
  return (c.c - sqrt_sign(m + n) * t.c).cwiseAbs().maxCoeff();
}

// Truncated A = sum_{m+n <= order} O_{m,n}[F boundary values]. Past order 2 the boundary values
// of a family with kinematic poles blow up at coinciding nodes, so keep order <= 2 there.
inline FockOperator family_operator(const SpacePtr& space, const FormFactorFamily& F, int order) {
  FockOperator a{space, SpMat(space->dim(), space->dim())};
  for (int k = 0; k <= std::min(order, space->nmax()); ++k)
    for (int m = 0; m <= k; ++m) a = a + normal_ordered_operator(space, boundary_tensor(F, space->grid(), m, k - m));
  return a;
}

// ---- axiom verification ----

enum class Status { pass, warn, fail };
inline const char* status_name(Status s) { return s == Status::pass ? "pass" : s == Status::warn ? "warn" : "fail"; }

struct AxiomRow {
  std::string axiom;
  int k = 0;
  double residual = 0;
  double tolerance = 0;
  Status status = Status::pass;
  std::string note;
};

struct AxiomReport {
  std::string family;
  std::vector<AxiomRow> rows;

  bool passed() const {
    return std::none_of(rows.begin(), rows.end(), [](const AxiomRow& r) { return r.status == Status::fail; });
  }
  double worst(const std::string& axiom) const {
    double w = 0;
    for (auto& r : rows)
      if (r.axiom == axiom) w = std::max(w, r.residual);
    return w;
  }
  void add(std::string axiom, int k, double res, double tol, std::string note = {}) {
    rows.push_back({std::move(axiom), k, res, tol, res < tol ? Status::pass : Status::fail, std::move(note)});
  }
};

struct Sampler {
  std::uint64_t seed = 1;
  int samples = 50;
  int polydiscs = 20;
  double re_span = 2.0;
  double rho = 1e-2;
  int contour_points = 256;
  double tol = 1e-9;
  double residue_tol = 1e-6;
};

namespace detail {

// Imaginary parts 0 < y_1 < ... < y_k < pi with all gaps (and the two ends) at least `gap`.
inline std::vector<double> ordered_imag(std::mt19937_64& rng, int k, double gap) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(k + 1);
  double tot = 0;
  for (auto& x : w) tot += (x = u(rng) + 0.05);
  double free = pi - (k + 1) * gap;
  std::vector<double> y(k);
  double acc = 0;
  for (int i = 0; i < k; ++i) {
    acc += gap + free * w[i] / tot;
    y[i] = acc;
  }
  return y;
}

inline double boundary_distance(const std::vector<double>& y, double lo) {
  double d = std::min(y.front() - lo, lo + pi - y.back());
  for (std::size_t i = 1; i < y.size(); ++i) d = std::min(d, (y[i] - y[i - 1]) / std::sqrt(2.0));
  return d;
}

// Largest |(1/2 pi i) oint F dz_j| / (rho max|F|) over the coordinates of the polydisc.
inline double cauchy_probe(const FormFactorFamily& F, std::vector<cplx> z, double rho, int points) {
  double worst = 0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    cplx c = z[j];
    auto [res, fmax] = circle_average(
        [&](cplx w) {
          z[j] = w;
          return F(z);
        },
        c, rho, points);
    z[j] = c;
    if (fmax > 0) worst = std::max(worst, std::abs(res) / (rho * fmax));
  }
  return worst;
}

// Fits y <= a + b x (b >= 0) on the first half of the samples, then measures the worst excess on
// the held-out half.
struct EnvelopeFit {
  double log_c = 0, slope = 0, excess = 0;
  int used = 0;
};

inline EnvelopeFit envelope_fit(const std::vector<double>& x, const std::vector<double>& y) {
  EnvelopeFit e;
  std::size_t n = x.size(), half = n / 2;
  e.used = static_cast<int>(n);
  if (half < 2) return e;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < half; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double den = half * sxx - sx * sx;
  e.slope = den > 1e-12 ? std::max(0.0, (half * sxy - sx * sy) / den) : 0.0;
  e.log_c = -INFINITY;
  for (std::size_t i = 0; i < half; ++i) e.log_c = std::max(e.log_c, y[i] - e.slope * x[i]);
  e.excess = -INFINITY;
  for (std::size_t i = half; i < n; ++i) e.excess = std::max(e.excess, y[i] - e.log_c - e.slope * x[i]);
  return e;
}

inline void add_envelope(AxiomReport& rep, const std::string& axiom, int k, const std::vector<double>& x,
                         const std::vector<double>& y) {
  EnvelopeFit e = envelope_fit(x, y);
  AxiomRow row{axiom, k, std::max(0.0, e.excess), 1.0, Status::pass, {}};
  char buf[128];
  std::snprintf(buf, sizeof buf, "log c = %.3g, c' = %.3g, %d samples", e.log_c, e.slope, e.used);
  row.note = buf;
  if (e.used >= 4 && e.excess > 1.0) row.status = Status::warn;
  rep.rows.push_back(row);
}

}  // namespace detail

// Wedge axioms FW1-FW4 for k = 1..k_max.
inline AxiomReport verify_fw(const FormFactorFamily& F, int k_max, const Sampler& sm = {}) {
  if (k_max > 4) throw PreconditionError("k_max must be at most 4");
  AxiomReport rep;
  rep.family = F.name;
  std::mt19937_64 rng(sm.seed);
  std::uniform_real_distribution<double> re(-sm.re_span, sm.re_span);
  for (int k = 1; k <= k_max; ++k) {
    // FW1: closed contours inside R^k + i I_+
    double fw1 = 0;
    for (int s = 0; s < sm.polydiscs; ++s) {
      auto y = detail::ordered_imag(rng, k, 0.2);
      std::vector<cplx> z(k);
      for (int i = 0; i < k; ++i) z[i] = cplx(re(rng), y[i]);
      fw1 = std::max(fw1, detail::cauchy_probe(F, z, 0.05, sm.contour_points));
    }
    rep.add("FW1", k, fw1, sm.tol);
    // FW2: adjacent exchanges of boundary values
    if (k >= 2) {
      double fw2 = 0;
      for (int s = 0; s < sm.samples; ++s) {
        std::vector<double> t(k);
        for (auto& x : t) x = re(rng);
        int i = static_cast<int>(rng() % (k - 1));
        auto bval = [&](const std::vector<double>& th) { return boundary_value(F, th, k); };
        auto sw = t;
        std::swap(sw[i], sw[i + 1]);
        cplx lhs = bval(t), rhs = F.S(cplx(t[i + 1] - t[i])) * bval(sw);
        fw2 = std::max(fw2, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
      }
      rep.add("FW2", k, fw2, sm.tol);
    }
    // FW3: real boundaries with j trailing pi shifts; FW4: interior bound with distance factor
    for (int j = 0; j <= k; ++j) {
      std::vector<double> xs, ys;
      for (int s = 0; s < sm.samples; ++s) {
        std::vector<cplx> z(k);
        double x = 0;
        for (int a = 0; a < k; ++a) {
          double t = 2 * re(rng);
          z[a] = cplx(t, a < k - j ? 1e-3 * (a + 1) : pi - 1e-3 * (k - a));
          x += F.omega(std::cosh(t));
        }
        double v = std::abs(F(z));
        if (v > 0) {
          xs.push_back(x);
          ys.push_back(std::log(v));
        }
      }
      detail::add_envelope(rep, "FW3", k, xs, ys);
    }
    std::vector<double> xs, ys;
    for (int s = 0; s < sm.samples; ++s) {
      auto y = detail::ordered_imag(rng, k, 1e-3);
      std::vector<cplx> z(k);
      double x = 0, grow = 0;
      for (int a = 0; a < k; ++a) {
        z[a] = cplx(2 * re(rng), y[a]);
        x += F.omega(std::cosh(z[a].real()));
        grow += F.mass * F.radius * std::sinh(z[a]).imag();
      }
      double v = std::abs(F(z));
      if (v > 0) {
        xs.push_back(x);
        ys.push_back(std::log(v) - grow + 0.5 * k * std::log(detail::boundary_distance(y, 0.0)));
      }
    }
    detail::add_envelope(rep, "FW4", k, xs, ys);
  }
  return rep;
}

// Residue of F_k in z_n at z_n = z_m + i pi, by the trapezoid rule on a circle of radius rho.
inline cplx numeric_residue(const FormFactorFamily& F, std::vector<cplx> z, int m, int n, double rho, int points) {
  const int k = static_cast<int>(z.size());
  z[n - 1] = z[m - 1] + I * pi;
  for (auto [a, b] : F.declared_poles(k))
    if (std::make_pair(a, b) != std::make_pair(m, n) && std::abs(z[b - 1] - z[a - 1] - I * pi) < 2 * rho)
      throw PoleError("another declared pole lies within 2 rho of the contour");
  cplx c = z[n - 1];
  return circle_average(
             [&](cplx w) {
               z[n - 1] = w;
               return F(z);
             },
             c, rho, points)
      .first;
}

// The residue predicted from F_{k-2}.
inline cplx predicted_residue(const FormFactorFamily& F, std::vector<cplx> z, int m, int n) {
  const int k = static_cast<int>(z.size());
  z[n - 1] = z[m - 1] + I * pi;
  cplx a = 1.0, b = 1.0;
  for (int j = m; j <= n; ++j) a *= F.S(z[j - 1] - z[m - 1]);
  for (int p = 1; p <= k; ++p) b *= F.S(z[m - 1] - z[p - 1]);
  std::vector<cplx> hat;
  for (int p = 1; p <= k; ++p)
    if (p != m && p != n) hat.push_back(z[p - 1]);
  double sgn = k % 2 ? -1.0 : 1.0;
  return -1.0 / (2 * pi * I) * a * (1.0 - sgn * b) * F(hat);
}

// Double-cone axioms FD1-FD6 (FD3, FD4 in their graded form) for k = 1..k_max.
inline AxiomReport verify_fd(const FormFactorFamily& F, int k_max, const Sampler& sm = {}) {
  if (k_max > 4) throw PreconditionError("k_max must be at most 4");
  AxiomReport rep;
  rep.family = F.name;
  std::mt19937_64 rng(sm.seed);
  std::uniform_real_distribution<double> re(-sm.re_span, sm.re_span), u01(0.0, 1.0);
  // a point with Im z_1 < ... < Im z_k < Im z_1 + pi
  auto tube_point = [&](int k, double gap) {
    double base = -pi + 2 * pi * u01(rng);
    auto y = detail::ordered_imag(rng, k, gap);
    std::vector<cplx> z(k);
    for (int i = 0; i < k; ++i) z[i] = cplx(re(rng), base + y[i] - y[0] + gap / 2);
    return z;
  };
  for (int k = 1; k <= k_max; ++k) {
    double fd1 = 0;
    for (int s = 0; s < sm.polydiscs; ++s) fd1 = std::max(fd1, detail::cauchy_probe(F, tube_point(k, 0.2), 0.05, sm.contour_points));
    rep.add("FD1", k, fd1, sm.tol);
    if (k >= 2) {
      double fd2 = 0;
      for (int s = 0; s < sm.samples; ++s) {
        auto z = tube_point(k, 0.2);
        for (int i = 0; i + 1 < k; ++i) {
          auto sw = z;
          std::swap(sw[i], sw[i + 1]);
          cplx lhs = F(z);
          fd2 = std::max(fd2, std::abs(lhs - F.S(z[i + 1] - z[i]) * F(sw)) / std::max(1.0, std::abs(lhs)));
        }
      }
      rep.add("FD2", k, fd2, sm.tol);
    }
    double fd3 = 0;
    for (int s = 0; s < sm.samples; ++s) {
      auto z = tube_point(k, 0.2);
      cplx f0 = F(z);
      for (int j = 0; j < k; ++j) {
        auto sh = z;
        sh[j] += 2 * pi * I;
        cplx prod = k % 2 ? -1.0 : 1.0;
        for (int i = 0; i < k; ++i)
          if (i != j) prod *= F.S(z[i] - z[j]);
        fd3 = std::max(fd3, std::abs(F(sh) - prod * f0) / std::max(1.0, std::abs(f0)));
      }
    }
    rep.add("FD3", k, fd3, sm.tol);
    // FD4: every pair m < n; a pair without a declared pole must have zero residue
    if (k >= 2) {
      double fd4 = 0;
      for (int m = 1; m <= k; ++m)
        for (int n = m + 1; n <= k; ++n)
          for (int s = 0; s < 4; ++s) {
            std::vector<cplx> z(k);
            // real parts spread out so no other pair comes near i pi
            for (int i = 0; i < k; ++i) z[i] = cplx(-1.5 + 1.1 * i + 0.3 * u01(rng), 0.0);
            cplx got = numeric_residue(F, z, m, n, sm.rho, sm.contour_points);
            cplx want = predicted_residue(F, z, m, n);
            double err = std::abs(want) > 1e-14 ? std::abs(got - want) / std::abs(want) : std::abs(got);
            fd4 = std::max(fd4, err);
          }
      rep.add("FD4", k, fd4, sm.residue_tol, "relative where the predicted residue is nonzero");
    }
    // FD5: both families of real boundaries; FD6: interior of I_+ and I_-
    for (int side = 0; side < 2; ++side)
      for (int j = 0; j <= k; ++j) {
        std::vector<double> xs, ys;
        for (int s = 0; s < sm.samples; ++s) {
          std::vector<cplx> z(k);
          double x = 0;
          for (int a = 0; a < k; ++a) {
            double t = 2 * re(rng);
            double y = side == 0 ? (a < k - j ? 1e-3 * (a + 1) : pi - 1e-3 * (k - a))
                                 : (a < k - j ? -pi + 1e-3 * (a + 1) : -1e-3 * (k - a));
            z[a] = cplx(t, y);
            x += F.omega(std::cosh(t));
          }
          double v = std::abs(F(z));
          if (v > 0) {
            xs.push_back(x);
            ys.push_back(std::log(v));
          }
        }
        detail::add_envelope(rep, "FD5", k, xs, ys);
      }
    for (int side = 0; side < 2; ++side) {
      std::vector<double> xs, ys;
      for (int s = 0; s < sm.samples; ++s) {
        auto y = detail::ordered_imag(rng, k, 1e-3);
        double lo = side == 0 ? 0.0 : -pi;
        std::vector<cplx> z(k);
        double x = 0, grow = 0;
        for (int a = 0; a < k; ++a) {
          z[a] = cplx(2 * re(rng), y[a] + lo);
          x += F.omega(std::cosh(z[a].real()));
          grow += F.mass * F.radius * std::abs(std::sinh(z[a]).imag());
        }
        std::vector<double> ys_local(y);
        for (auto& v : ys_local) v += lo;
        double v = std::abs(F(z));
        if (v > 0) {
          xs.push_back(x);
          ys.push_back(std::log(v) - grow + 0.5 * k * std::log(detail::boundary_distance(ys_local, lo)));
        }
      }
      detail::add_envelope(rep, "FD6", k, xs, ys);
    }
  }
  return rep;
}

}  // namespace zfqft
