#pragma once

#include <Eigen/QR>
#include <Eigen/SVD>
#include <bit>
#include <numeric>
#include <random>

#include "fockspace.hpp"

namespace zfqft {

enum class Side { left, right, global };
inline const char* side_name(Side s) { return s == Side::left ? "left" : s == Side::right ? "right" : "global"; }

// Orthonormal basis of the column space, and of the null space, via column-pivoted QR.
// Pivots count when above tol, relative to the largest one but never below tol itself, so that a
// matrix of roundoff has rank 0.
inline Index qr_rank(const Eigen::ColPivHouseholderQR<Mat>& qr, double tol) {
  const auto& r = qr.matrixR();
  const Index n = std::min(r.rows(), r.cols());
  if (n == 0) return 0;
  const double cut = tol * std::max(1.0, std::abs(r(0, 0)));
  Index k = 0;
  while (k < n && std::abs(r(k, k)) > cut) ++k;
  return k;
}
inline Mat range_basis(const Mat& cols, double tol = 1e-10) {
  if (cols.cols() == 0) return Mat(cols.rows(), 0);
  Eigen::ColPivHouseholderQR<Mat> qr(cols);
  Mat q = qr.householderQ() * Mat::Identity(cols.rows(), qr_rank(qr, tol));
  return q;
}
inline Mat null_basis(const Mat& m, double tol = 1e-10) {
  const Index n = m.cols();
  if (m.rows() == 0) return Mat::Identity(n, n);
  Eigen::ColPivHouseholderQR<Mat> qr(m.adjoint());
  Mat q = qr.householderQ() * Mat::Identity(n, n);
  return q.rightCols(n - qr_rank(qr, tol));
}

// Linear subspace of operators, kept as an orthonormal basis of vectorized matrices.
struct OpSpace {
  Index dim = 0;  // Hilbert space dimension
  Mat basis;      // (dim*dim) x rank

  Index rank() const { return basis.cols(); }
  static Vec vec(const Mat& a) { return Eigen::Map<const Vec>(a.data(), a.size()); }
  Mat unvec(const Vec& v) const { return Eigen::Map<const Mat>(v.data(), dim, dim); }

  static OpSpace span(Index dim, const Mat& cols, double tol = 1e-10) {
    return {dim, range_basis(cols, tol)};
  }
  static OpSpace span(Index dim, const std::vector<Mat>& ops, double tol = 1e-10) {
    Mat cols(dim * dim, static_cast<Index>(ops.size()));
    for (std::size_t i = 0; i < ops.size(); ++i) cols.col(static_cast<Index>(i)) = vec(ops[i]);
    return span(dim, cols, tol);
  }

  Mat element(Index i) const { return unvec(basis.col(i)); }
  std::vector<Mat> elements() const {
    std::vector<Mat> out;
    for (Index i = 0; i < rank(); ++i) out.push_back(element(i));
    return out;
  }
  // Distance of a from the subspace (Frobenius).
  double residual(const Mat& a) const {
    Vec v = vec(a);
    return (v - basis * (basis.adjoint() * v)).norm();
  }
  bool contains(const Mat& a, double tol = 1e-12) const { return residual(a) <= tol * std::max(1.0, a.norm()); }
  // Largest distance of a unit basis vector of `o` from this subspace.
  double inclusion_residual(const OpSpace& o) const {
    if (o.rank() == 0) return 0.0;
    Mat d = o.basis - basis * (basis.adjoint() * o.basis);
    return d.colwise().norm().maxCoeff();
  }
};

// Intersection via the null space of [A, -B].
inline OpSpace intersect(const OpSpace& a, const OpSpace& b, double tol = 1e-10) {
  if (a.rank() == 0 || b.rank() == 0) return {a.dim, Mat(a.dim * a.dim, 0)};
  Mat m(a.basis.rows(), a.rank() + b.rank());
  m << a.basis, -b.basis;
  Mat v = null_basis(m, tol);
  return OpSpace::span(a.dim, Mat(a.basis * v.topRows(a.rank())), tol);
}

// Fixed points of a linear map T restricted to S (T must preserve S).
inline OpSpace fixed_points(const OpSpace& s, const std::function<Mat(const Mat&)>& T, double tol = 1e-10) {
  Mat image(s.basis.rows(), s.rank());
  for (Index i = 0; i < s.rank(); ++i) image.col(i) = OpSpace::vec(T(s.element(i)));
  Mat coef = s.basis.adjoint() * image - Mat::Identity(s.rank(), s.rank());
  return OpSpace::span(s.dim, Mat(s.basis * null_basis(coef, tol)), tol);
}

// {X : X g = g X for all g}
inline OpSpace commutant(Index dim, const std::vector<Mat>& gens, double tol = 1e-10) {
  Mat id = Mat::Identity(dim, dim);
  Mat big(dim * dim * static_cast<Index>(gens.size()), dim * dim);
  for (std::size_t k = 0; k < gens.size(); ++k) {
    // vec(X g - g X) = (g^T (x) 1 - 1 (x) g) vec X
    Mat gt = gens[k].transpose();
    Mat blk(dim * dim, dim * dim);
    for (Index i = 0; i < dim; ++i)
      for (Index j = 0; j < dim; ++j) blk.block(i * dim, j * dim, dim, dim) = gt(i, j) * id - (i == j ? gens[k] : Mat::Zero(dim, dim));
    big.block(static_cast<Index>(k) * dim * dim, 0, dim * dim, dim * dim) = blk;
  }
  return OpSpace::span(dim, null_basis(big, tol), tol);
}

// *-algebra generated by gens (with the identity), by closing the span under products.
inline OpSpace generated_algebra(Index dim, std::vector<Mat> gens, double tol = 1e-10) {
  std::vector<Mat> g = gens;
  for (auto& x : gens) g.push_back(x.adjoint());
  std::vector<Mat> ops{Mat::Identity(dim, dim)};
  ops.insert(ops.end(), g.begin(), g.end());
  OpSpace s = OpSpace::span(dim, ops, tol);
  while (true) {
    std::vector<Mat> next = s.elements();
    for (const auto& b : s.elements())
      for (const auto& x : g) next.push_back(b * x);
    OpSpace t = OpSpace::span(dim, next, tol);
    if (t.rank() == s.rank()) return t;
    s = std::move(t);
  }
}

struct CarElement {
  Mat m;
  Grade grade = Grade::mixed;
  Side side = Side::global;
  unsigned modes = 0;  // support bitmask, 0 if unknown
};

// Finitely many fermionic modes, left ones first, in the Jordan-Wigner representation.
// Layout: the last left and first right mode form the localized (middle) region; the rest are the
// outer left/right regions. With a single mode on a side the middle keeps only the right mode
// (localized algebra = right algebra).
class CarSystem {
 public:
  CarSystem(int n_left, int n_right) : nl_(n_left), nr_(n_right) {
    if (n_left < 1 || n_right < 1 || n_left + n_right > 8) throw ConfigError("mode counts must be >= 1 with total <= 8");
    const int k = modes();
    dim_ = Index(1) << k;
    Mat sz(2, 2), sm(2, 2), id2 = Mat::Identity(2, 2);
    sz << 1, 0, 0, -1;  // basis |0>, |1>
    sm << 0, 1, 0, 0;   // |0><1|
    for (int i = 0; i < k; ++i) {
      Mat op = Mat::Identity(1, 1);
      for (int j = 0; j < k; ++j) op = kron(op, j < i ? sz : j == i ? sm : id2);
      a_.push_back(op);
    }
    gamma_ = parity(all_mask());
    z_ = cplx(0.5, -0.5) * Mat::Identity(dim_, dim_) + cplx(0.5, 0.5) * gamma_;
    if (n_left >= 2 && n_right >= 2) {
      middle_ = bit(nl_ - 1) | bit(nl_);
    } else {
      middle_ = bit(nl_);
    }
    outer_left_ = left_mask() & ~middle_;
    outer_right_ = right_mask() & ~middle_;
  }

  int n_left() const { return nl_; }
  int n_right() const { return nr_; }
  int modes() const { return nl_ + nr_; }
  Index dim() const { return dim_; }
  const Mat& a(int i) const { return a_[i]; }
  Mat adag(int i) const { return a_[i].adjoint(); }
  const Mat& gamma() const { return gamma_; }
  const Mat& twist() const { return z_; }
  Mat identity() const { return Mat::Identity(dim_, dim_); }

  static unsigned bit(int i) { return 1u << i; }
  unsigned all_mask() const { return (1u << modes()) - 1; }
  unsigned left_mask() const { return (1u << nl_) - 1; }
  unsigned right_mask() const { return all_mask() & ~left_mask(); }
  unsigned middle() const { return middle_; }
  unsigned outer_left() const { return outer_left_; }
  unsigned outer_right() const { return outer_right_; }

  // prod over modes in mask of (1 - 2 n_i)
  Mat parity(unsigned mask) const {
    Mat p = identity();
    for (int i = 0; i < modes(); ++i)
      if (mask & bit(i)) p = p * (identity() - 2.0 * adag(i) * a_[i]);
    return p;
  }

  std::vector<Mat> generators(unsigned mask) const {
    std::vector<Mat> g;
    for (int i = 0; i < modes(); ++i)
      if (mask & bit(i)) g.push_back(a_[i]);
    return g;
  }
  // F(X): the algebra of the modes in X
  OpSpace field_algebra(unsigned mask) const {
    if (mask == 0) return OpSpace::span(dim_, std::vector<Mat>{identity()});
    return generated_algebra(dim_, generators(mask));
  }

  Vec vacuum() const {
    Vec v = Vec::Zero(dim_);
    v[0] = 1.0;
    return v;
  }

 private:
  static Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
      for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
  }

  int nl_, nr_;
  Index dim_ = 0;
  std::vector<Mat> a_;
  Mat gamma_, z_;
  unsigned middle_ = 0, outer_left_ = 0, outer_right_ = 0;
};

inline double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

inline Grade classify(const CarSystem& s, const Mat& a, double tol = 1e-12) {
  Mat c = s.gamma() * a * s.gamma();
  bool even = max_abs(c - a) <= tol * std::max(1.0, max_abs(a));
  bool odd = max_abs(c + a) <= tol * std::max(1.0, max_abs(a));
  if (even) return Grade::even;
  if (odd) return Grade::odd;
  return Grade::mixed;
}

inline CarElement make_element(const CarSystem& s, Mat m, Side side = Side::global, unsigned modes = 0) {
  Grade g = classify(s, m);
  return {std::move(m), g, side, modes};
}

// A_+- = (A +- Gamma A Gamma) / 2
inline std::pair<Mat, Mat> graded_split(const CarSystem& s, const Mat& a) {
  Mat c = s.gamma() * a * s.gamma();
  return {0.5 * (a + c), 0.5 * (a - c)};
}

inline Mat twist_conjugate(const CarSystem& s, const Mat& a) { return s.twist() * a * s.twist().adjoint(); }

// Sign of a term in the graded reordering: each pair of labels a < b that ends up with b in front
// of a contributes -1 when both picked parts are odd.
inline double graded_sign(const std::vector<int>& sigma, const std::vector<int>& s) {
  const int n = static_cast<int>(sigma.size());
  double sign = 1;
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k)
      if (sigma[j] > sigma[k] && s[sigma[j]] < 0 && s[sigma[k]] < 0) sign = -sign;
  return sign;
}

// The same sum with the sign read off positions: pairs j < k with sigma(j) > sigma(k) weighted by
// the parts picked for A_j, A_k.
inline double positional_sign(const std::vector<int>& sigma, const std::vector<int>& s) {
  const int n = static_cast<int>(sigma.size());
  double sign = 1;
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k)
      if (sigma[j] > sigma[k] && s[j] < 0 && s[k] < 0) sign = -sign;
  return sign;
}

struct PermuteResidual {
  double label = 0;       // label-based signs
  double positional = 0;  // positional signs
};

// || A_sigma(1) ... A_sigma(n) - sum_s sign * alpha_s1(A_1) ... alpha_sn(A_n) ||. The elements must
// pairwise graded-commute (odd parts anticommute, everything else commutes).
inline PermuteResidual verify_graded_permute(const CarSystem& sys, const std::vector<CarElement>& el,
                                             const std::vector<int>& sigma) {
  const int n = static_cast<int>(el.size());
  if (static_cast<int>(sigma.size()) != n) throw PreconditionError("permutation size does not match");
  std::vector<std::pair<Mat, Mat>> parts;
  for (const auto& e : el) {
    parts.push_back(graded_split(sys, e.m));
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (el[i].modes && el[j].modes && (el[i].modes & el[j].modes))
        throw GradeError("elements share modes, so they need not graded-commute");
      const auto &a = parts[i], &b = parts[j];
      double r = max_abs(a.first * b.first - b.first * a.first) + max_abs(a.first * b.second - b.second * a.first) +
                 max_abs(a.second * b.first - b.first * a.second) + max_abs(a.second * b.second + b.second * a.second);
      if (r > 1e-12) throw GradeError("elements are not in each other's twisted commutant");
    }
  Mat lhs = sys.identity();
  for (int j = 0; j < n; ++j) lhs = lhs * el[sigma[j]].m;
  Mat rl = Mat::Zero(sys.dim(), sys.dim()), rp = rl;
  std::vector<int> s(n);
  for (unsigned bits = 0; bits < (1u << n); ++bits) {
    Mat prod = sys.identity();
    for (int j = 0; j < n; ++j) {
      s[j] = (bits >> j) & 1u ? -1 : 1;
      prod = prod * (s[j] > 0 ? parts[j].first : parts[j].second);
    }
    rl += graded_sign(sigma, s) * prod;
    rp += positional_sign(sigma, s) * prod;
  }
  return {spectral_norm(Mat(lhs - rl)), spectral_norm(Mat(lhs - rp))};
}

// V_L: parity of the outer left modes. With no outer left modes it is the identity.
inline CarElement disorder_left(const CarSystem& s) {
  return {s.parity(s.outer_left()), Grade::even, Side::left, s.outer_left()};
}
// V_R = Gamma V_L
inline CarElement disorder_right(const CarSystem& s) {
  return {s.gamma() * s.parity(s.outer_left()), Grade::even, Side::right, s.all_mask() & ~s.outer_left()};
}

// The wedge algebras of the finite model. M'_x is the algebra of the outer left modes, M^t_x that of
// the middle and outer right ones, M^t_y that of the outer right ones; M = Z^* M^t Z.
struct WedgeAlgebras {
  OpSpace M_x_prime, M_x, M_x_t, M_y, M_y_t, M_y_prime;
  OpSpace F_local;  // F(O) = M^t_x cap M'_y
};

inline Mat untwist(const CarSystem& s, const Mat& a) { return s.twist().adjoint() * a * s.twist(); }

inline OpSpace map_space(const OpSpace& sp, const std::function<Mat(const Mat&)>& f) {
  std::vector<Mat> out;
  for (const auto& e : sp.elements()) out.push_back(f(e));
  return OpSpace::span(sp.dim, out);
}

inline WedgeAlgebras wedge_algebras(const CarSystem& s) {
  WedgeAlgebras w;
  auto un = [&](const Mat& a) { return untwist(s, a); };
  w.M_x_prime = s.field_algebra(s.outer_left());
  w.M_x_t = s.field_algebra(s.middle() | s.outer_right());
  w.M_x = map_space(w.M_x_t, un);
  w.M_y_t = s.field_algebra(s.outer_right());
  w.M_y = map_space(w.M_y_t, un);
  w.M_y_prime = commutant(s.dim(), w.M_y.elements());
  w.F_local = intersect(w.M_x_t, w.M_y_prime);
  return w;
}

struct IdentityCheck {
  std::string name;
  double residual = 0;
  Index dim_found = -1, dim_expected = -1;
  bool exact = true;  // dimension-count check rather than float residual
  bool passed(double tol) const { return residual < tol && dim_found == dim_expected; }
};

// V A V^* = Gamma A Gamma on the modes in `flip`, V A V^* = A on `keep`. Checked on generators.
inline double disorder_residual(const CarSystem& s, const Mat& v, unsigned flip, unsigned keep) {
  double r = max_abs(Mat(v * v.adjoint() - s.identity())) + max_abs(Mat(v * s.gamma() - s.gamma() * v));
  for (const Mat& g : s.generators(flip)) {
    r = std::max(r, max_abs(Mat(v * g * v.adjoint() - s.gamma() * g * s.gamma())));
    r = std::max(r, max_abs(Mat(v * g.adjoint() * v.adjoint() - s.gamma() * g.adjoint() * s.gamma())));
  }
  for (const Mat& g : s.generators(keep)) {
    r = std::max(r, max_abs(Mat(v * g * v.adjoint() - g)));
    r = std::max(r, max_abs(Mat(v * g.adjoint() * v.adjoint() - g.adjoint())));
  }
  return r;
}

// m(A) = (A + V_L A V_L^* + V_R A V_R^* + V_L V_R A V_R^* V_L^*) / 4
inline Mat conditional_expectation(const CarSystem& s, const Mat& a) {
  Mat vl = disorder_left(s).m, vr = disorder_right(s).m;
  Mat vlr = vl * vr;
  return 0.25 * (a + vl * a * vl.adjoint() + vr * a * vr.adjoint() + vlr * a * vlr.adjoint());
}

// A = A_1 + A_2 V with A_1, A_2 in F(O), solved in a basis of F(O); beta(A) = A_1 - A_2 V.
struct BetaSplit {
  Mat a1, a2;
  double residual = 0;
};

inline BetaSplit beta_split(const OpSpace& F, const Mat& a, const Mat& v, double tol = 1e-10) {
  const Index r = F.rank();
  Mat sys(F.basis.rows(), 2 * r);
  for (Index i = 0; i < r; ++i) {
    sys.col(i) = F.basis.col(i);
    sys.col(r + i) = OpSpace::vec(F.element(i) * v);
  }
  Vec rhs = OpSpace::vec(a);
  Vec c = sys.completeOrthogonalDecomposition().solve(rhs);
  BetaSplit out;
  out.residual = (sys * c - rhs).norm();
  if (out.residual > tol * std::max(1.0, rhs.norm()))
    throw DecompositionError("element is not in F(O) + F(O) V");
  out.a1 = F.unvec(F.basis * c.head(r));
  out.a2 = F.unvec(F.basis * c.tail(r));
  return out;
}

inline Mat beta_automorphism(const OpSpace& F, const Mat& a, const Mat& v) {
  BetaSplit b = beta_split(F, a, v);
  return b.a1 - b.a2 * v;
}

struct CarReport {
  int n_left = 0, n_right = 0;
  std::vector<IdentityCheck> checks;
  bool passed(double tol) const {
    return std::all_of(checks.begin(), checks.end(), [tol](const IdentityCheck& c) { return c.passed(tol); });
  }
  void add(std::string name, double res) { checks.push_back({std::move(name), res, -1, -1, false}); }
  void add_dims(std::string name, double res, Index found, Index expected) {
    checks.push_back({std::move(name), res, found, expected, true});
  }
};

inline Mat random_matrix(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) {
      double re = n(rng);
      m(i, j) = cplx(re, n(rng));
    }
  return m;
}

inline Mat random_in(std::mt19937_64& rng, const OpSpace& sp) {
  return sp.unvec(sp.basis * random_matrix(rng, sp.rank(), 1).col(0));
}

// The nets F^, A^, F, A-check and A as fixed points of alpha and beta.
inline void fixed_point_nets(const CarSystem& s, const WedgeAlgebras& w, CarReport& rep) {
  const Mat vl = disorder_left(s).m;
  const OpSpace& F = w.F_local;
  const Index dF = ipow(4, std::popcount(s.middle()));
  rep.add_dims("F(O) = M^t_x cap M'_y is the middle mode algebra", F.inclusion_residual(s.field_algebra(s.middle())),
               F.rank(), dF);
  std::vector<Mat> gens = s.generators(s.middle());
  gens.push_back(vl);
  OpSpace Fhat = generated_algebra(s.dim(), gens);
  rep.add_dims("dim F^ = 2 dim F", 0.0, Fhat.rank(), 2 * dF);
  auto alpha = [&](const Mat& a) { return Mat(s.gamma() * a * s.gamma()); };
  auto beta = [&](const Mat& a) { return beta_automorphism(F, a, vl); };
  auto even_part = [&](const OpSpace& sp) {
    std::vector<Mat> e;
    for (const auto& x : sp.elements()) e.push_back(graded_split(s, x).first);
    return OpSpace::span(s.dim(), e);
  };
  auto same = [](const OpSpace& a, const OpSpace& b) {
    return std::max(a.inclusion_residual(b), b.inclusion_residual(a));
  };
  OpSpace Ahat = even_part(Fhat);
  OpSpace fa = fixed_points(Fhat, alpha);
  rep.add_dims("alpha-fixed(F^) = A^", same(fa, Ahat), fa.rank(), Ahat.rank());
  OpSpace fb = fixed_points(Fhat, beta);
  rep.add_dims("beta-fixed(F^) = F", same(fb, F), fb.rank(), dF);
  OpSpace fab = fixed_points(Fhat, [&](const Mat& a) { return alpha(beta(a)); });
  std::vector<Mat> check;
  for (const auto& x : F.elements()) {
    auto [p, m] = graded_split(s, x);
    check.push_back(p);
    check.push_back(m * vl);
  }
  OpSpace mixed = OpSpace::span(s.dim(), check);
  rep.add_dims("(alpha beta)-fixed(F^) = F_+ + F_- V_L", same(fab, mixed), fab.rank(), mixed.rank());
  OpSpace acheck = intersect(w.M_x, w.M_y_prime);
  rep.add_dims("(alpha beta)-fixed(F^) = M_x cap M'_y", same(fab, acheck), fab.rank(), acheck.rank());
  OpSpace fboth = fixed_points(fa, beta);
  OpSpace Aloc = even_part(F);
  rep.add_dims("(alpha, beta)-fixed(F^) = F_+", same(fboth, Aloc), fboth.rank(), dF / 2);
  rep.add("V_L in A^ and not in F", std::max(Ahat.residual(vl), F.contains(vl) ? 1.0 : 0.0));
  rep.add("beta(V_L) = -V_L", max_abs(Mat(beta(vl) + vl)));
  double odd_times_v = 0;
  for (const auto& x : F.elements()) {
    Mat m = graded_split(s, x).second;
    odd_times_v = std::max(odd_times_v, max_abs(Mat(alpha(beta(Mat(m * vl))) - m * vl)));
  }
  rep.add("odd F times V_L is (alpha beta)-fixed", odd_times_v);
}

// C = V sin(eps |T|) / eps from the polar decomposition T = V |T|, through the SVD T = U S W^*.
inline Mat sin_approximant(const Mat& t, double eps) {
  if (!(eps > 0)) throw PreconditionError("eps must be positive");
  Eigen::JacobiSVD<Mat> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Vec d = svd.singularValues().unaryExpr([eps](double x) { return cplx(std::sin(eps * x) / eps); });
  return svd.matrixU().leftCols(d.size()) * d.asDiagonal() * svd.matrixV().leftCols(d.size()).adjoint();
}

struct SinBoundReport {
  double norm_excess = 0;   // max(||C|| - 1/eps, 0)
  double worst_ratio = 0;   // max ||(T - C) v|| / (eps ||T^* T v||) over tested v
  int matrices = 0;
  bool passed() const { return norm_excess <= 1e-12 && worst_ratio <= 1 + 1e-12; }
};

// Both bounds on `count` random square matrices of size n, each at several eps. Vectors tested are the
// right singular vectors (where the bound is sharpest) plus random ones.
inline SinBoundReport sin_bounds(int count, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  SinBoundReport rep;
  for (int k = 0; k < count; ++k) {
    Mat t = scale(rng) * random_matrix(rng, n, n);
    Eigen::JacobiSVD<Mat> svd(t, Eigen::ComputeFullV);
    Mat probes(n, 2 * n);
    probes << svd.matrixV(), random_matrix(rng, n, n);
    for (double eps : {1e-3, 1e-2, 1e-1, 1.0, 10.0}) {
      Mat c = sin_approximant(t, eps);
      rep.norm_excess = std::max(rep.norm_excess, spectral_norm(c) - 1 / eps);
      Mat ttt = t.adjoint() * t;
      for (Index j = 0; j < probes.cols(); ++j) {
        double lhs = ((t - c) * probes.col(j)).norm(), rhs = eps * (ttt * probes.col(j)).norm();
        if (lhs > 1e-13 * std::max(1.0, t.norm())) rep.worst_ratio = std::max(rep.worst_ratio, lhs / rhs);
      }
    }
    ++rep.matrices;
  }
  return rep;
}

// The whole disorder suite on one system.
inline CarReport car_disorder_suite(int n_left, int n_right, std::uint64_t seed = 1) {
  CarSystem s(n_left, n_right);
  CarReport rep;
  rep.n_left = n_left;
  rep.n_right = n_right;
  std::mt19937_64 rng(seed);
  const Mat id = s.identity();

  double car = 0;
  for (int i = 0; i < s.modes(); ++i)
    for (int j = 0; j < s.modes(); ++j) {
      car = std::max(car, max_abs(Mat(s.a(i) * s.adag(j) + s.adag(j) * s.a(i) - (i == j ? id : Mat::Zero(s.dim(), s.dim())))));
      car = std::max(car, max_abs(Mat(s.a(i) * s.a(j) + s.a(j) * s.a(i))));
    }
  rep.add("CAR relations", car);
  double grad = max_abs(Mat(s.gamma() * s.vacuum() - s.vacuum()));
  for (int i = 0; i < s.modes(); ++i) grad = std::max(grad, max_abs(Mat(s.gamma() * s.a(i) * s.gamma() + s.a(i))));
  rep.add("Gamma a_i Gamma = -a_i, Gamma Omega = Omega", grad);

  // graded split and twist on random elements
  double split = 0, tw = 0;
  for (int t = 0; t < 10; ++t) {
    Mat a = random_matrix(rng, s.dim(), s.dim());
    auto [p, m] = graded_split(s, a);
    split = std::max(split, max_abs(Mat(p + m - a)));
    tw = std::max(tw, max_abs(Mat(twist_conjugate(s, a) - (p + I * s.gamma() * m))));
  }
  rep.add("A = A_+ + A_-", split);
  rep.add("Z A Z^* = A_+ + i Gamma A_-", tw);

  const CarElement vl = disorder_left(s), vr = disorder_right(s);
  const unsigned L = s.outer_left(), R = s.outer_right();
  rep.add("V_L: Gamma on M'_x, identity on M_y", disorder_residual(s, vl.m, L, R));
  rep.add("V_R = Gamma V_L: identity on M'_x, Gamma on M_y", disorder_residual(s, vr.m, R, L));
  rep.add("V_L^2 = 1", max_abs(Mat(vl.m * vl.m - id)));

  WedgeAlgebras w = wedge_algebras(s);
  const OpSpace& F = w.F_local;
  OpSpace Aloc = [&] {
    std::vector<Mat> e;
    for (const auto& x : F.elements()) e.push_back(graded_split(s, x).first);
    return OpSpace::span(s.dim(), e);
  }();

  // uniqueness up to even local unitaries
  Mat h = random_in(rng, Aloc);
  h = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  Mat u = es.eigenvectors() * es.eigenvalues().unaryExpr([](double x) { return std::exp(I * x); }).asDiagonal() *
          es.eigenvectors().adjoint();
  Mat vhat = vl.m * u;
  rep.add("V^ = V_L u is a left disorder operator", disorder_residual(s, vhat, L, R));
  rep.add("V_L V^* in A(O)", Aloc.residual(Mat(vl.m * vhat.adjoint())));

  // conditional expectation onto A(O') = F(L)_+ v F(R)_+
  OpSpace Fout = s.field_algebra(L | R);
  OpSpace Aout = fixed_points(Fout, [&](const Mat& a) { return Mat(vl.m * a * vl.m.adjoint()); });
  Aout = fixed_points(Aout, [&](const Mat& a) { return Mat(vr.m * a * vr.m.adjoint()); });
  OpSpace AoutGen = generated_algebra(s.dim(), [&] {
    std::vector<Mat> g;
    for (unsigned mask : {L, R}) {
      if (!mask) continue;
      OpSpace f = s.field_algebra(mask);
      for (const auto& x : f.elements()) g.push_back(graded_split(s, x).first);
    }
    if (g.empty()) g.push_back(id);
    return g;
  }());
  rep.add_dims("commutes with V_L, V_R in F(O') = F(L)_+ v F(R)_+",
               std::max(Aout.inclusion_residual(AoutGen), AoutGen.inclusion_residual(Aout)), Aout.rank(),
               AoutGen.rank());
  rep.add("m(1) = 1", max_abs(Mat(conditional_expectation(s, id) - id)));
  double idem = 0, range = 0, comm = 0, bimod = 0, pos = 0, fixed = 0;
  for (int t = 0; t < 20; ++t) {
    Mat a = random_in(rng, Fout);
    Mat ma = conditional_expectation(s, a);
    idem = std::max(idem, max_abs(Mat(conditional_expectation(s, ma) - ma)));
    range = std::max(range, AoutGen.residual(ma));
    comm = std::max(comm, max_abs(Mat(ma * vl.m - vl.m * ma)) + max_abs(Mat(ma * vr.m - vr.m * ma)));
    Mat b = random_in(rng, AoutGen), c = random_in(rng, AoutGen);
    bimod = std::max(bimod, max_abs(Mat(conditional_expectation(s, b * a * c) - b * ma * c)));
    Mat x = a.adjoint() * a;
    Mat mx = conditional_expectation(s, x);
    Eigen::SelfAdjointEigenSolver<Mat> ps(Mat(0.5 * (mx + mx.adjoint())), Eigen::EigenvaluesOnly);
    pos = std::max(pos, std::max(0.0, -ps.eigenvalues().minCoeff()) + max_abs(Mat(mx - mx.adjoint())));
    Mat f = random_in(rng, AoutGen);
    fixed = std::max(fixed, max_abs(Mat(conditional_expectation(s, f) - f)));
  }
  rep.add("m(m(A)) = m(A)", idem);
  rep.add("m(A) in A(O')", range);
  rep.add("[m(A), V_L] = [m(A), V_R] = 0", comm);
  rep.add("m(B A C) = B m(A) C", bimod);
  rep.add("m(A^* A) >= 0", pos);
  rep.add("m(A) = A on A(O')", fixed);

  // beta
  std::vector<Mat> gens = s.generators(s.middle());
  gens.push_back(vl.m);
  OpSpace Fhat = generated_algebra(s.dim(), gens);
  double inv = 0, mult = 0, star = 0, indep = 0, onF = 0;
  for (int t = 0; t < 20; ++t) {
    Mat a = random_in(rng, Fhat), b = random_in(rng, Fhat);
    Mat ba = beta_automorphism(F, a, vl.m), bb = beta_automorphism(F, b, vl.m);
    inv = std::max(inv, max_abs(Mat(beta_automorphism(F, ba, vl.m) - a)));
    mult = std::max(mult, max_abs(Mat(beta_automorphism(F, a * b, vl.m) - ba * bb)));
    star = std::max(star, max_abs(Mat(beta_automorphism(F, a.adjoint(), vl.m) - ba.adjoint())));
    indep = std::max(indep, max_abs(Mat(beta_automorphism(F, a, vhat) - ba)));
    Mat f = random_in(rng, F);
    onF = std::max(onF, max_abs(Mat(beta_automorphism(F, f, vl.m) - f)));
  }
  rep.add("beta^2 = id", inv);
  rep.add("beta(AB) = beta(A) beta(B)", mult);
  rep.add("beta(A^*) = beta(A)^*", star);
  rep.add("beta independent of V within V_L A(O)", indep);
  rep.add("beta = id on F(O)", onF);

  // A(O')' = F(O) v {V_L, V_R}
  OpSpace lhs = commutant(s.dim(), AoutGen.elements());
  std::vector<Mat> rg = s.generators(s.middle());
  rg.push_back(vl.m);
  rg.push_back(vr.m);
  OpSpace rhs = generated_algebra(s.dim(), rg);
  rep.add_dims("A(O')' = F(O) v D_L v D_R", std::max(lhs.inclusion_residual(rhs), rhs.inclusion_residual(lhs)),
               lhs.rank(), rhs.rank());

  fixed_point_nets(s, w, rep);

  // graded reordering: one random element per mode, all permutations of the first three
  {
    const int n = std::min(3, s.modes());
    std::vector<CarElement> el;
    for (int i = 0; i < n; ++i) {
      unsigned mask = CarSystem::bit(i);
      el.push_back(make_element(s, random_in(rng, s.field_algebra(mask)), Side::global, mask));
    }
    std::vector<int> sigma(n);
    std::iota(sigma.begin(), sigma.end(), 0);
    double scale = 1;
    for (const auto& e : el) scale *= spectral_norm(e.m);
    double worst = 0;
    do worst = std::max(worst, verify_graded_permute(s, el, sigma).label / std::max(1.0, scale));
    while (std::next_permutation(sigma.begin(), sigma.end()));
    rep.add("graded reordering of twisted-commuting elements", worst);
  }
  return rep;
}

}  // namespace zfqft
