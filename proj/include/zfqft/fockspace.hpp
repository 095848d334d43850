#pragma once

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>

#include "linalg.hpp"
#include "smatrix.hpp"

namespace zfqft {

inline bool& quiet_flag() {
  static bool q = false;
  return q;
}

inline void warn(const std::string& msg) {
  if (!quiet_flag()) std::cerr << "warning: " << msg << "\n";
}

struct RapidityGrid {
  double theta_min = -2.0;
  double theta_max = 2.0;
  int n_points = 16;
  double mass = 1.0;

  void validate() const {
    if (n_points < 2) throw ConfigError("grid.n_points must be >= 2");
    if (!(theta_max > theta_min)) throw ConfigError("grid.theta_max must exceed grid.theta_min");
    if (!(mass > 0)) throw ConfigError("grid.mass must be positive");
  }
  double spacing() const { return (theta_max - theta_min) / (n_points - 1); }
  double node(int k) const { return theta_min + k * spacing(); }
  double energy(int k) const { return mass * std::cosh(node(k)); }
  double momentum(int k) const { return mass * std::sinh(node(k)); }
  std::string id() const {
    std::ostringstream os;
    os.precision(17);
    os << "grid[" << theta_min << "," << theta_max << "]x" << n_points << ",mu=" << mass;
    return os.str();
  }
};

class FockSpace;
using SpacePtr = std::shared_ptr<const FockSpace>;

class FockSpace {
 public:
  FockSpace(RapidityGrid grid, ScatteringFunction S, int nmax) : grid_(grid), S_(std::move(S)), nmax_(nmax) {
    grid_.validate();
    if (nmax < 0 || nmax > 6) throw ConfigError("truncation must lie in [0, 6]");
    d_ = grid_.n_points;
    offsets_.resize(nmax_ + 2);
    offsets_[0] = 0;
    for (int n = 0; n <= nmax_; ++n) offsets_[n + 1] = offsets_[n] + ipow(d_, n);
    smat_.resize(d_ * d_);
    for (int a = 0; a < d_; ++a)
      for (int b = 0; b < d_; ++b) smat_[a * d_ + b] = S_(grid_.node(a) - grid_.node(b));
    energy_.resize(dim());
    momentum_.resize(dim());
    for (int n = 0; n <= nmax_; ++n)
      for (Index j = 0; j < sector_dim(n); ++j) {
        double e = 0, p = 0;
        for (int k : digits(n, j)) {
          e += grid_.energy(k);
          p += grid_.momentum(k);
        }
        energy_[offset(n) + j] = e;
        momentum_[offset(n) + j] = p;
      }
    build_ladders();
    build_symmetric_basis();
  }

  static SpacePtr make(RapidityGrid grid, ScatteringFunction S, int nmax) {
    return std::make_shared<const FockSpace>(grid, std::move(S), nmax);
  }

  const RapidityGrid& grid() const { return grid_; }
  const ScatteringFunction& S() const { return S_; }
  int nmax() const { return nmax_; }
  int points() const { return d_; }
  double dtheta() const { return grid_.spacing(); }
  Index dim() const { return offsets_[nmax_ + 1]; }
  Index offset(int n) const { return offsets_[n]; }
  Index sector_dim(int n) const { return offsets_[n + 1] - offsets_[n]; }
  int sector_of(Index i) const {
    int n = 0;
    while (offsets_[n + 1] <= i) ++n;
    return n;
  }
  // S(theta_a - theta_b)
  cplx s_nodes(int a, int b) const { return smat_[a * d_ + b]; }
  double total_energy(Index i) const { return energy_[i]; }
  double total_momentum(Index i) const { return momentum_[i]; }

  // Lexicographic: first index most significant.
  std::vector<int> digits(int n, Index local) const {
    std::vector<int> out(n);
    for (int j = n - 1; j >= 0; --j) {
      out[j] = static_cast<int>(local % d_);
      local /= d_;
    }
    return out;
  }
  Index encode(const std::vector<int>& idx) const {
    Index r = 0;
    for (int k : idx) r = r * d_ + k;
    return r;
  }

  // P_n e_I as a sparse list of (local index, coefficient). The transposition of slots j, j+1
  // acts on basis tensors as D e_K = S(theta_{K_j} - theta_{K_{j+1}}) e_{swap K}, which makes
  // z^dag(a) z^dag(b) = S(a - b) z^dag(b) z^dag(a).
  std::vector<std::pair<Index, cplx>> symmetrized_unit(const std::vector<int>& idx) const {
    const int n = static_cast<int>(idx.size());
    struct Node {
      std::vector<int> perm, K;
      cplx coef;
    };
    std::vector<Node> seen{{std::vector<int>(n), idx, 1.0}};
    std::iota(seen[0].perm.begin(), seen[0].perm.end(), 0);
    for (std::size_t head = 0; head < seen.size(); ++head) {
      for (int j = 0; j + 1 < n; ++j) {
        Node nx = seen[head];
        nx.coef *= s_nodes(nx.K[j], nx.K[j + 1]);
        std::swap(nx.K[j], nx.K[j + 1]);
        std::swap(nx.perm[j], nx.perm[j + 1]);
        bool dup = false;
        for (const auto& s : seen)
          if (s.perm == nx.perm) {
            dup = true;
            break;
          }
        if (!dup) seen.push_back(std::move(nx));
      }
    }
    std::vector<std::pair<Index, cplx>> out;
    out.reserve(seen.size());
    const double w = 1.0 / factorial(n);
    for (const auto& s : seen) out.emplace_back(encode(s.K), w * s.coef);
    std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.first < b.first; });
    std::vector<std::pair<Index, cplx>> merged;
    for (auto& e : out) {
      if (!merged.empty() && merged.back().first == e.first)
        merged.back().second += e.second;
      else
        merged.push_back(e);
    }
    std::erase_if(merged, [](auto& e) { return std::abs(e.second) < 1e-15; });
    return merged;
  }

  // a^dag_k in orthonormal coordinates: (a^dag_k c)_{n+1} = sqrt(n+1) P_{n+1}(e_k (x) c_n).
  const SpMat& ladder(int k) const { return ladders_[k]; }

  // Sum_k c_k a^dag_k.
  SpMat creation_from_coords(const Vec& c) const {
    std::vector<Trip> t;
    for (int k = 0; k < d_; ++k) {
      if (c[k] == cplx(0.0)) continue;
      const SpMat& L = ladders_[k];
      for (int col = 0; col < L.outerSize(); ++col)
        for (SpMat::InnerIterator it(L, col); it; ++it) t.emplace_back(it.row(), it.col(), c[k] * it.value());
    }
    SpMat m(dim(), dim());
    m.setFromTriplets(t.begin(), t.end());
    return m;
  }

  // Orthonormal basis of the S-symmetric subspace of sectors 0..max_sector, one column per
  // admissible multiset of nodes.
  SpMat symmetric_basis(int max_sector) const {
    max_sector = std::min(max_sector, nmax_);
    Index cols = 0;
    for (int n = 0; n <= max_sector; ++n) cols += static_cast<Index>(qbasis_[n].size());
    std::vector<Trip> t;
    Index c = 0;
    for (int n = 0; n <= max_sector; ++n)
      for (const auto& col : qbasis_[n]) {
        for (const auto& [loc, v] : col) t.emplace_back(offset(n) + loc, c, v);
        ++c;
      }
    SpMat q(dim(), cols);
    q.setFromTriplets(t.begin(), t.end());
    return q;
  }
  Index symmetric_dim(int n) const { return static_cast<Index>(qbasis_[n].size()); }

  // Q_n in sector-local coordinates (sector_dim(n) x symmetric_dim(n)).
  SpMat sector_basis(int n) const {
    std::vector<Trip> t;
    Index c = 0;
    for (const auto& col : qbasis_[n]) {
      for (const auto& [loc, v] : col) t.emplace_back(loc, c, v);
      ++c;
    }
    SpMat q(sector_dim(n), c);
    q.setFromTriplets(t.begin(), t.end());
    return q;
  }
  // Orthogonal projector P_n onto S-symmetric tensors of rank n, sector-local.
  SpMat sector_projector(int n) const {
    SpMat q = sector_basis(n);
    return SpMat(q * SpMat(q.adjoint()));
  }

 private:
  void build_ladders() {
    std::vector<std::vector<Trip>> trips(d_);
    for (int n = 0; n < nmax_; ++n) {
      const double w = std::sqrt(n + 1.0);
      for (Index J = 0; J < sector_dim(n); ++J) {
        std::vector<int> idx(n + 1);
        auto jd = digits(n, J);
        std::copy(jd.begin(), jd.end(), idx.begin() + 1);
        for (int k = 0; k < d_; ++k) {
          idx[0] = k;
          for (const auto& [loc, v] : symmetrized_unit(idx))
            trips[k].emplace_back(offset(n + 1) + loc, offset(n) + J, w * v);
        }
      }
    }
    ladders_.resize(d_);
    for (int k = 0; k < d_; ++k) {
      ladders_[k].resize(dim(), dim());
      ladders_[k].setFromTriplets(trips[k].begin(), trips[k].end());
    }
  }

  void build_symmetric_basis() {
    qbasis_.assign(nmax_ + 1, {});
    for (int n = 0; n <= nmax_; ++n) {
      std::vector<int> idx(n, 0);
      while (true) {
        auto v = symmetrized_unit(idx);
        double nrm = 0;
        for (auto& e : v) nrm += std::norm(e.second);
        nrm = std::sqrt(nrm);
        if (nrm > 1e-12) {
          for (auto& e : v) e.second /= nrm;
          qbasis_[n].push_back(std::move(v));
        }
        // next nondecreasing tuple
        int j = n - 1;
        while (j >= 0 && idx[j] == d_ - 1) --j;
        if (j < 0) break;
        ++idx[j];
        for (int m = j + 1; m < n; ++m) idx[m] = idx[j];
      }
    }
  }

  RapidityGrid grid_;
  ScatteringFunction S_;
  int nmax_;
  int d_ = 0;
  std::vector<Index> offsets_;
  std::vector<cplx> smat_;
  std::vector<double> energy_, momentum_;
  std::vector<SpMat> ladders_;
  std::vector<std::vector<std::vector<std::pair<Index, cplx>>>> qbasis_;
};

// Projection of a rank-n tensor (values on the node grid, lexicographic) onto S-symmetric tensors.
inline Vec s_symmetrize(const FockSpace& space, int n, const Vec& tensor) {
  if (tensor.size() != ipow(space.points(), n)) throw PreconditionError("tensor shape does not match rank");
  Vec out = Vec::Zero(tensor.size());
  for (Index I = 0; I < tensor.size(); ++I) {
    if (tensor[I] == cplx(0.0)) continue;
    for (const auto& [loc, v] : space.symmetrized_unit(space.digits(n, I))) out[loc] += v * tensor[I];
  }
  return out;
}

enum class Grade { even, odd, mixed };

inline const char* grade_name(Grade g) {
  return g == Grade::even ? "even" : g == Grade::odd ? "odd" : "mixed";
}

struct FockOperator {
  SpacePtr space;
  SpMat mat;
  Grade grade = Grade::mixed;

  FockOperator() = default;
  FockOperator(SpacePtr s, SpMat m) : space(std::move(s)), mat(std::move(m)) {
    mat.prune(cplx(0.0));
    grade = classify();
  }

  Grade classify() const {
    bool even = false, odd = false;
    for (int k = 0; k < mat.outerSize(); ++k)
      for (SpMat::InnerIterator it(mat, k); it; ++it) {
        if (std::abs(it.value()) <= 1e-12) continue;
        ((space->sector_of(it.row()) - space->sector_of(it.col())) % 2 == 0 ? even : odd) = true;
      }
    if (even && odd) return Grade::mixed;
    return odd ? Grade::odd : Grade::even;
  }

  FockOperator adjoint() const { return {space, SpMat(mat.adjoint())}; }
  FockOperator operator+(const FockOperator& o) const { return {space, SpMat(mat + o.mat)}; }
  FockOperator operator-(const FockOperator& o) const { return {space, SpMat(mat - o.mat)}; }
  FockOperator operator*(const FockOperator& o) const { return {space, SpMat(mat * o.mat)}; }
  FockOperator operator*(cplx a) const { return {space, SpMat(a * mat)}; }
  friend FockOperator operator*(cplx a, const FockOperator& o) { return o * a; }
};

// Operator norm on S-symmetric inputs from sectors 0..max_input_sector.
inline double restricted_norm(const SpMat& A, const FockSpace& space, int max_input_sector) {
  SpMat q = space.symmetric_basis(max_input_sector);
  return spectral_norm(SpMat(A * q));
}
inline double restricted_norm(const FockOperator& A, int max_input_sector) {
  return restricted_norm(A.mat, *A.space, max_input_sector);
}

class FockState {
 public:
  explicit FockState(SpacePtr s) : space_(std::move(s)), c_(Vec::Zero(space_->dim())) {}
  FockState(SpacePtr s, Vec coords) : space_(std::move(s)), c_(std::move(coords)) {
    if (c_.size() != space_->dim()) throw PreconditionError("state vector has wrong dimension");
  }

  static FockState vacuum(SpacePtr s) {
    FockState st(std::move(s));
    st.c_[0] = 1.0;
    return st;
  }

  // Sector n from wavefunction values Psi_n(theta_{i1}, ..., theta_{in}).
  void set_wavefunction(int n, const Vec& psi) {
    if (psi.size() != space_->sector_dim(n)) throw PreconditionError("wavefunction shape mismatch");
    c_.segment(space_->offset(n), psi.size()) = std::pow(space_->dtheta(), 0.5 * n) * psi;
  }
  Vec wavefunction(int n) const {
    return c_.segment(space_->offset(n), space_->sector_dim(n)) / std::pow(space_->dtheta(), 0.5 * n);
  }
  Vec sector(int n) const { return c_.segment(space_->offset(n), space_->sector_dim(n)); }

  const Vec& coords() const { return c_; }
  const SpacePtr& space() const { return space_; }
  double norm() const { return c_.norm(); }
  cplx inner(const FockState& o) const { return c_.dot(o.c_); }

  double s_symmetry_residual() const {
    double r = 0;
    for (int n = 2; n <= space_->nmax(); ++n) {
      Vec s = sector(n);
      r = std::max(r, (s_symmetrize(*space_, n, s) - s).norm());
    }
    return r;
  }

  bool top_sector_nonzero() const { return sector(space_->nmax()).norm() > 0; }

 private:
  SpacePtr space_;
  Vec c_;
};

inline FockState apply(const FockOperator& A, const FockState& s) { return {s.space(), Vec(A.mat * s.coords())}; }

// Orthonormal coordinates of a one-particle wavefunction.
inline Vec one_particle_coords(const FockSpace& space, const Vec& psi) {
  if (psi.size() != space.points()) throw PreconditionError("one-particle vector length != n_points");
  return std::sqrt(space.dtheta()) * psi;
}

inline FockState one_particle_state(const SpacePtr& space, const Vec& psi) {
  FockState st(space);
  st.set_wavefunction(1, psi);
  return st;
}

// z^dag(psi) = int dtheta psi(theta) z^dag(theta)
inline FockOperator creation(const SpacePtr& space, const Vec& psi) {
  return {space, space->creation_from_coords(one_particle_coords(*space, psi))};
}

// z(psi) = int dtheta psi(theta) z(theta) = z^dag(conj psi)^dag
inline FockOperator annihilation(const SpacePtr& space, const Vec& psi) {
  return creation(space, psi.conjugate()).adjoint();
}

// Point-localized operators at grid node k: z^dag(theta_k) = dtheta^{-1/2} a^dag_k.
inline FockOperator point_creation(const SpacePtr& space, int k) {
  return {space, SpMat(space->ladder(k) / std::sqrt(space->dtheta()))};
}
inline FockOperator point_annihilation(const SpacePtr& space, int k) { return point_creation(space, k).adjoint(); }

inline FockState zf_create(const SpacePtr& space, const Vec& psi, const FockState& phi) {
  if (phi.top_sector_nonzero()) warn("z^dag applied to a state with nonzero top sector; overflow dropped");
  return apply(creation(space, psi), phi);
}

inline FockState zf_annihilate(const SpacePtr& space, const Vec& psi, const FockState& phi) {
  return apply(annihilation(space, psi), phi);
}

inline Vec sector_diagonal(const FockSpace& space, const std::function<cplx(int, Index)>& f) {
  Vec d(space.dim());
  for (int n = 0; n <= space.nmax(); ++n)
    for (Index j = 0; j < space.sector_dim(n); ++j) d[space.offset(n) + j] = f(n, space.offset(n) + j);
  return d;
}

inline FockOperator grading(const SpacePtr& space) {
  return {space, sparse_diag(sector_diagonal(*space, [](int n, Index) { return cplx(n % 2 ? -1.0 : 1.0); }))};
}

inline FockOperator number_operator(const SpacePtr& space) {
  return {space, sparse_diag(sector_diagonal(*space, [](int n, Index) { return cplx(n); }))};
}

// Z = (1 - i)/2 + (1 + i)/2 Gamma
inline FockOperator twist(const SpacePtr& space) {
  return {space, sparse_diag(sector_diagonal(*space, [](int n, Index) {
            double g = n % 2 ? -1.0 : 1.0;
            return cplx(0.5, -0.5) + cplx(0.5, 0.5) * g;
          }))};
}

// U(x) multiplies basis tensors by exp(i P.x), P.x = P0 x0 - P1 x1.
inline FockOperator translate(const SpacePtr& space, std::array<double, 2> x) {
  const FockSpace& s = *space;
  return {space, sparse_diag(sector_diagonal(s, [&](int, Index i) {
            return std::exp(I * (s.total_energy(i) * x[0] - s.total_momentum(i) * x[1]));
          }))};
}

inline FockOperator hamiltonian(const SpacePtr& space) {
  const FockSpace& s = *space;
  return {space, sparse_diag(sector_diagonal(s, [&](int, Index i) { return cplx(s.total_energy(i)); }))};
}

// T = L o conj.
struct AntiUnitary {
  SpMat L;
  Vec apply(const Vec& v) const { return L * v.conjugate(); }
  FockState apply(const FockState& s) const { return {s.space(), apply(s.coords())}; }
  // T A T^{-1} = L conj(A) L^dag
  SpMat conjugate(const SpMat& A) const { return L * SpMat(A.conjugate()) * SpMat(L.adjoint()); }
  FockOperator conjugate(const FockOperator& A) const { return {A.space, conjugate(A.mat)}; }
  // T^2 is linear: L conj(L)
  SpMat square() const { return L * SpMat(L.conjugate()); }
};

struct Reflection {
  AntiUnitary J;   // (J Psi)_n(t1..tn) = conj Psi_n(tn..t1)
  AntiUnitary Uj;  // U(j) = Z J
  SpMat Uj_squared;
};

inline SpMat reversal(const FockSpace& s) {
  std::vector<Trip> t;
  t.reserve(s.dim());
  for (int n = 0; n <= s.nmax(); ++n)
    for (Index j = 0; j < s.sector_dim(n); ++j) {
      auto dg = s.digits(n, j);
      std::reverse(dg.begin(), dg.end());
      t.emplace_back(s.offset(n) + s.encode(dg), s.offset(n) + j, 1.0);
    }
  SpMat r(s.dim(), s.dim());
  r.setFromTriplets(t.begin(), t.end());
  return r;
}

inline Reflection reflect(const SpacePtr& space) {
  Reflection r;
  r.J.L = reversal(*space);
  r.Uj.L = twist(space).mat * r.J.L;
  r.Uj_squared = r.Uj.square();
  return r;
}

struct ZfReport {
  std::string descriptor;
  int n_points = 0, nmax = 0;
  std::size_t pairs = 0;
  double creators = 0;      // z^dag z^dag exchange
  double annihilators = 0;  // z z exchange
  double mixed = 0;         // z z^dag = S z^dag z + delta
  double tolerance = 1e-10;
  double max_residual() const { return std::max({creators, annihilators, mixed}); }
  bool passed() const { return max_residual() < tolerance; }
};

// Operator-norm residuals of the three exchange relations on S-symmetric inputs of
// sectors <= N_max - 1. All node pairs are used when n_points <= 16, otherwise
// max_pairs pairs drawn with the given seed.
inline ZfReport verify_zf_relations(const SpacePtr& space, std::uint64_t seed = 1, std::size_t max_pairs = 64,
                                    double tol = 1e-10) {
  if (space->nmax() < 3) throw PreconditionError("verify_zf_relations needs N_max >= 3");
  const FockSpace& s = *space;
  const int d = s.points();
  std::vector<std::pair<int, int>> pairs;
  if (d <= 16) {
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) pairs.emplace_back(a, b);
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> u(0, d - 1);
    for (std::size_t i = 0; i < max_pairs; ++i) {
      int a = u(rng);
      pairs.emplace_back(a, i % 4 == 0 ? a : u(rng));
    }
  }
  SpMat q = s.symmetric_basis(s.nmax() - 1);
  const double dt = s.dtheta();
  std::vector<SpMat> zd(d);
  for (int k = 0; k < d; ++k) zd[k] = SpMat(s.ladder(k) / std::sqrt(dt)) * q;
  std::vector<SpMat> zdfull(d), zfull(d);
  for (int k = 0; k < d; ++k) {
    zdfull[k] = s.ladder(k) / std::sqrt(dt);
    zfull[k] = SpMat(s.ladder(k).adjoint()) / std::sqrt(dt);
  }
  std::vector<SpMat> zq(d);
  for (int k = 0; k < d; ++k) zq[k] = zfull[k] * q;

  ZfReport rep;
  rep.descriptor = s.S().descriptor();
  rep.n_points = d;
  rep.nmax = s.nmax();
  rep.pairs = pairs.size();
  rep.tolerance = tol;
  for (auto [a, b] : pairs) {
    cplx sab = s.s_nodes(a, b);
    SpMat r1 = zdfull[a] * zd[b] - sab * (zdfull[b] * zd[a]);
    SpMat r2 = zfull[a] * zq[b] - sab * (zfull[b] * zq[a]);
    // z(eta_a) z^dag(theta_b) = S(theta_b - eta_a) z^dag(theta_b) z(eta_a) + delta
    SpMat r3 = zfull[a] * zd[b] - s.s_nodes(b, a) * (zdfull[b] * zq[a]);
    if (a == b) r3 -= q / dt;
    rep.creators = std::max(rep.creators, spectral_norm(r1));
    rep.annihilators = std::max(rep.annihilators, spectral_norm(r2));
    rep.mixed = std::max(rep.mixed, spectral_norm(r3));
  }
  return rep;
}

// Binary dump: "ZFQF", u16 version, u16 n_points, u16 N_max, 6 pad bytes, then each sector's
// wavefunction values as little-endian (re, im) f64 pairs.
inline void write_state(const FockState& st, const std::string& path) {
  static_assert(std::endian::native == std::endian::little, "binary dump assumes a little-endian host");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  const FockSpace& s = *st.space();
  std::array<char, 16> hdr{};
  std::memcpy(hdr.data(), "ZFQF", 4);
  std::uint16_t ver = 1, np = static_cast<std::uint16_t>(s.points()), nm = static_cast<std::uint16_t>(s.nmax());
  std::memcpy(hdr.data() + 4, &ver, 2);
  std::memcpy(hdr.data() + 6, &np, 2);
  std::memcpy(hdr.data() + 8, &nm, 2);
  f.write(hdr.data(), 16);
  for (int n = 0; n <= s.nmax(); ++n) {
    Vec w = st.wavefunction(n);
    for (Index i = 0; i < w.size(); ++i) {
      double re = w[i].real(), im = w[i].imag();
      f.write(reinterpret_cast<const char*>(&re), 8);
      f.write(reinterpret_cast<const char*>(&im), 8);
    }
  }
}

inline FockState read_state(const SpacePtr& space, const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path);
  std::array<char, 16> hdr{};
  f.read(hdr.data(), 16);
  if (!f || std::memcmp(hdr.data(), "ZFQF", 4) != 0) throw Error(path + ": not a ZFQF state dump");
  std::uint16_t ver, np, nm;
  std::memcpy(&ver, hdr.data() + 4, 2);
  std::memcpy(&np, hdr.data() + 6, 2);
  std::memcpy(&nm, hdr.data() + 8, 2);
  if (ver != 1) throw Error(path + ": unsupported dump version");
  if (np != space->points() || nm != space->nmax()) throw Error(path + ": grid or truncation mismatch");
  FockState st(space);
  for (int n = 0; n <= nm; ++n) {
    Vec w(space->sector_dim(n));
    for (Index i = 0; i < w.size(); ++i) {
      double re, im;
      f.read(reinterpret_cast<char*>(&re), 8);
      f.read(reinterpret_cast<char*>(&im), 8);
      w[i] = cplx(re, im);
    }
    if (!f) throw Error(path + ": truncated dump");
    st.set_wavefunction(n, w);
  }
  return st;
}

}  // namespace zfqft
