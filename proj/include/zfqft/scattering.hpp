#pragma once

#include <map>

#include "fields.hpp"

namespace zfqft {

// A^chi carries (2 pi)^2 chi~(P_out - P_in) per matrix element; the creator part of
// phi(psi)^chi is therefore (2 pi)^2 z^dag(psi). Every normalized quantity below divides
// this factor out once per field.
inline constexpr double pfg_scale = 4.0 * pi * pi;

enum class PacketKind { gaussian_k, bump_rapidity };

// One-dimensional packet: f~(k) on the momentum line, and the one-particle vector
// psi(theta) = f~(mu sinh theta).
//   gaussian_k:    f~(k) = A exp(-(k - k0)^2 / (2 s^2))
//   bump_rapidity: f~(k) = A h((asinh(k/mu) - c) / w), so raps = [c - w, c + w] exactly
struct WavePacket {
  PacketKind kind = PacketKind::bump_rapidity;
  double center = 0.0;
  double width = 0.3;
  double mass = 1.0;
  double amplitude = 1.0;
  double eps_tail = 1e-8;

  static WavePacket gaussian(double k0, double s, double mu = 1.0, double a = 1.0) {
    return {PacketKind::gaussian_k, k0, s, mu, a};
  }
  static WavePacket bump(double c, double w, double mu = 1.0, double a = 1.0) {
    return {PacketKind::bump_rapidity, c, w, mu, a};
  }

  cplx ft(double k) const {
    if (kind == PacketKind::gaussian_k) {
      double u = (k - center) / width;
      return amplitude * std::exp(-0.5 * u * u);
    }
    return amplitude * TestFunction::bump1((std::asinh(k / mass) - center) / width);
  }
  cplx at_rapidity(double theta) const { return ft(mass * std::sinh(theta)); }

  std::array<double, 2> k_support() const {
    if (kind == PacketKind::gaussian_k) {
      double r = width * std::sqrt(2.0 * std::log(1.0 / eps_tail));
      return {center - r, center + r};
    }
    return {mass * std::sinh(center - width), mass * std::sinh(center + width)};
  }

  // Closed hull of the rapidities artanh(p1/p0) = asinh(k/mu) over the support of f~.
  std::array<double, 2> raps() const {
    auto k = k_support();
    return {std::asinh(k[0] / mass), std::asinh(k[1] / mass)};
  }

  Vec rapidity_vector(const RapidityGrid& g) const {
    Vec v(g.n_points);
    for (int k = 0; k < g.n_points; ++k) v[k] = at_rapidity(g.node(k));
    return v;
  }
};

// strictly before: max of a < min of b
inline bool precedes(const std::array<double, 2>& a, const std::array<double, 2>& b) { return a[1] < b[0]; }

// f(tau, x) = int dk/(2 pi) f~(k) exp(i x k - i tau sqrt(k^2 + mu^2)), composite Gauss-Legendre
// with panels short enough that the phase turns by at most ~pi/2 on each.
inline cplx packet_evolve(const WavePacket& f, double tau, double x, int nodes_per_panel = 24) {
  auto ks = f.k_support();
  if (f.kind == PacketKind::gaussian_k) {
    double r = f.width * std::sqrt(2.0 * std::log(1e20));  // well below double rounding
    ks = {f.center - r, f.center + r};
  }
  double span = ks[1] - ks[0];
  double phase_rate = std::abs(x) + std::abs(tau) + 1.0;
  int panels = static_cast<int>(std::ceil(span * phase_rate / (pi / 2))) + 4;
  std::vector<double> gx, gw;
  gauss_legendre(nodes_per_panel, 0.0, 1.0, gx, gw);
  cplx sum = 0;
  for (int p = 0; p < panels; ++p) {
    double a = ks[0] + span * p / panels, h = span / panels;
    for (int j = 0; j < nodes_per_panel; ++j) {
      double k = a + h * gx[j];
      sum += h * gw[j] * f.ft(k) * std::exp(I * (x * k - tau * std::sqrt(k * k + f.mass * f.mass)));
    }
  }
  return sum / (2 * pi);
}

inline double smoothstep5(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * t * (10 - 15 * t + 6 * t * t);
}

// chi~ = (positive energy) x (shell factor in |p.p/mu^2 - 1|) x (rapidity factor), each
// equal to 1 on its plateau and falling to 0 through a C^2 quintic.
struct ChiFilter {
  double mass = 1.0;
  double shell_plateau = 0.05;
  double shell_window = 0.5;
  double rap_lo = -1.0, rap_hi = 1.0;
  double rap_transition = 0.25;
  bool unity = false;

  static ChiFilter identity() {
    ChiFilter c;
    c.unity = true;
    return c;
  }

  double operator()(double p0, double p1) const {
    if (unity) return 1.0;
    if (!(p0 > 0)) return 0.0;
    double m2 = p0 * p0 - p1 * p1;
    if (!(m2 > 0)) return 0.0;
    double dev = std::abs(m2 / (mass * mass) - 1.0);
    double shell = 1.0 - smoothstep5((dev - shell_plateau) / (shell_window - shell_plateau));
    double r = std::atanh(p1 / p0);
    double rap = 1.0;
    if (r < rap_lo) rap = 1.0 - smoothstep5((rap_lo - r) / rap_transition);
    if (r > rap_hi) rap = 1.0 - smoothstep5((r - rap_hi) / rap_transition);
    return shell * rap;
  }

  bool plateau_covers(const std::array<double, 2>& raps) const {
    return unity || (raps[0] >= rap_lo && raps[1] <= rap_hi);
  }
};

// Multiplies each element by (2 pi)^2 chi~(P_row - P_col).
inline FockOperator chi_average(const FockOperator& A, const ChiFilter& chi) {
  const FockSpace& s = *A.space;
  SpMat m = A.mat;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it) {
      double dp0 = s.total_energy(it.row()) - s.total_energy(it.col());
      double dp1 = s.total_momentum(it.row()) - s.total_momentum(it.col());
      it.valueRef() *= pfg_scale * chi(dp0, dp1);
    }
  return {A.space, m};
}

// Rapidity hull of the grid nodes where |psi| exceeds eps times its maximum.
inline std::array<double, 2> grid_raps(const RapidityGrid& g, const Vec& psi, double eps = 1e-8) {
  double mx = psi.cwiseAbs().maxCoeff();
  if (mx == 0) return {0.0, 0.0};
  double lo = INFINITY, hi = -INFINITY;
  for (int k = 0; k < g.n_points; ++k)
    if (std::abs(psi[k]) > eps * mx) {
      lo = std::min(lo, g.node(k));
      hi = std::max(hi, g.node(k));
    }
  return {lo, hi};
}

// phi(psi)^chi; equals (2 pi)^2 z^dag(psi) when chi~ is 1 on the shell image of raps(psi).
inline FockOperator pfg_creator(const SpacePtr& space, const Vec& psi, const ChiFilter& chi) {
  if (!chi.plateau_covers(grid_raps(space->grid(), psi)))
    throw PreconditionError("chi plateau does not cover the rapidity support of psi");
  return chi_average(phi_of_vector(space, psi), chi);
}

inline double pfg_residual(const SpacePtr& space, const Vec& psi, const ChiFilter& chi) {
  FockOperator d = pfg_creator(space, psi, chi) - creation(space, psi) * cplx(pfg_scale);
  return restricted_norm(d, space->nmax());
}

// A^chi_tau(f) = int dx f(tau, x) U(tau, x) A^chi U(tau, x)^*, with the x integral done by the
// trapezoid rule on [-tau - reach, tau + reach]. Outside the light cone f(tau, .) only decays like
// exp(-mu distance), hence the generous reach.
inline FockOperator pfg_tau(const SpacePtr& space, const Vec& psi, const ChiFilter& chi, const WavePacket& f,
                            double tau, double reach = 32.0, double dx = 0.1) {
  FockOperator a = pfg_creator(space, psi, chi);
  const FockSpace& s = *space;
  int nx = static_cast<int>(std::ceil(2 * (tau + reach) / dx));
  std::vector<double> xs(nx + 1);
  std::vector<cplx> fx(nx + 1);
  for (int m = 0; m <= nx; ++m) {
    xs[m] = -(tau + reach) + m * (2 * (tau + reach) / nx);
    fx[m] = packet_evolve(f, tau, xs[m]);
  }
  double h = 2 * (tau + reach) / nx;
  std::map<std::int64_t, cplx> cache;
  auto factor = [&](double dE, double dP) {
    auto key = static_cast<std::int64_t>(std::llround(dP * 1e9));
    auto it = cache.find(key);
    if (it != cache.end()) return it->second * std::exp(I * dE * tau);
    cplx sum = 0;
    for (int m = 0; m <= nx; ++m) sum += (m == 0 || m == nx ? 0.5 : 1.0) * fx[m] * std::exp(-I * dP * xs[m]);
    sum *= h;
    cache[key] = sum;
    return sum * std::exp(I * dE * tau);
  };
  SpMat m = a.mat;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it) {
      double dE = s.total_energy(it.row()) - s.total_energy(it.col());
      double dP = s.total_momentum(it.row()) - s.total_momentum(it.col());
      it.valueRef() *= factor(dE, dP);
    }
  return {space, m};
}

// pi_Gamma(sigma)(psi_1 (x) ... (x) psi_n) = sign * psi_sigma(1) (x) ... (x) psi_sigma(n), the sign
// collecting (-1) for each inverted pair of odd labels.
struct GradedSymmetrizer {
  int n = 0;
  std::vector<int> grades;
  std::vector<std::vector<int>> perms;
  std::vector<int> signs;

  // Apply P_Gamma to a tensor in (C^d)^{(x) n}.
  Vec apply(const Vec& t, int d) const {
    Vec out = Vec::Zero(t.size());
    std::vector<int> j(n), i(n);
    for (std::size_t p = 0; p < perms.size(); ++p) {
      const auto& sg = perms[p];
      for (Index J = 0; J < t.size(); ++J) {
        Index r = J;
        for (int m = n - 1; m >= 0; --m) {
          j[m] = static_cast<int>(r % d);
          r /= d;
        }
        // (pi(sigma) T)(j) = sign T(i) with i_{sigma(m)} = j_m
        for (int m = 0; m < n; ++m) i[sg[m]] = j[m];
        Index I0 = 0;
        for (int m = 0; m < n; ++m) I0 = I0 * d + i[m];
        out[J] += static_cast<double>(signs[p]) * t[I0];
      }
    }
    return out / factorial(n);
  }

  SpMat matrix(int d) const {
    Index D = ipow(d, n);
    std::vector<Trip> tr;
    for (Index c = 0; c < D; ++c) {
      Vec e = Vec::Zero(D);
      e[c] = 1.0;
      Vec col = apply(e, d);
      for (Index r = 0; r < D; ++r)
        if (col[r] != cplx(0.0)) tr.emplace_back(r, c, col[r]);
    }
    SpMat m(D, D);
    m.setFromTriplets(tr.begin(), tr.end());
    return m;
  }

  // Product tensor psi_sigma(1) (x) ... with its pi_Gamma sign, as (sign, label order).
  int sign_of(const std::vector<int>& sigma) const {
    for (std::size_t p = 0; p < perms.size(); ++p)
      if (perms[p] == sigma) return signs[p];
    throw PreconditionError("not a permutation of the right size");
  }
};

inline GradedSymmetrizer graded_symmetrizer(int n, const std::vector<int>& grades) {
  if (n < 0 || n > 6) throw PreconditionError("graded_symmetrizer supports n <= 6");
  if (static_cast<int>(grades.size()) != n) throw PreconditionError("one grade per tensor factor");
  GradedSymmetrizer g;
  g.n = n;
  g.grades = grades;
  g.perms = all_permutations(n);
  for (const auto& s : g.perms) {
    int sign = 1;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (s[i] > s[j] && grades[s[i]] == -1 && grades[s[j]] == -1) sign = -sign;
    g.signs.push_back(sign);
  }
  return g;
}

inline Vec tensor_product(const std::vector<Vec>& fs) {
  Vec t = Vec::Ones(1);
  for (const auto& f : fs) {
    Vec nt(t.size() * f.size());
    for (Index a = 0; a < t.size(); ++a) nt.segment(a * f.size(), f.size()) = t[a] * f;
    t = nt;
  }
  return t;
}

inline void check_ordered(const std::vector<WavePacket>& ps) {
  for (std::size_t i = 0; i + 1 < ps.size(); ++i)
    if (!precedes(ps[i].raps(), ps[i + 1].raps()))
      throw OrderingError("packets are not rapidity ordered with disjoint supports");
}

// phi^chi(psi_1) ... phi^chi(psi_k) Omega / (2 pi)^{2k} for psi_1 < ... < psi_k
inline FockState w_out(const SpacePtr& space, const std::vector<WavePacket>& packets, const ChiFilter& chi) {
  check_ordered(packets);
  if (static_cast<int>(packets.size()) > space->nmax()) throw PreconditionError("more packets than N_max");
  FockState st = FockState::vacuum(space);
  for (auto it = packets.rbegin(); it != packets.rend(); ++it)
    st = apply(pfg_creator(space, it->rapidity_vector(space->grid()), chi), st);
  return {space, Vec(st.coords() / std::pow(pfg_scale, static_cast<double>(packets.size())))};
}

// Extension to disjoint but unordered packets via W_out pi_Gamma(sigma) = W_out (all factors odd).
inline FockState w_out_unordered(const SpacePtr& space, const std::vector<WavePacket>& packets,
                                 const ChiFilter& chi) {
  const int n = static_cast<int>(packets.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return packets[a].raps()[0] < packets[b].raps()[0]; });
  std::vector<WavePacket> sorted;
  for (int k : order) sorted.push_back(packets[k]);
  int sign = graded_symmetrizer(n, std::vector<int>(n, -1)).sign_of(order);
  FockState st = w_out(space, sorted, chi);
  return {space, Vec(static_cast<double>(sign) * st.coords())};
}

// U(j) phi^chi(U(j) eta_1) ... phi^chi(U(j) eta_n) Omega / (2 pi)^{2n}
inline FockState w_in(const SpacePtr& space, const std::vector<WavePacket>& packets, const ChiFilter& chi,
                      const Reflection& r) {
  check_ordered(packets);
  if (static_cast<int>(packets.size()) > space->nmax()) throw PreconditionError("more packets than N_max");
  FockState st = FockState::vacuum(space);
  for (auto it = packets.rbegin(); it != packets.rend(); ++it) {
    Vec eta = it->rapidity_vector(space->grid());
    Vec ujeta = r.Uj.apply(one_particle_state(space, eta)).wavefunction(1);
    st = apply(pfg_creator(space, ujeta, chi), st);
  }
  st = r.Uj.apply(st);
  return {space, Vec(st.coords() / std::pow(pfg_scale, static_cast<double>(packets.size())))};
}

inline cplx overlap_normalized(const FockState& out, const FockState& in, std::size_t k, std::size_t n) {
  return out.inner(in) / std::sqrt(factorial(static_cast<int>(k)) * factorial(static_cast<int>(n)));
}

inline cplx s_matrix_element(const SpacePtr& space, const std::vector<WavePacket>& out,
                             const std::vector<WavePacket>& in, const ChiFilter& chi) {
  if (out.size() != in.size()) throw PreconditionError("s_matrix_element needs k = n");
  Reflection r = reflect(space);
  return overlap_normalized(w_out(space, out, chi), w_in(space, in, chi, r), out.size(), in.size());
}

// Coefficient of the delta structure in the n-particle kernel: prod_{k<m} (-S(|theta_k - theta_m|)).
// Zero unless eta is a permutation of theta.
inline cplx analytic_kernel(const ScatteringFunction& S, const std::vector<double>& theta,
                            const std::vector<double>& eta, double tol = 1e-12) {
  if (theta.size() != eta.size()) throw PreconditionError("theta and eta must have equal length");
  std::vector<double> a = theta, b = eta;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return 0.0;
  cplx r = 1.0;
  for (std::size_t k = 0; k < theta.size(); ++k)
    for (std::size_t m = k + 1; m < theta.size(); ++m) r *= -S(std::abs(theta[k] - theta[m]));
  return r;
}

// <psi_1 (x) ... (x) psi_n | kernel | eta_n (x) ... (x) eta_1> with the deltas integrated out
// exactly and the remaining rapidity integrals done by tensor Gauss-Legendre on the packet
// supports.
inline cplx analytic_element(const ScatteringFunction& S, const std::vector<WavePacket>& out,
                             const std::vector<WavePacket>& in, int nodes = 160) {
  const int n = static_cast<int>(out.size());
  if (n != static_cast<int>(in.size())) throw PreconditionError("analytic_element needs k = n");
  if (n == 0) return 1.0;
  std::vector<std::vector<double>> xs(n), ws(n);
  for (int j = 0; j < n; ++j) {
    auto r = out[j].raps();
    gauss_legendre(nodes, r[0], r[1], xs[j], ws[j]);
  }
  // in-tensor Phi = eta_n (x) ... (x) eta_1
  auto phi_in = [&](const std::vector<double>& t) {
    cplx v = 1.0;
    for (int j = 0; j < n; ++j) v *= in[n - 1 - j].at_rapidity(t[j]);
    return v;
  };
  auto perms = all_permutations(n);
  std::vector<int> idx(n, 0);
  std::vector<double> th(n), tp(n);
  cplx total = 0;
  while (true) {
    double w = 1.0;
    cplx lhs = 1.0;
    for (int j = 0; j < n; ++j) {
      th[j] = xs[j][idx[j]];
      w *= ws[j][idx[j]];
      lhs *= std::conj(out[j].at_rapidity(th[j]));
    }
    cplx sum = 0;
    for (const auto& p : perms) {
      for (int j = 0; j < n; ++j) tp[j] = th[p[j]];
      sum += phi_in(tp);
    }
    cplx ker = 1.0;
    for (int k = 0; k < n; ++k)
      for (int m = k + 1; m < n; ++m) ker *= -S(std::abs(th[k] - th[m]));
    total += w * lhs * sum * ker / factorial(n);
    int j = n - 1;
    while (j >= 0 && ++idx[j] == nodes) idx[j--] = 0;
    if (j < 0) break;
  }
  return total;
}

struct ScatterRow {
  std::string descriptor;
  std::vector<std::array<double, 2>> out_params, in_params;  // (center, width)
  cplx computed, analytic;
  double rel_error() const { return std::abs(computed - analytic) / std::max(std::abs(analytic), 1e-300); }
};

inline ScatterRow scatter_compare(const SpacePtr& space, const std::vector<WavePacket>& out,
                                  const std::vector<WavePacket>& in, const ChiFilter& chi) {
  ScatterRow row;
  row.descriptor = space->S().descriptor();
  for (auto& p : out) row.out_params.push_back({p.center, p.width});
  for (auto& p : in) row.in_params.push_back({p.center, p.width});
  row.computed = s_matrix_element(space, out, in, chi);
  row.analytic = analytic_element(space->S(), out, in);
  return row;
}

// Forward two-body element divided by its free normalization (1/2) <psi_1,psi_1><psi_2,psi_2>,
// i.e. the packet-averaged -S(theta_2 - theta_1).
inline cplx extracted_two_body_phase(const SpacePtr& space, const WavePacket& a, const WavePacket& b,
                                     const ChiFilter& chi) {
  cplx el = s_matrix_element(space, {a, b}, {a, b}, chi);
  const auto& g = space->grid();
  double na = a.rapidity_vector(g).squaredNorm() * g.spacing();
  double nb = b.rapidity_vector(g).squaredNorm() * g.spacing();
  return el / (0.5 * na * nb);
}

// The raw ratio averages S over the packet profiles, a bias of order w^2. Two widths w and
// w/2 around centers -+ rel/2 remove the leading term.
inline cplx extrapolated_two_body_phase(const SpacePtr& space, double rel, double w, const ChiFilter& chi) {
  auto at = [&](double width) {
    return extracted_two_body_phase(space, WavePacket::bump(-rel / 2, width), WavePacket::bump(rel / 2, width), chi);
  };
  return (4.0 * at(w / 2) - at(w)) / 3.0;
}

}  // namespace zfqft
