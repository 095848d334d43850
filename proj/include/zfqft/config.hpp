#pragma once

#include <map>
#include <optional>
#include <set>
#include <toml.hpp>

#include "carlattice.hpp"
#include "formfactors.hpp"
#include "scattering.hpp"

namespace zfqft {

// Named tolerances. Every key can be changed from a config [tolerances] table or --tol-override.
inline std::map<std::string, double> default_tolerances() {
  return {
      {"symmetry", 1e-12},    // S relations
      {"zf", 1e-10},          // exchange relations, operator norm
      {"locality_decay", 1e3},  // minimum decay factor d = 0 -> d = max
      {"scatter", 5e-3},      // relative error against the analytic kernel
      {"phase", 5e-3},        // |phase + S(rel)|
      {"exchange", 1e-8},     // P_Gamma exchange antisymmetry of overlaps
      {"norm", 1e-10},        // ||P_Gamma psi||^2 = ||psi||^2 / n!
      {"pfg", 1e-10},         // ||phi(psi)^chi - (2 pi)^2 z^dag(psi)||
      {"tau", 1e-8},          // tau independence
      {"ff", 1e-9},           // FW / FD residuals
      {"residue", 1e-6},      // FD4 relative residue error
      {"boundary", 1e-8},     // boundary_match round trip
      {"car", 1e-12},         // CAR / disorder identities
  };
}

struct Config {
  std::uint64_t seed = 1;
  std::string source = "<defaults>";

  std::optional<ScatteringFunction> smatrix;  // unset: every built-in where that makes sense
  bool allow_boundary_poles = false;
  std::optional<RapidityGrid> grid;  // unset: each subcommand has its own default
  std::optional<int> truncation;
  std::map<std::string, double> tol = default_tolerances();

  struct Symmetry {
    int samples = 200;
    StripRectangle strip;
  } symmetry;

  struct Locality {
    bool explicit_mode = false;  // false: run phi vs phi^ and both Majorana components
    LocalityMode mode = LocalityMode::phi_vs_phihat;
    int component = 1;
    TestFunction left = TestFunction::gaussian({0.0, 0.0}, {0.45, 0.45});
    TestFunction right = TestFunction::gaussian({0.25, 0.0}, {0.45, 0.45});
    std::vector<double> separations{0, 1, 2, 4, 8};
  } locality;

  struct Scatter {
    std::string check = "kernel";  // kernel | phase | two-body | statistics | pfg
    std::vector<WavePacket> out, in;  // empty: defaults chosen by particle number
    ChiFilter chi = [] {
      ChiFilter c;
      c.rap_lo = -2.5;
      c.rap_hi = 2.5;
      return c;
    }();
    double relative_rapidity = 1.0;
    double phase_width = 0.4;
    std::vector<double> taus{1, 5, 25};
    WavePacket tau_packet = WavePacket::gaussian(0.0, 1.0);
    WavePacket pfg_packet = WavePacket::bump(0.2, 0.6);
  } scatter;

  struct FormFactors {
    std::string family = "ising-fermion-g";
    FamilyParams params;
    int k_max = 3;
    Sampler sampler;
    int boundary_order = 2;
  } ff;

  struct Car {
    int n_left = 1, n_right = 1;
    std::vector<std::pair<int, int>> sizes;  // empty: just (n_left, n_right)
    int sin_matrices = 100;
    int sin_size = 8;
  } car;

  struct Output {
    std::string json, csv;
  } output;

  RapidityGrid grid_or(RapidityGrid fallback) const { return grid ? *grid : fallback; }
  int truncation_or(int fallback) const { return truncation ? *truncation : fallback; }

  double tolerance(const std::string& key) const {
    auto it = tol.find(key);
    if (it == tol.end()) throw ConfigError("unknown tolerance '" + key + "'");
    return it->second;
  }

  void set_tolerance(const std::string& key, double v) {
    if (!tol.count(key)) throw ConfigError("unknown tolerance '" + key + "'");
    if (!(v > 0) || !std::isfinite(v)) throw ConfigError("tolerance '" + key + "' must be positive");
    tol[key] = v;
  }

  // "KEY=VAL"
  void apply_override(const std::string& kv) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--tol-override expects KEY=VAL, got '" + kv + "'");
    std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    double v;
    try {
      std::size_t used = 0;
      v = std::stod(val, &used);
      if (used != val.size()) throw std::invalid_argument(val);
    } catch (const std::exception&) {
      throw ConfigError("--tol-override: '" + val + "' is not a number");
    }
    set_tolerance(key, v);
  }

  std::vector<ScatteringFunction> smatrix_list() const {
    if (smatrix) return {*smatrix};
    return {ScatteringFunction::constant(1), ScatteringFunction::constant(-1), ScatteringFunction::sinh_factor(pi / 4),
            ScatteringFunction::product({pi / 4, 1.2})};
  }
};

namespace cfg {

inline std::string where(const Config& c, const toml::source_region& r) {
  const auto& b = r.begin;
  std::ostringstream os;
  os << c.source << ":" << b.line << ":" << b.column;
  return os.str();
}

[[noreturn]] inline void fail(const Config& c, const toml::node& n, const std::string& msg) {
  throw ConfigError(where(c, n.source()) + ": " + msg);
}

inline void known_keys(const Config& c, const toml::table& t, std::initializer_list<const char*> keys) {
  std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& [k, v] : t)
    if (!ok.count(std::string(k.str())))
      throw ConfigError(where(c, k.source()) + ": unknown key '" + std::string(k.str()) + "'");
}

inline double number(const Config& c, const toml::node& n) {
  if (auto v = n.value<double>()) return *v;  // integers convert
  fail(c, n, "expected a number");
}

inline std::int64_t integer(const Config& c, const toml::node& n) {
  if (n.is_integer()) return *n.value<std::int64_t>();
  fail(c, n, "expected an integer");
}

inline std::string string(const Config& c, const toml::node& n) {
  if (n.is_string()) return *n.value<std::string>();
  fail(c, n, "expected a string");
}

inline bool boolean(const Config& c, const toml::node& n) {
  if (n.is_boolean()) return *n.value<bool>();
  fail(c, n, "expected true or false");
}

inline const toml::table& table(const Config& c, const toml::node& n) {
  if (auto t = n.as_table()) return *t;
  fail(c, n, "expected a table");
}

inline const toml::array& array(const Config& c, const toml::node& n) {
  if (auto a = n.as_array()) return *a;
  fail(c, n, "expected an array");
}

inline std::vector<double> numbers(const Config& c, const toml::node& n) {
  std::vector<double> out;
  for (const auto& e : array(c, n)) out.push_back(number(c, e));
  return out;
}

inline std::array<double, 2> pair(const Config& c, const toml::node& n) {
  auto v = numbers(c, n);
  if (v.size() != 2) fail(c, n, "expected two numbers [t, x]");
  return {v[0], v[1]};
}

inline void positive(const Config& c, const toml::node& n, double v, const char* what) {
  if (!(v > 0)) fail(c, n, std::string(what) + " must be positive");
}

inline ScatteringFunction smatrix(const Config& c, const toml::node& n) {
  try {
    if (n.is_string()) return ScatteringFunction::parse(*n.value<std::string>());
    const auto& t = table(c, n);
    known_keys(c, t, {"kind", "b", "value", "bs"});
    if (!t.contains("kind")) fail(c, n, "smatrix needs a kind");
    std::string kind = string(c, *t.get("kind"));
    if (kind == "constant") {
      if (!t.contains("value")) fail(c, n, "constant smatrix needs value = 1 or -1");
      return ScatteringFunction::constant(number(c, *t.get("value")));
    }
    if (kind == "sinh_factor") {
      if (!t.contains("b")) fail(c, n, "sinh_factor needs b");
      return ScatteringFunction::sinh_factor(number(c, *t.get("b")));
    }
    if (kind == "product") {
      if (!t.contains("bs")) fail(c, n, "product needs bs = [...]");
      return ScatteringFunction::product(numbers(c, *t.get("bs")));
    }
    fail(c, *t.get("kind"), "unknown smatrix kind '" + kind + "'");
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(c, n, e.what());
  }
}

inline TestFunction testfn(const Config& c, const toml::node& n) {
  const auto& t = table(c, n);
  known_keys(c, t, {"kind", "center", "width", "amplitude", "eps_tail"});
  TestFunction f;
  if (auto k = t.get("kind")) {
    std::string s = string(c, *k);
    if (s == "gaussian") f.kind = TestKind::gaussian;
    else if (s == "bump") f.kind = TestKind::bump;
    else fail(c, *k, "test function kind must be gaussian or bump");
  }
  if (auto v = t.get("center")) f.center = pair(c, *v);
  if (auto v = t.get("width")) {
    f.width = pair(c, *v);
    positive(c, *v, std::min(f.width[0], f.width[1]), "width");
  }
  if (auto v = t.get("amplitude")) f.amplitude = number(c, *v);
  if (auto v = t.get("eps_tail")) {
    f.eps_tail = number(c, *v);
    if (!(f.eps_tail > 0 && f.eps_tail < 1)) fail(c, *v, "eps_tail must lie in (0, 1)");
  }
  return f;
}

inline WavePacket packet(const Config& c, const toml::node& n) {
  const auto& t = table(c, n);
  known_keys(c, t, {"kind", "center", "width", "mass", "amplitude"});
  WavePacket p;
  if (auto k = t.get("kind")) {
    std::string s = string(c, *k);
    if (s == "bump") p.kind = PacketKind::bump_rapidity;
    else if (s == "gaussian") p.kind = PacketKind::gaussian_k;
    else fail(c, *k, "packet kind must be bump or gaussian");
  }
  if (auto v = t.get("center")) p.center = number(c, *v);
  if (auto v = t.get("width")) {
    p.width = number(c, *v);
    positive(c, *v, p.width, "width");
  }
  if (auto v = t.get("mass")) {
    p.mass = number(c, *v);
    positive(c, *v, p.mass, "mass");
  }
  if (auto v = t.get("amplitude")) p.amplitude = number(c, *v);
  return p;
}

inline std::vector<WavePacket> packets(const Config& c, const toml::node& n) {
  std::vector<WavePacket> out;
  for (const auto& e : array(c, n)) out.push_back(packet(c, e));
  return out;
}

inline ChiFilter chi(const Config& c, const toml::node& n) {
  const auto& t = table(c, n);
  known_keys(c, t, {"mass", "shell_plateau", "shell_window", "rap_lo", "rap_hi", "rap_transition", "unity"});
  ChiFilter x;
  if (auto v = t.get("mass")) x.mass = number(c, *v);
  if (auto v = t.get("shell_plateau")) x.shell_plateau = number(c, *v);
  if (auto v = t.get("shell_window")) x.shell_window = number(c, *v);
  if (auto v = t.get("rap_lo")) x.rap_lo = number(c, *v);
  if (auto v = t.get("rap_hi")) x.rap_hi = number(c, *v);
  if (auto v = t.get("rap_transition")) x.rap_transition = number(c, *v);
  if (auto v = t.get("unity")) x.unity = boolean(c, *v);
  if (!(x.shell_window > x.shell_plateau && x.shell_plateau >= 0)) fail(c, n, "need 0 <= shell_plateau < shell_window");
  if (!(x.rap_hi > x.rap_lo)) fail(c, n, "need rap_lo < rap_hi");
  if (!(x.rap_transition > 0)) fail(c, n, "rap_transition must be positive");
  return x;
}

}  // namespace cfg

inline void load_config_table(Config& c, const toml::table& root) {
  using namespace cfg;
  known_keys(c, root, {"seed", "smatrix", "allow_boundary_poles", "grid", "truncation", "tolerances", "symmetry",
                       "locality", "scatter", "formfactors", "car", "output"});
  if (auto v = root.get("seed")) {
    auto s = integer(c, *v);
    if (s < 0) fail(c, *v, "seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (auto v = root.get("smatrix")) c.smatrix = smatrix(c, *v);
  if (auto v = root.get("allow_boundary_poles")) c.allow_boundary_poles = boolean(c, *v);
  if (auto v = root.get("grid")) {
    const auto& t = table(c, *v);
    known_keys(c, t, {"theta_min", "theta_max", "n_points", "mass"});
    RapidityGrid g;
    if (auto x = t.get("theta_min")) g.theta_min = number(c, *x);
    if (auto x = t.get("theta_max")) g.theta_max = number(c, *x);
    if (auto x = t.get("n_points")) g.n_points = static_cast<int>(integer(c, *x));
    if (auto x = t.get("mass")) g.mass = number(c, *x);
    c.grid = g;
    try {
      g.validate();
    } catch (const ConfigError& e) {
      fail(c, *v, e.what());
    }
  }
  if (auto v = root.get("truncation")) {
    auto n = integer(c, *v);
    if (n < 0 || n > 6) fail(c, *v, "truncation must lie in [0, 6]");
    c.truncation = static_cast<int>(n);
  }
  if (auto v = root.get("tolerances")) {
    for (const auto& [k, x] : table(c, *v)) {
      std::string key(k.str());
      if (!c.tol.count(key)) fail(c, x, "unknown tolerance '" + key + "'");
      double val = number(c, x);
      if (!(val > 0)) fail(c, x, "tolerance '" + key + "' must be positive");
      c.tol[key] = val;
    }
  }
  if (auto v = root.get("symmetry")) {
    const auto& t = table(c, *v);
    known_keys(c, t, {"samples", "strip"});
    if (auto x = t.get("samples")) {
      c.symmetry.samples = static_cast<int>(integer(c, *x));
      if (c.symmetry.samples < 1) fail(c, *x, "samples must be >= 1");
    }
    if (auto x = t.get("strip")) {
      const auto& s = table(c, *x);
      known_keys(c, s, {"re_min", "re_max", "im_min", "im_max"});
      auto& r = c.symmetry.strip;
      if (auto y = s.get("re_min")) r.re_min = number(c, *y);
      if (auto y = s.get("re_max")) r.re_max = number(c, *y);
      if (auto y = s.get("im_min")) r.im_min = number(c, *y);
      if (auto y = s.get("im_max")) r.im_max = number(c, *y);
      if (!(r.re_max > r.re_min && r.im_min > 0 && r.im_max < pi && r.im_max > r.im_min))
        fail(c, *x, "strip rectangle must be non-empty and inside 0 < Im z < pi");
    }
  }
  if (auto v = root.get("locality")) {
    const auto& t = table(c, *v);
    known_keys(c, t, {"mode", "component", "left", "right", "separations"});
    if (auto x = t.get("mode")) {
      c.locality.explicit_mode = true;
      std::string m = string(c, *x);
      if (m == "phi_hat") c.locality.mode = LocalityMode::phi_vs_phihat;
      else if (m == "majorana") c.locality.mode = LocalityMode::majorana_vs_phiprime;
      else fail(c, *x, "locality mode must be phi_hat or majorana");
    }
    if (auto x = t.get("component")) {
      auto k = integer(c, *x);
      if (k != 1 && k != -1) fail(c, *x, "component must be 1 or -1");
      c.locality.component = static_cast<int>(k);
    }
    if (auto x = t.get("left")) c.locality.left = testfn(c, *x);
    if (auto x = t.get("right")) c.locality.right = testfn(c, *x);
    if (auto x = t.get("separations")) {
      c.locality.separations = numbers(c, *x);
      if (c.locality.separations.empty()) fail(c, *x, "separations must not be empty");
    }
  }
  if (auto v = root.get("scatter")) {
    const auto& t = table(c, *v);
    known_keys(c, t, {"check", "out", "in", "chi", "relative_rapidity", "phase_width", "taus", "tau_packet",
                      "pfg_packet"});
    auto& s = c.scatter;
    if (auto x = t.get("check")) {
      s.check = string(c, *x);
      if (s.check != "kernel" && s.check != "phase" && s.check != "two-body" && s.check != "statistics" &&
          s.check != "pfg")
        fail(c, *x, "scatter check must be kernel, phase, two-body, statistics or pfg");
    }
    if (auto x = t.get("out")) s.out = packets(c, *x);
    if (auto x = t.get("in")) s.in = packets(c, *x);
    if (auto x = t.get("chi")) s.chi = chi(c, *x);
    if (auto x = t.get("relative_rapidity")) s.relative_rapidity = number(c, *x);
    if (auto x = t.get("phase_width")) {
      s.phase_width = number(c, *x);
      positive(c, *x, s.phase_width, "phase_width");
    }
    if (auto x = t.get("taus")) s.taus = numbers(c, *x);
    if (auto x = t.get("tau_packet")) s.tau_packet = packet(c, *x);
    if (auto x = t.get("pfg_packet")) s.pfg_packet = packet(c, *x);
  }
  if (auto v = root.get("formfactors")) {
    const auto& t = table(c, *v);
    known_keys(c, t, {"family", "sign", "constant", "ell", "testfn", "k_max", "samples", "polydiscs", "rho",
                      "contour_points", "boundary_order"});
    auto& f = c.ff;
    if (auto x = t.get("family")) f.family = string(c, *x);
    if (auto x = t.get("sign")) {
      auto s = integer(c, *x);
      if (s != 1 && s != -1) fail(c, *x, "sign must be 1 or -1");
      f.params.sign = static_cast<int>(s);
    }
    if (auto x = t.get("constant")) f.params.constant = number(c, *x);
    if (auto x = t.get("ell")) {
      f.params.ell = number(c, *x);
      positive(c, *x, f.params.ell, "ell");
    }
    if (auto x = t.get("testfn")) f.params.g = testfn(c, *x);
    if (auto x = t.get("k_max")) {
      f.k_max = static_cast<int>(integer(c, *x));
      if (f.k_max < 1 || f.k_max > 4) fail(c, *x, "k_max must lie in [1, 4]");
    }
    if (auto x = t.get("samples")) f.sampler.samples = static_cast<int>(integer(c, *x));
    if (auto x = t.get("polydiscs")) f.sampler.polydiscs = static_cast<int>(integer(c, *x));
    if (auto x = t.get("rho")) f.sampler.rho = number(c, *x);
    if (auto x = t.get("contour_points")) f.sampler.contour_points = static_cast<int>(integer(c, *x));
    if (auto x = t.get("boundary_order")) {
      f.boundary_order = static_cast<int>(integer(c, *x));
      if (f.boundary_order < 0 || f.boundary_order > 2) fail(c, *x, "boundary_order must lie in [0, 2]");
    }
    try {
      builtin_family(f.family, f.params);
    } catch (const ConfigError& e) {
      fail(c, *t.get("family"), e.what());
    }
  }
  if (auto v = root.get("car")) {
    const auto& t = table(c, *v);
    known_keys(c, t, {"n_left", "n_right", "sizes", "sin_matrices", "sin_size"});
    if (auto x = t.get("n_left")) c.car.n_left = static_cast<int>(integer(c, *x));
    if (auto x = t.get("n_right")) c.car.n_right = static_cast<int>(integer(c, *x));
    if (auto x = t.get("sin_matrices")) c.car.sin_matrices = static_cast<int>(integer(c, *x));
    if (auto x = t.get("sin_size")) c.car.sin_size = static_cast<int>(integer(c, *x));
    if (c.car.n_left < 1 || c.car.n_right < 1 || c.car.n_left + c.car.n_right > 6)
      fail(c, *v, "car needs n_left, n_right >= 1 with n_left + n_right <= 6");
    if (auto x = t.get("sizes")) {
      for (const auto& e : array(c, *x)) {
        auto p = pair(c, e);
        int l = static_cast<int>(p[0]), r = static_cast<int>(p[1]);
        if (l != p[0] || r != p[1] || l < 1 || r < 1 || l + r > 6)
          fail(c, e, "each size needs integers n_left, n_right >= 1 with n_left + n_right <= 6");
        c.car.sizes.push_back({l, r});
      }
      if (c.car.sizes.empty()) fail(c, *x, "sizes must not be empty");
    }
    if (c.car.sin_matrices < 1 || c.car.sin_size < 1) fail(c, *v, "sin_matrices and sin_size must be >= 1");
  }
  if (auto v = root.get("output")) {
    const auto& t = table(c, *v);
    known_keys(c, t, {"json", "csv"});
    if (auto x = t.get("json")) c.output.json = string(c, *x);
    if (auto x = t.get("csv")) c.output.csv = string(c, *x);
  }
}

inline Config parse_config_string(std::string_view text, const std::string& name = "<string>") {
  Config c;
  c.source = name;
  try {
    toml::table root = toml::parse(text, name);
    load_config_table(c, root);
  } catch (const toml::parse_error& e) {
    const auto& b = e.source().begin;
    std::ostringstream os;
    os << name << ":" << b.line << ":" << b.column << ": " << e.description();
    throw ConfigError(os.str());
  }
  return c;
}

inline Config load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_string(ss.str(), path);
}

}  // namespace zfqft
