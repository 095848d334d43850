#pragma once

#include <functional>
#include <sstream>

#include "common.hpp"

namespace zfqft {

enum class SKind { constant, sinh_factor, product, custom };

class ScatteringFunction {
 public:
  static ScatteringFunction constant(double value) {
    if (std::abs(std::abs(value) - 1.0) > 0) throw PreconditionError("constant S must be +1 or -1");
    ScatteringFunction s;
    s.kind_ = SKind::constant;
    s.value_ = value;
    return s;
  }

  // S_b(z) = (sinh z - i sin b) / (sinh z + i sin b)
  static ScatteringFunction sinh_factor(double b) { return product({b}, SKind::sinh_factor); }

  static ScatteringFunction product(std::vector<double> bs, SKind kind = SKind::product) {
    for (double b : bs)
      if (!(b > 0.0 && b < pi)) throw PreconditionError("sinh factor parameter b must lie in (0, pi)");
    ScatteringFunction s;
    s.kind_ = kind;
    s.bs_ = std::move(bs);
    for (double b : s.bs_) {
      // zeros of sinh z + i sin b: z = -ib and z = i(pi + b), mod 2 pi i
      s.poles_.push_back(cplx(0.0, -b));
      s.poles_.push_back(cplx(0.0, pi + b));
    }
    return s;
  }

  // Arbitrary evaluator, used for negative tests. Poles are whatever the caller declares.
  static ScatteringFunction custom(std::string name, std::function<cplx(cplx)> f, std::vector<cplx> poles = {}) {
    ScatteringFunction s;
    s.kind_ = SKind::custom;
    s.name_ = std::move(name);
    s.fn_ = std::move(f);
    s.poles_ = std::move(poles);
    return s;
  }

  // "const:1", "const:-1", "sinh:0.785", "product:0.5,1.0"
  static ScatteringFunction parse(const std::string& desc) {
    auto colon = desc.find(':');
    if (colon == std::string::npos) throw ConfigError("S descriptor needs kind:params, got '" + desc + "'");
    std::string kind = desc.substr(0, colon), rest = desc.substr(colon + 1);
    std::vector<double> vals;
    std::stringstream ss(rest);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        vals.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ConfigError("bad number '" + tok + "' in S descriptor");
      }
    }
    if (vals.empty()) throw ConfigError("S descriptor '" + desc + "' has no parameters");
    if (kind == "const" || kind == "constant") return constant(vals.at(0));
    if (kind == "sinh" || kind == "sinh_factor") return sinh_factor(vals.at(0));
    if (kind == "product") return product(vals);
    throw ConfigError("unknown S kind '" + kind + "'");
  }

  SKind kind() const { return kind_; }
  const std::vector<double>& parameters() const { return bs_; }
  bool is_constant(double v) const { return kind_ == SKind::constant && value_ == v; }
  double pole_exclusion() const { return exclusion_; }
  void set_pole_exclusion(double r) { exclusion_ = r; }

  std::string descriptor() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
      case SKind::constant: os << "const:" << value_; break;
      case SKind::sinh_factor: os << "sinh:" << bs_[0]; break;
      case SKind::product:
        os << "product:";
        for (std::size_t i = 0; i < bs_.size(); ++i) os << (i ? "," : "") << bs_[i];
        break;
      case SKind::custom: os << "custom:" << name_; break;
    }
    return os.str();
  }

  // Declared poles reduced to one period strip; membership is tested modulo 2 pi i.
  const std::vector<cplx>& poles() const { return poles_; }

  double distance_to_pole(cplx z) const {
    double d = INFINITY;
    for (cplx p : poles_) {
      double im = std::remainder(z.imag() - p.imag(), 2 * pi);
      d = std::min(d, std::hypot(z.real() - p.real(), im));
    }
    return d;
  }

  bool has_pole_in_closed_strip() const {
    for (cplx p : poles_) {
      double im = std::remainder(p.imag(), 2 * pi);
      if (im < 0) im += 2 * pi;
      if (p.real() == p.real() && im >= -1e-15 && im <= pi + 1e-15) return true;
    }
    return false;
  }

  cplx operator()(cplx z) const {
    if (!poles_.empty() && distance_to_pole(z) < exclusion_) {
      std::ostringstream os;
      os << "S evaluated within " << exclusion_ << " of a pole at z = " << z;
      throw PoleError(os.str());
    }
    switch (kind_) {
      case SKind::constant: return value_;
      case SKind::custom: return fn_(z);
      default: {
        cplx r = 1.0;
        cplx sh = std::sinh(z);
        for (double b : bs_) {
          cplx is = I * std::sin(b);
          r *= (sh - is) / (sh + is);
        }
        return r;
      }
    }
  }

  cplx operator()(double theta) const { return (*this)(cplx(theta, 0.0)); }

 private:
  SKind kind_ = SKind::constant;
  double value_ = 1.0;
  std::vector<double> bs_;
  std::vector<cplx> poles_;
  std::function<cplx(cplx)> fn_;
  std::string name_;
  double exclusion_ = 1e-9;
};

struct SymmetryReport {
  std::string descriptor;
  std::size_t samples = 0;
  double inverse_vs_reflection = 0;    // |S(z)^-1 - S(-z)|
  double reflection_vs_conjugate = 0;  // |S(-z) - conj S(conj z)|
  double conjugate_vs_shift = 0;       // |conj S(conj z) - S(z + i pi)|
  double real_line_unitarity = 0;      // |S(t) S(-t) - 1| on real samples
  double tolerance = 1e-12;
  double max_residual() const {
    return std::max({inverse_vs_reflection, reflection_vs_conjugate, conjugate_vs_shift, real_line_unitarity});
  }
  bool passed() const { return max_residual() < tolerance; }
};

struct StripRectangle {
  double re_min = -4.0, re_max = 4.0;
  double im_min = 0.05 * pi, im_max = 0.95 * pi;
};

inline std::vector<cplx> strip_samples(std::size_t count, const StripRectangle& r = {}) {
  std::vector<cplx> out;
  for (auto [u, v] : halton2(count))
    out.emplace_back(r.re_min + u * (r.re_max - r.re_min), r.im_min + v * (r.im_max - r.im_min));
  return out;
}

// Residuals are relative to max(1, |lhs|, |rhs|) so that samples close to a zero of S
// are not penalized for the size of 1/S.
inline SymmetryReport verify_symmetries(const ScatteringFunction& S, const std::vector<cplx>& samples,
                                        double tol = 1e-12, bool allow_boundary_poles = false) {
  if (!allow_boundary_poles && S.has_pole_in_closed_strip())
    throw PreconditionError("S declares a pole on the closed strip 0 <= Im z <= pi (pass --allow-boundary-poles)");
  SymmetryReport rep;
  rep.descriptor = S.descriptor();
  rep.samples = samples.size();
  rep.tolerance = tol;
  for (cplx z : samples) {
    if (!(z.imag() > 0 && z.imag() < pi)) throw PreconditionError("sample outside the open strip");
    cplx s = S(z), sm = S(-z), sc = std::conj(S(std::conj(z))), sp = S(z + I * pi);
    rep.inverse_vs_reflection = std::max(rep.inverse_vs_reflection, rel_diff(1.0 / s, sm));
    rep.reflection_vs_conjugate = std::max(rep.reflection_vs_conjugate, rel_diff(sm, sc));
    rep.conjugate_vs_shift = std::max(rep.conjugate_vs_shift, rel_diff(sc, sp));
    double t = z.real();
    rep.real_line_unitarity = std::max(rep.real_line_unitarity, std::abs(S(t) * S(-t) - 1.0));
  }
  return rep;
}

}  // namespace zfqft
