#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cstdio>
#include <functional>

#include "common.hpp"

namespace zfqft {

// Adaptive Gauss-Kronrod on [a, b] for complex integrands. Throws when the error estimate misses
// the absolute tolerance and is not at roundoff level relative to int |f|. A relative target
// much below 1e-12 only makes the bisection dig into roundoff noise.
inline cplx integrate(const std::function<cplx(double)>& f, double a, double b, double abs_tol = 1e-10,
                      unsigned max_depth = 25) {
  double err = 0, l1 = 0;
  cplx r = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, max_depth, 1e-12, &err, &l1);
  if (!(err <= std::max(abs_tol, 1e-13)) && !(err <= 1e-11 * l1)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "adaptive quadrature did not converge (error estimate %.3e)", err);
    throw QuadratureError(buf);
  }
  return r;
}

// Gauss-Legendre nodes and weights on [a, b] (Golub-Welsch free: Newton on P_n).
inline void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0);
  w.assign(n, 0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5)), pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1, p2 = 0;
      for (int j = 1; j <= n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2 * j - 1) * z * p2 - (j - 1) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1);
      double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    x[i] = mid - half * z;
    x[n - 1 - i] = mid + half * z;
    w[i] = w[n - 1 - i] = 2 * half / ((1 - z * z) * pp * pp);
  }
}

// Trapezoid rule on a circle around z0: (1 / 2 pi i) oint f(z) dz, plus max |f| seen.
inline std::pair<cplx, double> circle_average(const std::function<cplx(cplx)>& f, cplx z0, double rho, int points) {
  cplx sum = 0;
  double fmax = 0;
  for (int j = 0; j < points; ++j) {
    cplx e = std::exp(I * (2 * pi * j / points));
    cplx v = f(z0 + rho * e);
    fmax = std::max(fmax, std::abs(v));
    sum += v * rho * e;  // dz / (2 pi i) = rho e dphi / (2 pi)
  }
  return {sum / static_cast<double>(points), fmax};
}

}  // namespace zfqft
