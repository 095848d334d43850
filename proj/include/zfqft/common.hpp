#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace zfqft {

using cplx = std::complex<double>;
using Index = std::int64_t;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx I{0.0, 1.0};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numeric-failure family; the CLI maps these to exit code 3.
struct PoleError : Error {
  using Error::Error;
};
struct PreconditionError : Error {
  using Error::Error;
};
struct GradeError : Error {
  using Error::Error;
};
struct OrderingError : Error {
  using Error::Error;
};
struct QuadratureError : Error {
  using Error::Error;
};
struct DecompositionError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

inline double factorial(int n) {
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

inline Index ipow(Index b, int e) {
  Index r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// All permutations of {0..n-1} in lexicographic order.
inline std::vector<std::vector<int>> all_permutations(int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

inline int permutation_sign(const std::vector<int>& p) {
  int s = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) s = -s;
  return s;
}

inline double radical_inverse(std::uint64_t i, unsigned base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

// 2D Halton points (bases 2, 3), skipping the origin.
inline std::vector<std::pair<double, double>> halton2(std::size_t count) {
  std::vector<std::pair<double, double>> out;
  out.reserve(count);
  for (std::size_t i = 1; i <= count; ++i) out.emplace_back(radical_inverse(i, 2), radical_inverse(i, 3));
  return out;
}

inline double rel_diff(cplx a, cplx b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace zfqft
