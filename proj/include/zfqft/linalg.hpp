#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "common.hpp"

namespace zfqft {

using SpMat = Eigen::SparseMatrix<cplx>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using Trip = Eigen::Triplet<cplx>;

// Above this many columns the spectral norm is replaced by the Frobenius norm,
// which bounds it from above and is what residual checks need.
inline constexpr Index exact_norm_limit = 1200;

inline double spectral_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Mat g = m.cols() <= m.rows() ? Mat(m.adjoint() * m) : Mat(m * m.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

inline double spectral_norm(const SpMat& m) {
  if (m.nonZeros() == 0) return 0.0;
  Index small = std::min(m.rows(), m.cols());
  if (small > exact_norm_limit) return m.norm();
  SpMat g = m.cols() <= m.rows() ? SpMat(m.adjoint() * m) : SpMat(m * m.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(Mat(g), Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

inline SpMat sparse_diag(const Vec& d) {
  SpMat m(d.size(), d.size());
  std::vector<Trip> t;
  t.reserve(d.size());
  for (Index i = 0; i < d.size(); ++i)
    if (d[i] != cplx(0.0)) t.emplace_back(i, i, d[i]);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

inline SpMat sparse_identity(Index n) {
  SpMat m(n, n);
  m.setIdentity();
  return m;
}

inline double max_abs(const SpMat& m) {
  double r = 0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it) r = std::max(r, std::abs(it.value()));
  return r;
}

}  // namespace zfqft
