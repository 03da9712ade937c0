#pragma once

#include <Eigen/Dense>
#include <vector>

#include "chansim/common.hpp"

namespace chansim {

// Kronecker product; the left factor indexes the most significant digit.
template <class DA, class DB>
auto kron(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  using Scalar = typename DA::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                            a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Mat hermitize(const Mat& a) { return 0.5 * (a + a.adjoint()); }

// Traces out every subsystem not listed in `keep` (indices into `dims`,
// strictly increasing).  Subsystem 0 is the most significant tensor factor.
Mat partial_trace(const Mat& rho, const std::vector<int>& dims,
                  const std::vector<int>& keep);

// Positive-semidefinite square root (eigenvalues clamped at zero).
Mat hermitian_sqrt(const Mat& a);

// Inverse square root on the support; eigenvalues below rel_tol * max are
// treated as zero, so the result annihilates the kernel.
Mat pinv_sqrt(const Mat& a, double rel_tol = 1e-12);

// Sum of |eigenvalues| of a hermitian matrix (its trace norm).
double trace_norm_hermitian(const Mat& a);

// (1/2) || a - b ||_1 for hermitian a, b; in [0, 1] for states.
inline double trace_distance(const Mat& a, const Mat& b) {
  return 0.5 * trace_norm_hermitian(a - b);
}

}  // namespace chansim
