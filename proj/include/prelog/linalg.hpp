#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>

#include "prelog/errors.hpp"

namespace prelog {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXcd = Matrix<std::complex<double>>;
using VectorXcd = Vector<std::complex<double>>;

/// Hermitian Toeplitz matrix with entry (j,k) = c(j-k), where
/// c(-m) = conj(c(m)) and column 0 holds c(0..n-1).
template <typename Derived>
Matrix<typename Derived::Scalar> hermitian_toeplitz(const Eigen::MatrixBase<Derived>& first_column) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = first_column.size();
  Matrix<Scalar> out(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = k; j < n; ++j) {
      out(j, k) = first_column(j - k);
      out(k, j) = Eigen::numext::conj(first_column(j - k));
    }
  }
  return out;
}

/// ln det of a Hermitian positive definite matrix via Cholesky.
template <typename Derived>
typename Derived::RealScalar log_det_hpd(const Eigen::MatrixBase<Derived>& a) {
  using Plain = typename Derived::PlainObject;
  const Eigen::LLT<Plain> llt(a);
  if (llt.info() != Eigen::Success) throw NumericalError("Cholesky factorization failed: matrix is not positive definite");
  typename Derived::RealScalar acc = 0;
  const auto& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i) acc += std::log(std::real(l(i, i)));
  return 2 * acc;
}

/// Smallest eigenvalue of a self-adjoint matrix.
template <typename Derived>
typename Derived::RealScalar min_eigenvalue(const Eigen::MatrixBase<Derived>& a) {
  using Plain = typename Derived::PlainObject;
  const Eigen::SelfAdjointEigenSolver<Plain> solver(a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("eigenvalue iteration did not converge");
  return solver.eigenvalues().minCoeff();
}

}  // namespace prelog
