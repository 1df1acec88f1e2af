#pragma once

#include <Eigen/Dense>

#include "rmtcov/errors.hpp"

namespace rmtcov {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Square matrix constrained to be exactly symmetric after construction.
class SymMatrix {
 public:
  explicit SymMatrix(const Matrix& a);

  const Matrix& mat() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  Matrix m_;
};

/// Symmetric positive definite matrix. Definiteness is verified with a
/// Cholesky factorization on construction.
class SpdMatrix {
 public:
  explicit SpdMatrix(const Matrix& a);

  static SpdMatrix identity(Eigen::Index p);

  const Matrix& mat() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  struct unchecked_tag {};
  SpdMatrix(Matrix a, unchecked_tag) : m_(std::move(a)) {}
  Matrix m_;

  friend SpdMatrix spd_unchecked(Matrix a);
};

/// Internal escape hatch for matrices already known to be SPD by
/// construction (e.g. V diag(positive) V^T assemblies).
SpdMatrix spd_unchecked(Matrix a);

/// Spectral decomposition: ascending eigenvalues, column eigenvectors.
/// For eig_sym the basis is orthonormal; for eig_pencil it is
/// M-orthonormal (V^T M V = I, so V^{-1} = V^T M).
struct EigenPair {
  Vector values;
  Matrix vectors;
};

/// Symmetric part (A + A^T)/2.
SymMatrix sym(const Matrix& a);

/// Eigendecomposition of a symmetric matrix; values ascending.
EigenPair eig_sym(const SymMatrix& a);

/// Generalized spectrum of the pencil: eigenvalues of M^{-1} C_hat with an
/// M-orthonormal eigenbasis. Solved through the symmetric reduction
/// M^{-1/2} C_hat M^{-1/2}; the spectrum is real positive by construction.
/// Throws IllConditionedError when cond(M) exceeds 1e12.
EigenPair eig_pencil(const SpdMatrix& c_hat, const SpdMatrix& m);

/// M^{1/2} exp(-t M^{-1/2} G M^{-1/2}) M^{1/2}. SPD for every t >= 0.
SpdMatrix geodesic_step(const SpdMatrix& m, const SymMatrix& g, double t);

/// Second-order expansion M - tG + (t^2/2) G M^{-1} G of the geodesic;
/// agrees with geodesic_step to O(t^3). Throws StepTooLargeError when the
/// result leaves the positive-definite cone.
SpdMatrix geodesic_step_order2(const SpdMatrix& m, const SymMatrix& g,
                               double t);

/// Symmetric square root and inverse square root via eig_sym.
Matrix spd_sqrt(const SpdMatrix& m);
Matrix spd_inv_sqrt(const SpdMatrix& m);
Matrix spd_inverse(const SpdMatrix& m);

}  // namespace rmtcov
