#include "rmtcov/spd.hpp"

#include <cmath>
#include <string>

namespace rmtcov {

namespace {

void require_square(const Matrix& a, const char* who) {
  if (a.rows() != a.cols()) {
    throw DimensionError(std::string(who) + ": matrix is " +
                         std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + ", expected square");
  }
}

}  // namespace

SymMatrix::SymMatrix(const Matrix& a) {
  require_square(a, "SymMatrix");
  m_ = 0.5 * (a + a.transpose());
}

SpdMatrix::SpdMatrix(const Matrix& a) {
  require_square(a, "SpdMatrix");
  m_ = 0.5 * (a + a.transpose());
  Eigen::LLT<Matrix> llt(m_);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("SpdMatrix: matrix is not positive definite");
  }
}

SpdMatrix SpdMatrix::identity(Eigen::Index p) {
  return spd_unchecked(Matrix::Identity(p, p));
}

SpdMatrix spd_unchecked(Matrix a) {
  return SpdMatrix(std::move(a), SpdMatrix::unchecked_tag{});
}

SymMatrix sym(const Matrix& a) {
  require_square(a, "sym");
  return SymMatrix(a);
}

EigenPair eig_sym(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.mat());
  if (es.info() != Eigen::Success) {
    throw NumericalError("eig_sym: eigensolver did not converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

EigenPair eig_pencil(const SpdMatrix& c_hat, const SpdMatrix& m) {
  if (c_hat.dim() != m.dim()) {
    throw DimensionError("eig_pencil: dimension mismatch");
  }
  EigenPair em = eig_sym(SymMatrix(m.mat()));
  const double lo = em.values(0);
  const double hi = em.values(em.values.size() - 1);
  if (!(lo > 0.0) || hi / lo > 1e12) {
    throw IllConditionedError(
        "eig_pencil: M condition number " +
        std::to_string(lo > 0.0 ? hi / lo : std::nan("")) + " exceeds 1e12");
  }
  const Vector inv_sqrt = em.values.cwiseSqrt().cwiseInverse();
  Matrix mih = em.vectors * inv_sqrt.asDiagonal() * em.vectors.transpose();
  Matrix s = mih * c_hat.mat() * mih;
  EigenPair es = eig_sym(SymMatrix(s));
  // V = M^{-1/2} O: M^{-1} C_hat V = V Lambda and V^T M V = I.
  return {es.values, mih * es.vectors};
}

SpdMatrix geodesic_step(const SpdMatrix& m, const SymMatrix& g, double t) {
  if (m.dim() != g.dim()) {
    throw DimensionError("geodesic_step: dimension mismatch");
  }
  EigenPair em = eig_sym(SymMatrix(m.mat()));
  const Vector sq = em.values.cwiseSqrt();
  Matrix mh = em.vectors * sq.asDiagonal() * em.vectors.transpose();
  Matrix mih =
      em.vectors * sq.cwiseInverse().asDiagonal() * em.vectors.transpose();
  EigenPair inner = eig_sym(SymMatrix(mih * g.mat() * mih));
  // Assembled in Gram form F F^T so the result is positive semidefinite
  // by construction even for extreme step sizes.
  const Vector e_half = (-0.5 * t * inner.values.array()).exp();
  Matrix f = mh * inner.vectors * e_half.asDiagonal();
  return spd_unchecked(f * f.transpose());
}

SpdMatrix geodesic_step_order2(const SpdMatrix& m, const SymMatrix& g,
                               double t) {
  if (m.dim() != g.dim()) {
    throw DimensionError("geodesic_step_order2: dimension mismatch");
  }
  Matrix minv = spd_inverse(m);
  Matrix out = m.mat() - t * g.mat() +
               0.5 * t * t * g.mat() * minv * g.mat();
  out = 0.5 * (out + out.transpose().eval());
  Eigen::LLT<Matrix> llt(out);
  if (llt.info() != Eigen::Success) {
    throw StepTooLargeError(
        "geodesic_step_order2: step t=" + std::to_string(t) +
        " leaves the positive-definite cone");
  }
  return spd_unchecked(std::move(out));
}

Matrix spd_sqrt(const SpdMatrix& m) {
  EigenPair e = eig_sym(SymMatrix(m.mat()));
  return e.vectors * e.values.cwiseSqrt().asDiagonal() * e.vectors.transpose();
}

Matrix spd_inv_sqrt(const SpdMatrix& m) {
  EigenPair e = eig_sym(SymMatrix(m.mat()));
  return e.vectors * e.values.cwiseSqrt().cwiseInverse().asDiagonal() *
         e.vectors.transpose();
}

Matrix spd_inverse(const SpdMatrix& m) {
  EigenPair e = eig_sym(SymMatrix(m.mat()));
  return e.vectors * e.values.cwiseInverse().asDiagonal() *
         e.vectors.transpose();
}

}  // namespace rmtcov
