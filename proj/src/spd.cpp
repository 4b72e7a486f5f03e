#include "rhlqr/spd.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rhlqr/errors.hpp"

namespace rhlqr {
namespace {

Eigen::SelfAdjointEigenSolver<Matrix> eig_sym(const Matrix& M,
                                               const char* where) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(M));
  if (es.info() != Eigen::Success) {
    std::ostringstream os;
    os << where << ": eigendecomposition failed (dim " << M.rows() << ")";
    throw NumericalError(os.str());
  }
  return es;
}

void require_positive(const Vector& ev, const char* where) {
  if (ev.size() > 0 && !(ev.minCoeff() > 0.0)) {
    std::ostringstream os;
    os << where << ": non-positive eigenvalue " << ev.minCoeff()
       << " (condition estimate "
       << (ev.minCoeff() > 0.0 ? ev.maxCoeff() / ev.minCoeff() : INFINITY)
       << ")";
    throw NumericalError(os.str());
  }
}

Matrix apply_spectral(const Eigen::SelfAdjointEigenSolver<Matrix>& es,
                      const Vector& f) {
  const Matrix& V = es.eigenvectors();
  return symmetrize(V * f.asDiagonal() * V.transpose());
}

}  // namespace

Matrix symmetrize(const Matrix& M) {
  return 0.5 * (M + M.transpose());
}

double norm2(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(M);
  return svd.singularValues()(0);
}

double lambda_min(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  return Eigen::SelfAdjointEigenSolver<Matrix>(symmetrize(M),
                                               Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

double lambda_max(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  return Eigen::SelfAdjointEigenSolver<Matrix>(symmetrize(M),
                                               Eigen::EigenvaluesOnly)
      .eigenvalues()
      .maxCoeff();
}

double sym_norm2(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  return Eigen::SelfAdjointEigenSolver<Matrix>(symmetrize(M),
                                               Eigen::EigenvaluesOnly)
      .eigenvalues()
      .cwiseAbs()
      .maxCoeff();
}

SpdMatrix::SpdMatrix(const Matrix& M, const Tolerances& tol) {
  if (M.rows() != M.cols() || M.rows() == 0) {
    std::ostringstream os;
    os << "SPD matrix must be square and non-empty, got " << M.rows() << "x"
       << M.cols();
    throw InputError(os.str());
  }
  if (!M.allFinite()) throw InputError("SPD matrix has non-finite entries");
  const double scale = norm2(M);
  const double asym = norm2(M - M.transpose());
  if (asym > tol.sym_tol * scale) {
    std::ostringstream os;
    os << "matrix is not symmetric: ||M - M'||_2 = " << asym
       << " exceeds " << tol.sym_tol << " * ||M||_2";
    throw InputError(os.str());
  }
  m_ = symmetrize(M);
  const double lmin = lambda_min(m_);
  if (!(lmin > 0.0)) {
    std::ostringstream os;
    os << "matrix is not positive definite: lambda_min = " << lmin;
    throw InputError(os.str());
  }
}

SpdMatrix SpdMatrix::from_symmetric(const Matrix& M) {
  Matrix S = symmetrize(M);
  Eigen::LLT<Matrix> llt(S);
  if (llt.info() != Eigen::Success || !S.allFinite()) {
    throw NumericalError("matrix expected positive definite failed Cholesky");
  }
  return SpdMatrix(std::move(S), Unchecked{});
}

SpdMatrix SpdMatrix::identity(Eigen::Index n) {
  return SpdMatrix(Matrix::Identity(n, n), Unchecked{});
}

SpdMatrix spd_sqrt(const SpdMatrix& M) {
  auto es = eig_sym(M, "spd_sqrt");
  require_positive(es.eigenvalues(), "spd_sqrt");
  return SpdMatrix::from_symmetric(
      apply_spectral(es, es.eigenvalues().array().sqrt().matrix()));
}

Matrix spd_log(const SpdMatrix& M) {
  auto es = eig_sym(M, "spd_log");
  require_positive(es.eigenvalues(), "spd_log");
  return apply_spectral(es, es.eigenvalues().array().log().matrix());
}

Matrix psd_sqrt(const Matrix& M) {
  auto es = eig_sym(M, "psd_sqrt");
  return apply_spectral(es,
                        es.eigenvalues().cwiseMax(0.0).array().sqrt().matrix());
}

double riemannian_distance(const SpdMatrix& Y, const SpdMatrix& Z) {
  if (Y.dim() != Z.dim()) {
    std::ostringstream os;
    os << "riemannian_distance: dimension mismatch " << Y.dim() << " vs "
       << Z.dim();
    throw InputError(os.str());
  }
  Eigen::LLT<Matrix> llt(Z.matrix());
  if (llt.info() != Eigen::Success) {
    throw NumericalError("riemannian_distance: Cholesky of Z failed");
  }
  // L^{-1} Y L^{-T}
  const Matrix LY = llt.matrixL().solve(Y.matrix());
  const Matrix LYt = LY.transpose();
  const Matrix W = symmetrize(llt.matrixL().solve(LYt));
  auto es = eig_sym(W, "riemannian_distance");
  require_positive(es.eigenvalues(), "riemannian_distance");
  return std::sqrt(es.eigenvalues().array().log().square().sum());
}

bool loewner_geq(const Matrix& A, const Matrix& B, const Tolerances& tol) {
  const double scale = std::max(sym_norm2(A), sym_norm2(B));
  return lambda_min(A - B) >= -tol.psd_tol * scale;
}

double spd_gap_bound(const SpdMatrix& Y, const SpdMatrix& Z,
                     const Tolerances& tol) {
  if (!loewner_geq(Y, Z, tol)) {
    std::ostringstream os;
    os << "spd_gap_bound: requires Y >= Z, lambda_min(Y - Z) = "
       << lambda_min(Y.matrix() - Z.matrix());
    throw PreconditionError(os.str());
  }
  return sym_norm2(Z) * std::expm1(riemannian_distance(Y, Z));
}

}  // namespace rhlqr
