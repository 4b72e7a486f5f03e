#pragma once

// Functions on symmetric positive-definite matrices: square root, logarithm,
// the affine-invariant Riemannian distance and the norm-gap bound derived
// from it. All eigendecompositions go through the self-adjoint solver after
// exact symmetrization.

#include <Eigen/Dense>

#include "rhlqr/tolerances.hpp"

namespace rhlqr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Returns (M + M') / 2.
Matrix symmetrize(const Matrix& M);

/// Largest singular value.
double norm2(const Matrix& M);

/// Extreme eigenvalues of a symmetric matrix (symmetrized first).
double lambda_min(const Matrix& M);
double lambda_max(const Matrix& M);

/// Spectral norm of a symmetric matrix, max |lambda_i|.
double sym_norm2(const Matrix& M);

/// A symmetric positive-definite matrix. The stored matrix is exactly
/// symmetric and its smallest eigenvalue was positive at construction.
class SpdMatrix {
 public:
  /// Validates symmetry (relative to sym_tol) and positive definiteness.
  /// Throws InputError on failure.
  explicit SpdMatrix(const Matrix& M, const Tolerances& tol = {});

  /// Symmetrizes without a symmetry check, then checks definiteness with a
  /// Cholesky factorization. Intended for matrices that are symmetric by
  /// construction up to rounding. Throws NumericalError if not definite.
  static SpdMatrix from_symmetric(const Matrix& M);

  static SpdMatrix identity(Eigen::Index n);

  const Matrix& matrix() const noexcept { return m_; }
  operator const Matrix&() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }

 private:
  struct Unchecked {};
  SpdMatrix(Matrix M, Unchecked) : m_(std::move(M)) {}

  Matrix m_;
};

/// Principal square root S with S*S = M.
SpdMatrix spd_sqrt(const SpdMatrix& M);

/// Principal logarithm; the result is exactly symmetric.
Matrix spd_log(const SpdMatrix& M);

/// Square root of a symmetric PSD matrix with eigenvalues clamped at zero.
Matrix psd_sqrt(const Matrix& M);

/// delta(Y, Z) = sqrt(sum log^2 lambda_i) over the eigenvalues of Y Z^{-1}.
/// The eigenvalues are taken from the congruence L^{-1} Y L^{-T} where
/// Z = L L' is the Cholesky factorization of Z.
double riemannian_distance(const SpdMatrix& Y, const SpdMatrix& Z);

/// ||Z||_2 (exp(delta(Y, Z)) - 1), an upper bound on ||Y - Z||_2 when Y >= Z.
/// Throws PreconditionError if Y - Z is not PSD (within psd_tol).
double spd_gap_bound(const SpdMatrix& Y, const SpdMatrix& Z,
                     const Tolerances& tol = {});

/// True when A - B is PSD up to psd_tol * max(||A||, ||B||).
bool loewner_geq(const Matrix& A, const Matrix& B, const Tolerances& tol = {});

}  // namespace rhlqr
