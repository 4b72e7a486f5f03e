#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rhlqr/spd.hpp"
#include "rhlqr/tolerances.hpp"

namespace rhlqr {

using Index = std::int64_t;

enum class HorizonKind { kPeriodic, kWindow };

/// Periodic{period} repeats the stored data forever; Window{length} only
/// defines the stored base steps.
struct HorizonMode {
  HorizonKind kind = HorizonKind::kPeriodic;
  Index length = 1;  // period p or window length K, in base steps

  static HorizonMode periodic(Index p) { return {HorizonKind::kPeriodic, p}; }
  static HorizonMode window(Index k) { return {HorizonKind::kWindow, k}; }
  bool is_periodic() const { return kind == HorizonKind::kPeriodic; }
};

/// Sup norms of the stored data.
struct DataBounds {
  double a = 0, b = 0, q = 0, r = 0;
};

/// Time-varying base problem (A_k, B_k, Q_k, R_k). Construction validates
/// shapes, finiteness, Q_k PSD, R_k SPD and A_k invertible.
class ProblemData {
 public:
  ProblemData(int n, int m, HorizonMode mode, std::vector<Matrix> A,
              std::vector<Matrix> B, std::vector<Matrix> Q,
              std::vector<Matrix> R, const Tolerances& tol = {});

  int n() const noexcept { return n_; }
  int m() const noexcept { return m_; }
  const HorizonMode& mode() const noexcept { return mode_; }
  const DataBounds& bounds() const noexcept { return bounds_; }

  /// Number of stored base steps (period or window length).
  Index stored() const noexcept { return mode_.length; }

  /// Resolves k mod p (periodic) or checks 0 <= k < K (window).
  Index resolve(Index k) const;
  bool contains(Index k) const;

  const Matrix& A(Index k) const { return A_[resolve(k)]; }
  const Matrix& B(Index k) const { return B_[resolve(k)]; }
  const Matrix& Q(Index k) const { return Q_[resolve(k)]; }
  const Matrix& R(Index k) const { return R_[resolve(k)]; }
  /// C_k = Q_k^{1/2}, eigenvalues clamped at zero.
  const Matrix& C(Index k) const { return C_[resolve(k)]; }

  const std::vector<Matrix>& A_seq() const noexcept { return A_; }
  const std::vector<Matrix>& B_seq() const noexcept { return B_; }
  const std::vector<Matrix>& Q_seq() const noexcept { return Q_; }
  const std::vector<Matrix>& R_seq() const noexcept { return R_; }

  std::string name;
  std::string description;

 private:
  int n_, m_;
  HorizonMode mode_;
  std::vector<Matrix> A_, B_, Q_, R_, C_;
  DataBounds bounds_;
};

/// Theta_{k,d} = A_{k+d-1} ... A_k, with Theta_{k,0} = I.
Matrix state_transition(const ProblemData& pd, Index k, int d);

/// [Theta_{k+1,d-1} B_k, ..., Theta_{k+d,0} B_{k+d-1}], n x (m d).
Matrix controllability_matrix(const ProblemData& pd, Index k, int d);

/// [C_k Theta_{k,0}; ...; C_{k+d} Theta_{k,d}], n(d+1) x n.
Matrix observability_matrix(const ProblemData& pd, Index k, int d);

/// Numerical rank from singular values with threshold
/// max(rows, cols) * eps * sigma_max.
int numerical_rank(const Matrix& M);

/// Smallest d <= d_max for which every representable k has a full row rank
/// controllability matrix and a full column rank observability matrix.
/// Throws CertificationError (NoUniformD) when none exists.
int find_min_d(const ProblemData& pd, int d_max);

}  // namespace rhlqr
