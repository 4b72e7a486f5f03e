#pragma once

// d-step lifting of a time-varying LQR problem. Lifted step t covers base
// steps dt, ..., dt + d - 1; the lifted problem is one-step controllable and
// observable when d satisfies the uniform rank conditions.

#include <string>
#include <vector>

#include "rhlqr/problem.hpp"

namespace rhlqr {

/// Block matrices behind one lifted step.
struct LiftingBlocks {
  Matrix A_hat;  // n(d+1) x n(d+1), unit lower block triangular
  Matrix B_hat;  // n(d+1) x md
  Matrix C_hat;  // nd x n(d+1)
  Matrix Phi;    // n x n, equals Theta_{dt,d}
  Matrix Gamma;  // n x md
  Matrix Xi;     // nd x n
  Matrix Delta;  // nd x md, strictly lower block triangular
};

/// Data of one lifted step.
struct LiftedStep {
  Matrix A;           // n x n
  Matrix B;           // n x md
  Matrix Q;           // n x n, SPD
  Matrix R;           // md x md, SPD
  Matrix correction;  // md x n, R^{-1} Delta' Xi; base input = u~ - corr * x
};

struct LiftedMargins {
  double q = 0;  // inf_t lambda_min(Q~_t)
  double b = 0;  // inf_t lambda_min(B~_t B~_t')
  double a = 0;  // inf_t lambda_min(A~_t A~_t')
};

class LiftedProblem {
 public:
  int n() const noexcept { return n_; }
  int m() const noexcept { return m_; }
  int d() const noexcept { return d_; }
  /// Lifted input dimension m * d.
  int md() const noexcept { return m_ * d_; }
  bool periodic() const noexcept { return periodic_; }
  /// Lifted period P (periodic) or number of complete lifted blocks (window).
  Index count() const noexcept { return static_cast<Index>(steps_.size()); }

  bool contains(Index t) const;
  Index resolve(Index t) const;
  const LiftedStep& at(Index t) const { return steps_[resolve(t)]; }
  const LiftingBlocks& blocks(Index t) const { return blocks_[resolve(t)]; }

  const LiftedMargins& margins() const noexcept { return margins_; }
  const ProblemData& base() const noexcept { return base_; }
  const std::vector<std::string>& warnings() const noexcept {
    return warnings_;
  }

 private:
  friend LiftedProblem lift(const ProblemData&, int, const Tolerances&);
  explicit LiftedProblem(const ProblemData& base) : base_(base) {}

  int n_ = 0, m_ = 0, d_ = 0;
  bool periodic_ = true;
  std::vector<LiftedStep> steps_;
  std::vector<LiftingBlocks> blocks_;
  LiftedMargins margins_;
  ProblemData base_;
  std::vector<std::string> warnings_;
};

/// Builds the block matrices of lifted step t (base steps dt..dt+d-1).
/// Phi/Gamma/Xi/Delta come from block forward substitution on A_hat.
LiftingBlocks lifting_blocks(const ProblemData& pd, Index t, int d);

/// Lifts pd with depth d. Periodic data with period p yields lifted period
/// lcm(p, d) / d. Window data keeps floor(K / d) complete blocks.
/// Throws CertificationError (MarginViolation) if any margin <= margin_tol.
LiftedProblem lift(const ProblemData& pd, int d, const Tolerances& tol = {});

/// Smallest d in [find_min_d, d_max] for which lift() succeeds.
int choose_depth(const ProblemData& pd, int d_max, const Tolerances& tol = {});

}  // namespace rhlqr
