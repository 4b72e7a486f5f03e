#pragma once

#include <vector>

#include "rhlqr/lifting.hpp"

namespace rhlqr {

/// R_t(P) = Q~ + A~'(P - P B~ (R~ + B~' P B~)^{-1} B~' P) A~ for PSD P.
/// Near-singular P (lambda_min < 1e-8 ||P||) goes through the factored form
/// P^{1/2} (I + P^{1/2} B~ R~^{-1} B~' P^{1/2})^{-1} P^{1/2}.
SpdMatrix riccati_apply(const LiftedProblem& lp, Index t, const Matrix& P);

/// R_t o R_{t+1} o ... o R_{t+T-1}(X).
SpdMatrix riccati_compose(const LiftedProblem& lp, Index t, const Matrix& X,
                          int T);

/// K = (R~ + B~' X B~)^{-1} B~' X A~, the one-step feedback gain (u = -K x).
Matrix riccati_gain(const LiftedProblem& lp, Index t, const Matrix& X);

struct ContractionConstants {
  std::vector<double> zeta;  // per lifted step over one period / window
  std::vector<double> eps;
  std::vector<double> rho;
  double zeta_hi = 0;  // sup zeta_t
  double eps_lo = 0;   // inf eps_t
  double rho_hi = 0;   // zeta_hi / (zeta_hi + eps_lo)
  bool window_limited = false;
};

/// Per-step Riemannian contraction factors rho_t = zeta_t / (zeta_t + eps_t)
/// of R_t, and their aggregates.
ContractionConstants contraction_constants(const LiftedProblem& lp);

/// Finite window of approximations to the bounded infinite-horizon solution
/// P_t, each within Riemannian distance trunc_err of the true value.
struct RiccatiApprox {
  Index t0 = 0, t1 = 0;
  std::vector<SpdMatrix> P;  // P[t - t0]
  double trunc_err = 0;
  double rho_hi = 0;
  double delta_bar = 0;
  Index tail = 0;  // steps of recursion beyond t1

  const SpdMatrix& at(Index t) const;
  /// ||P^_t|| (exp(trunc_err) - 1), an upper bound on ||P^_t - P_t||.
  double spectral_gap(Index t) const;
};

/// Backward recursion from the terminal candidate at t1 + N down to t0, with
/// N the smallest tail such that rho_hi^N * delta_bar <= tol_delta.
/// Since the candidate dominates P_t, every P^_t >= P_t.
RiccatiApprox solve_infinite_horizon(const LiftedProblem& lp, Index t0,
                                     Index t1, double tol_delta);

}  // namespace rhlqr
