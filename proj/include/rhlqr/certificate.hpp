#pragma once

// Terminal penalties, certificate constants, the performance-loss bound of
// the receding-horizon policy and horizon selection for a loss tolerance.

#include <vector>

#include "rhlqr/lifting.hpp"

namespace rhlqr {

struct RiccatiApprox;

/// Constants entering the performance-loss bound. Upper bounds may replace
/// the hi quantities and lower bounds the lo ones without losing validity.
struct CertificateInputs {
  double omega_hi = 0;   // sup_t ||R_t(X^_{t+1})||
  double omega_lo = 0;   // inf_t lambda_min(R_t(X^_{t+1}))
  double lambda_lo = 0;  // inf_t lambda_min(Q~_t + K_t' R~_t K_t)
  double lambda_hi = 0;  // upper bound on sup_t ||P_t||
  double delta_bar = 0;  // bound on delta(X_{t+T}, P_{t+T})
  double zeta_hi = 0;
  double eps_lo = 0;

  double rho() const { return zeta_hi / (zeta_hi + eps_lo); }
};

struct Certificate {
  int d = 0;
  int T = 0;
  CertificateInputs c;
  double rho_hi = 0;
  double beta_bound = 0;       // beta(xi) <= beta_bound |xi|^2
  double envelope_gain = 0;    // omega_hi / omega_lo
  double envelope_decay = 0;   // 1 - lambda_lo / omega_hi
  double q_margin = 0;
  bool window_limited = false;
};

/// X_t = Q~ + A~' (B~B~')^{-1} B~ R~ B~' (B~B~')^{-1} A~. Satisfies
/// R_t(X) <= X_t for every PSD X, in particular R_t(X_{t+1}) <= X_t.
SpdMatrix terminal_candidate(const LiftedProblem& lp, Index t);

/// X^_s = R_s o ... o R_{s+T-2}(X_{s+T-1}) for s in [s0, s1]; T = 1 returns
/// the candidates themselves.
std::vector<SpdMatrix> hatX_sequence(const LiftedProblem& lp, int T, Index s0,
                                     Index s1);

/// sqrt(n) * log(sup_s ||X_s|| / lambda_min(Q~_s)) over terminal indices
/// s = t + T (one period, or the window).
double delta_bar(const LiftedProblem& lp, int T);

/// (lambda_hi / lambda_lo) (omega_hi / omega_lo) omega_hi
///   * (exp(rho^{T-1} delta_bar) - 1).
double beta_bound(const CertificateInputs& c, int T);

/// Certificate for horizon T with the candidate terminal penalties. When ra
/// is given, additionally checks X^_t >= P^_t up to its truncation slack.
Certificate build_certificate(const LiftedProblem& lp, int T);
Certificate build_certificate(const LiftedProblem& lp, int T,
                              const RiccatiApprox& ra);

/// T-independent certified surrogates: omega_hi and lambda_hi by
/// sup_t ||X_t||, omega_lo and lambda_lo by inf_t lambda_min(Q~_t).
CertificateInputs surrogate_inputs(const LiftedProblem& lp);

/// Smallest T >= log(log(beta lambda_lo omega_lo /
///   (omega_hi lambda_hi omega_hi) + 1)^{1/delta_bar}) / log(rho) + 1,
/// clamped to [1, T_max].
int horizon_for_tolerance(const CertificateInputs& c, double beta_bar,
                          int T_max = 10000);

struct Synthesis {
  int T_surrogate = 0;
  Certificate cert;
};

/// Picks T from the surrogate constants, then retries once with the exact
/// constants at that T. Throws CertificationError if beta_bar cannot be met
/// within T_max.
Synthesis synthesize(const LiftedProblem& lp, double beta_bar,
                     int T_max = 10000);

}  // namespace rhlqr
