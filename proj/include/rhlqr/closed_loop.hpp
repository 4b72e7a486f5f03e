#pragma once

// Receding-horizon policy execution on the lifted system, recovery of the
// base-domain inputs, and measurement of cost and performance loss.

#include <vector>

#include "rhlqr/certificate.hpp"
#include "rhlqr/riccati.hpp"

namespace rhlqr {

enum class PenaltyProvenance { kCandidate, kCustom };

/// Receding-horizon feedback over lifted steps [t0, t0 + size). In periodic
/// problems a policy spanning one lifted period is reused cyclically.
struct PolicyRealization {
  Index t0 = 0;
  int T = 1;
  bool periodic = false;
  PenaltyProvenance provenance = PenaltyProvenance::kCustom;
  std::vector<Matrix> gain;        // K_t, md x n; u~_t = -K_t x~_t
  std::vector<Matrix> correction;  // R~_t^{-1} Delta_t' Xi_t, md x n
  std::vector<Matrix> value;       // R_t(X^_{t+1}); W_1(t, x) = x' value x

  Index size() const { return static_cast<Index>(gain.size()); }
  bool covers(Index t) const;
  std::size_t slot(Index t) const;
};

/// Gains for t in [t0, t0 + penalties.size()), where penalties[i] is
/// X^_{t0 + i + 1}.
PolicyRealization rh_gains(const LiftedProblem& lp,
                           const std::vector<SpdMatrix>& penalties,
                           Index t0 = 0);

/// T-step receding-horizon policy with candidate terminal penalties, over one
/// lifted period (periodic) or every step the window allows.
PolicyRealization candidate_policy(const LiftedProblem& lp, int T);

/// Sup/inf of the policy's value matrices and decay quantities.
struct EnvelopeConstants {
  double omega_hi = 0;
  double omega_lo = 0;
  double lambda_lo = 0;
};
EnvelopeConstants envelope_constants(const LiftedProblem& lp,
                                     const PolicyRealization& pol);

struct SimulationOptions {
  double stop = 1e-10;       // stop once omega_hi |x|^2 <= stop * |xi|^2
  Index max_steps = 1'000'000;
  Index min_steps = 0;       // run at least this many steps
  Index divergence_steps = 200;  // consecutive |x| growth steps => failure
};

struct ClosedLoopReport {
  std::vector<Vector> x;       // x~_0 .. x~_N
  std::vector<Vector> u;       // u~_0 .. u~_{N-1}
  std::vector<double> stage;   // x~'Q~x~ + u~'R~u~
  std::vector<double> W;       // W_1(t, x~_t) for t = 0..N
  double cost = 0;             // sum of stage costs
  double tail_hi = 0;          // remaining cost lies in [0, tail_hi]
  double cost_lo() const { return cost; }
  double cost_hi() const { return cost + tail_hi; }
  bool converged = false;      // stopping rule met before max_steps

  EnvelopeConstants envelope;
  std::vector<double> decrease_margin;  // -(W_{t+1} - W_t) - stage_t
  std::vector<Index> decrease_violations;
  std::vector<Index> envelope_violations;
};

/// Runs x~_{t+1} = A~_t x~_t + B~_t u~_t, u~_t = -K_t x~_t from x~_0 = xi.
/// Throws VerificationError if |x~| grows for divergence_steps consecutive
/// steps.
ClosedLoopReport simulate(const LiftedProblem& lp, const PolicyRealization& pol,
                          const Vector& xi, const SimulationOptions& opt = {});

struct BaseTrajectory {
  std::vector<Vector> x;  // x_0 .. x_{dN}
  std::vector<Vector> u;  // u_0 .. u_{dN-1}
  double cost = 0;        // sum x'Qx + u'Ru over the simulated base steps
  double max_block_mismatch = 0;
};

/// Base inputs u_{[dt:d(t+1)-1]} = u~_t - correction_t x~_t propagated
/// through x_{k+1} = A_k x_k + B_k u_k. Throws VerificationError when
/// x_{d(t+1)} departs from x~_{t+1} by more than 1e-8 relative.
BaseTrajectory unlift_controls(const LiftedProblem& lp,
                               const PolicyRealization& pol,
                               const ClosedLoopReport& report);

struct Interval {
  double lo = 0, hi = 0;
  double mid() const { return 0.5 * (lo + hi); }
};

/// beta(xi) = J(xi) - xi' P_0 xi as an interval accounting for the tail of
/// the realized cost and the truncation error of P^_0.
Interval performance_loss(const ClosedLoopReport& report,
                          const RiccatiApprox& ra, const Vector& xi);

}  // namespace rhlqr
