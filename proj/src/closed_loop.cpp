#include "rhlqr/closed_loop.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <sstream>

#include "rhlqr/errors.hpp"

namespace rhlqr {

bool PolicyRealization::covers(Index t) const {
  if (t < t0 || size() == 0) return false;
  return periodic || t < t0 + size();
}

std::size_t PolicyRealization::slot(Index t) const {
  if (!covers(t)) {
    std::ostringstream os;
    os << "policy does not cover lifted step " << t;
    throw InputError(os.str());
  }
  return static_cast<std::size_t>((t - t0) % size());
}

PolicyRealization rh_gains(const LiftedProblem& lp,
                           const std::vector<SpdMatrix>& penalties, Index t0) {
  PolicyRealization pol;
  pol.t0 = t0;
  for (std::size_t i = 0; i < penalties.size(); ++i) {
    const Index t = t0 + static_cast<Index>(i);
    const Matrix& X1 = penalties[i];
    if (X1.rows() != lp.n() || X1.cols() != lp.n()) {
      throw InputError("rh_gains: penalty dimension mismatch");
    }
    Matrix K = riccati_gain(lp, t, X1);
    if (!K.allFinite()) {
      std::ostringstream os;
      os << "rh_gains: non-finite gain at lifted step " << t;
      throw NumericalError(os.str());
    }
    pol.gain.push_back(std::move(K));
    pol.correction.push_back(lp.at(t).correction);
    pol.value.push_back(riccati_apply(lp, t, X1));
  }
  return pol;
}

PolicyRealization candidate_policy(const LiftedProblem& lp, int T) {
  const Index steps = lp.periodic() ? lp.count() : lp.count() - T;
  if (steps < 1) {
    throw CertificationError("candidate_policy: window too short for T = " +
                             std::to_string(T));
  }
  PolicyRealization pol = rh_gains(lp, hatX_sequence(lp, T, 1, steps), 0);
  pol.T = T;
  pol.periodic = lp.periodic();
  pol.provenance = PenaltyProvenance::kCandidate;
  return pol;
}

EnvelopeConstants envelope_constants(const LiftedProblem& lp,
                                     const PolicyRealization& pol) {
  EnvelopeConstants ec;
  ec.omega_lo = ec.lambda_lo = INFINITY;
  for (Index i = 0; i < pol.size(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    const LiftedStep& s = lp.at(pol.t0 + i);
    ec.omega_hi = std::max(ec.omega_hi, sym_norm2(pol.value[k]));
    ec.omega_lo = std::min(ec.omega_lo, lambda_min(pol.value[k]));
    ec.lambda_lo = std::min(
        ec.lambda_lo,
        lambda_min(s.Q + pol.gain[k].transpose() * s.R * pol.gain[k]));
  }
  ec.omega_lo = std::max(ec.omega_lo, lp.margins().q);
  return ec;
}

ClosedLoopReport simulate(const LiftedProblem& lp, const PolicyRealization& pol,
                          const Vector& xi, const SimulationOptions& opt) {
  if (xi.size() != lp.n()) {
    std::ostringstream os;
    os << "initial state has length " << xi.size() << ", expected " << lp.n();
    throw InputError(os.str());
  }
  if (!xi.allFinite()) throw InputError("initial state is not finite");
  if (!pol.covers(pol.t0)) throw InputError("simulate: empty policy");

  ClosedLoopReport rep;
  rep.envelope = envelope_constants(lp, pol);
  const EnvelopeConstants& ec = rep.envelope;
  const double xi2 = xi.squaredNorm();
  const double gain = ec.omega_hi / ec.omega_lo;
  const double decay = std::max(0.0, 1.0 - ec.lambda_lo / ec.omega_hi);
  const double floor = 1e8 * DBL_MIN;

  auto W_at = [&](Index t, const Vector& x) {
    return x.dot(pol.value[pol.slot(t)] * x);
  };

  Vector x = xi;
  rep.x.push_back(x);
  rep.W.push_back(W_at(pol.t0, x));
  Index growth = 0;
  double envelope_scale = gain * xi2;
  for (Index step = 0;; ++step) {
    const Index t = pol.t0 + step;
    if (step >= opt.min_steps &&
        ec.omega_hi * x.squaredNorm() <= opt.stop * xi2) {
      rep.converged = true;
      break;
    }
    if (step >= opt.max_steps || !pol.covers(t + 1)) break;

    const LiftedStep& s = lp.at(t);
    const Vector u = -pol.gain[pol.slot(t)] * x;
    const double stage = x.dot(s.Q * x) + u.dot(s.R * u);
    Vector next = s.A * x + s.B * u;
    if (!next.allFinite()) {
      throw VerificationError("simulate: state became non-finite at step " +
                              std::to_string(t + 1));
    }
    growth = next.norm() > x.norm() ? growth + 1 : 0;
    if (growth >= opt.divergence_steps) {
      throw VerificationError(
          "simulate: closed-loop state grew for " + std::to_string(growth) +
          " consecutive steps (stability certificate violated)");
    }

    const double W_next = W_at(t + 1, next);
    const double W_now = rep.W.back();
    const double margin = -(W_next - W_now) - stage;
    rep.decrease_margin.push_back(margin);
    if (margin < -(1e-8 * (W_now + W_next + stage) + floor)) {
      rep.decrease_violations.push_back(t);
    }

    envelope_scale *= decay;
    if (next.squaredNorm() > envelope_scale * (1.0 + 1e-6) + floor) {
      rep.envelope_violations.push_back(t + 1);
    }

    rep.cost += stage;
    rep.u.push_back(u);
    rep.stage.push_back(stage);
    rep.x.push_back(next);
    rep.W.push_back(W_next);
    x = std::move(next);
  }
  rep.tail_hi = ec.omega_hi * x.squaredNorm();
  return rep;
}

BaseTrajectory unlift_controls(const LiftedProblem& lp,
                               const PolicyRealization& pol,
                               const ClosedLoopReport& report) {
  const ProblemData& pd = lp.base();
  const int d = lp.d(), m = lp.m();
  BaseTrajectory bt;
  if (report.x.empty()) return bt;
  const double scale = std::max(report.x.front().norm(), DBL_MIN);

  Vector x = report.x.front();
  bt.x.push_back(x);
  for (std::size_t j = 0; j < report.u.size(); ++j) {
    const Index t = pol.t0 + static_cast<Index>(j);
    const std::size_t k = pol.slot(t);
    // mu(t, x_{dt}) - R~^{-1} Delta' Xi x_{dt}
    const Vector block = -(pol.gain[k] + pol.correction[k]) * x;
    for (int i = 0; i < d; ++i) {
      const Index base = static_cast<Index>(d) * t + i;
      const Vector u = block.segment(i * m, m);
      bt.cost += x.dot(pd.Q(base) * x) + u.dot(pd.R(base) * u);
      x = pd.A(base) * x + pd.B(base) * u;
      bt.u.push_back(u);
      bt.x.push_back(x);
    }
    const double mismatch = (x - report.x[j + 1]).norm() / scale;
    bt.max_block_mismatch = std::max(bt.max_block_mismatch, mismatch);
    if (mismatch > 1e-8) {
      std::ostringstream os;
      os << "unlift_controls: base state departs from the lifted state at "
            "lifted step "
         << t + 1 << " (relative mismatch " << mismatch << ")";
      throw VerificationError(os.str());
    }
  }
  return bt;
}

Interval performance_loss(const ClosedLoopReport& report,
                          const RiccatiApprox& ra, const Vector& xi) {
  const double opt = xi.dot(ra.at(0).matrix() * xi);
  const double p_gap = ra.spectral_gap(0) * xi.squaredNorm();
  // P^ dominates P, so the optimal cost lies in [opt - p_gap, opt].
  return {report.cost_lo() - opt, report.cost_hi() - opt + p_gap};
}

}  // namespace rhlqr
