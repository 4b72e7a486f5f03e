#include "rhlqr/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rhlqr/errors.hpp"
#include "rhlqr/riccati.hpp"

namespace rhlqr {
namespace {

// Number of lifted steps t over which the certificate sups/infs are taken.
Index certified_steps(const LiftedProblem& lp, int T) {
  if (lp.periodic()) return lp.count();
  const Index steps = lp.count() - T;
  if (steps < 1) {
    std::ostringstream os;
    os << "window of " << lp.count() << " lifted steps is too short for T = "
       << T;
    throw CertificationError(os.str());
  }
  return steps;
}

[[noreturn]] void fail(const std::string& what, Index t) {
  std::ostringstream os;
  os << "certification failure: " << what;
  if (t >= 0) os << " at lifted step " << t;
  throw CertificationError(os.str());
}

}  // namespace

SpdMatrix terminal_candidate(const LiftedProblem& lp, Index t) {
  const LiftedStep& s = lp.at(t);
  Eigen::LLT<Matrix> BBt(symmetrize(s.B * s.B.transpose()));
  if (BBt.info() != Eigen::Success) {
    std::ostringstream os;
    os << "terminal_candidate: B~B~' is singular at lifted step " << t;
    throw CertificationError(os.str());
  }
  // V = B~' (B~B~')^{-1} A~ maps the state to the input steering it to zero.
  const Matrix V = s.B.transpose() * BBt.solve(s.A);
  return SpdMatrix::from_symmetric(s.Q + V.transpose() * s.R * V);
}

std::vector<SpdMatrix> hatX_sequence(const LiftedProblem& lp, int T, Index s0,
                                     Index s1) {
  if (T < 1) throw InputError("hatX_sequence: T must be >= 1");
  if (s0 < 0 || s1 < s0) throw InputError("hatX_sequence: invalid window");
  std::vector<SpdMatrix> out;
  out.reserve(static_cast<std::size_t>(s1 - s0 + 1));
  for (Index s = s0; s <= s1; ++s) {
    SpdMatrix X = terminal_candidate(lp, s + T - 1);
    for (Index j = s + T - 2; j >= s; --j) X = riccati_apply(lp, j, X);
    out.push_back(std::move(X));
  }
  return out;
}

double delta_bar(const LiftedProblem& lp, int T) {
  const Index first = lp.periodic() ? 0 : std::max<Index>(T, 0);
  if (first >= lp.count()) {
    throw CertificationError("delta_bar: no terminal index inside the window");
  }
  double ratio = 0.0;
  for (Index s = first; s < lp.count(); ++s) {
    ratio = std::max(ratio, sym_norm2(terminal_candidate(lp, s)) /
                                lambda_min(lp.at(s).Q));
  }
  return std::sqrt(static_cast<double>(lp.n())) * std::log(ratio);
}

double beta_bound(const CertificateInputs& c, int T) {
  return (c.lambda_hi / c.lambda_lo) * (c.omega_hi / c.omega_lo) * c.omega_hi *
         std::expm1(std::pow(c.rho(), T - 1) * c.delta_bar);
}

Certificate build_certificate(const LiftedProblem& lp, int T) {
  if (T < 1) throw InputError("build_certificate: T must be >= 1");
  const Tolerances tol;
  const Index steps = certified_steps(lp, T);
  const auto hat = hatX_sequence(lp, T, 1, steps);  // hat[t] = X^_{t+1}

  Certificate cert;
  cert.d = lp.d();
  cert.T = T;
  cert.window_limited = !lp.periodic();
  cert.q_margin = lp.margins().q;
  CertificateInputs& c = cert.c;
  c.omega_lo = c.lambda_lo = INFINITY;

  std::vector<SpdMatrix> value;  // R_t(X^_{t+1})
  value.reserve(static_cast<std::size_t>(steps));
  for (Index t = 0; t < steps; ++t) {
    const Matrix& X1 = hat[static_cast<std::size_t>(t)];
    value.push_back(riccati_apply(lp, t, X1));
    const Matrix& W = value.back();
    c.omega_hi = std::max(c.omega_hi, sym_norm2(W));
    c.omega_lo = std::min(c.omega_lo, lambda_min(W));
    const Matrix K = riccati_gain(lp, t, X1);
    const LiftedStep& s = lp.at(t);
    c.lambda_lo = std::min(
        c.lambda_lo, lambda_min(s.Q + K.transpose() * s.R * K));
  }

  // X^_t >= R_t(X^_{t+1}) for t >= 1.
  for (Index t = 1; t < steps; ++t) {
    if (!loewner_geq(hat[static_cast<std::size_t>(t - 1)],
                     value[static_cast<std::size_t>(t)], tol)) {
      fail("stability condition X^_t >= R_t(X^_{t+1}) violated", t);
    }
  }
  if (lp.periodic() &&
      !loewner_geq(hat[static_cast<std::size_t>(steps - 1)], value[0], tol)) {
    fail("stability condition X^_t >= R_t(X^_{t+1}) violated", steps);
  }

  const Index cand_end = lp.count();
  for (Index t = 0; t < cand_end; ++t) {
    c.lambda_hi = std::max(c.lambda_hi, sym_norm2(terminal_candidate(lp, t)));
  }
  c.omega_lo = std::max(c.omega_lo, lp.margins().q);
  c.delta_bar = delta_bar(lp, T);
  const ContractionConstants cc = contraction_constants(lp);
  c.zeta_hi = cc.zeta_hi;
  c.eps_lo = cc.eps_lo;
  cert.rho_hi = c.rho();

  const double slack = 1e-9 * c.omega_hi;
  if (!(c.omega_lo > 0.0) || c.omega_lo > c.omega_hi + slack) {
    fail("omega bounds out of order", -1);
  }
  if (!(c.lambda_lo > 0.0) || c.lambda_lo > c.omega_hi + slack) {
    fail("lambda_lo not in (0, omega_hi]", -1);
  }
  if (!(cert.rho_hi < 1.0)) fail("contraction factor not below 1", -1);
  if (!std::isfinite(c.delta_bar) || c.delta_bar < 0.0) {
    fail("delta_bar not finite", -1);
  }
  cert.beta_bound = beta_bound(c, T);
  if (!(cert.beta_bound > 0.0) || !std::isfinite(cert.beta_bound)) {
    fail("performance-loss bound not positive and finite", -1);
  }
  cert.envelope_gain = c.omega_hi / c.omega_lo;
  cert.envelope_decay = std::max(0.0, 1.0 - c.lambda_lo / c.omega_hi);
  return cert;
}

Certificate build_certificate(const LiftedProblem& lp, int T,
                              const RiccatiApprox& ra) {
  Certificate cert = build_certificate(lp, T);
  const Tolerances tol;
  const Index steps = certified_steps(lp, T);
  const Index lo = std::max<Index>(1, ra.t0);
  const Index hi = std::min<Index>(steps, ra.t1);
  if (lo > hi) return cert;
  const auto hat = hatX_sequence(lp, T, lo, hi);
  for (Index s = lo; s <= hi; ++s) {
    const Matrix& X = hat[static_cast<std::size_t>(s - lo)];
    const Matrix& P = ra.at(s);
    const double scale = std::max(sym_norm2(X), sym_norm2(P));
    if (lambda_min(X - P) < -(ra.spectral_gap(s) + tol.psd_tol * scale)) {
      fail("domination X^_t >= P_t violated beyond truncation slack", s);
    }
  }
  return cert;
}

CertificateInputs surrogate_inputs(const LiftedProblem& lp) {
  CertificateInputs c;
  for (Index t = 0; t < lp.count(); ++t) {
    c.omega_hi = std::max(c.omega_hi, sym_norm2(terminal_candidate(lp, t)));
  }
  c.lambda_hi = c.omega_hi;
  c.omega_lo = c.lambda_lo = lp.margins().q;
  c.delta_bar = delta_bar(lp, 1);
  const ContractionConstants cc = contraction_constants(lp);
  c.zeta_hi = cc.zeta_hi;
  c.eps_lo = cc.eps_lo;
  return c;
}

int horizon_for_tolerance(const CertificateInputs& c, double beta_bar,
                          int T_max) {
  if (!(beta_bar > 0.0)) {
    throw InputError("horizon_for_tolerance: beta_bar must be > 0");
  }
  if (T_max < 1) throw InputError("horizon_for_tolerance: T_max must be >= 1");
  const double rho = c.rho();
  if (!(rho > 0.0 && rho < 1.0)) {
    throw CertificationError("horizon_for_tolerance: rho not in (0, 1)");
  }
  if (c.delta_bar <= 0.0) return 1;
  const double ratio = beta_bar * c.lambda_lo * c.omega_lo /
                       (c.omega_hi * c.lambda_hi * c.omega_hi);
  const double inner = std::log1p(ratio) / c.delta_bar;
  const double rhs = std::log(inner) / std::log(rho) + 1.0;
  if (!(rhs > 1.0)) return 1;
  if (rhs >= static_cast<double>(T_max)) return T_max;
  return static_cast<int>(std::ceil(rhs));
}

Synthesis synthesize(const LiftedProblem& lp, double beta_bar, int T_max) {
  Synthesis out;
  out.T_surrogate =
      horizon_for_tolerance(surrogate_inputs(lp), beta_bar, T_max);
  out.cert = build_certificate(lp, out.T_surrogate);
  const int T_exact = horizon_for_tolerance(out.cert.c, beta_bar, T_max);
  if (T_exact < out.T_surrogate) {
    Certificate tighter = build_certificate(lp, T_exact);
    if (tighter.beta_bound <= beta_bar) out.cert = tighter;
  }
  if (!(out.cert.beta_bound <= beta_bar)) {
    std::ostringstream os;
    os << "synthesize: tolerance " << beta_bar << " not certifiable with T <= "
       << T_max << " (bound " << out.cert.beta_bound << ")";
    throw CertificationError(os.str());
  }
  return out;
}

}  // namespace rhlqr
