#include "rhlqr/riccati.hpp"

#include <cmath>
#include <sstream>

#include "rhlqr/certificate.hpp"
#include "rhlqr/errors.hpp"

namespace rhlqr {
namespace {

constexpr double kFactoredSwitch = 1e-8;
constexpr Index kMaxTail = 2'000'000;

Eigen::LLT<Matrix> checked_llt(const Matrix& M, const char* where) {
  Eigen::LLT<Matrix> llt(symmetrize(M));
  if (llt.info() != Eigen::Success) {
    throw NumericalError(std::string(where) + ": Cholesky factorization failed");
  }
  return llt;
}

}  // namespace

SpdMatrix riccati_apply(const LiftedProblem& lp, Index t, const Matrix& P) {
  const LiftedStep& s = lp.at(t);
  const int n = lp.n();
  if (P.rows() != n || P.cols() != n) {
    std::ostringstream os;
    os << "riccati_apply: P is " << P.rows() << "x" << P.cols()
       << ", expected " << n << "x" << n;
    throw InputError(os.str());
  }
  const Matrix Ps = symmetrize(P);
  const double pnorm = sym_norm2(Ps);
  if (pnorm == 0.0) return SpdMatrix::from_symmetric(s.Q);

  Matrix D;
  if (lambda_min(Ps) < kFactoredSwitch * pnorm) {
    const Matrix S = psd_sqrt(Ps);
    const Matrix SB = S * s.B;
    const auto R_llt = checked_llt(s.R, "riccati_apply");
    Matrix M = Matrix::Identity(n, n) + SB * R_llt.solve(SB.transpose());
    const auto M_llt = checked_llt(M, "riccati_apply");
    D = S * M_llt.solve(S);
  } else {
    const Matrix PB = Ps * s.B;
    const auto M_llt =
        checked_llt(s.R + s.B.transpose() * PB, "riccati_apply");
    D = Ps - PB * M_llt.solve(PB.transpose());
  }
  return SpdMatrix::from_symmetric(s.Q + s.A.transpose() * symmetrize(D) * s.A);
}

SpdMatrix riccati_compose(const LiftedProblem& lp, Index t, const Matrix& X,
                          int T) {
  if (T < 1) throw InputError("riccati_compose: T must be >= 1");
  SpdMatrix P = riccati_apply(lp, t + T - 1, X);
  for (Index j = t + T - 2; j >= t; --j) P = riccati_apply(lp, j, P);
  return P;
}

Matrix riccati_gain(const LiftedProblem& lp, Index t, const Matrix& X) {
  const LiftedStep& s = lp.at(t);
  const Matrix XB = symmetrize(X) * s.B;
  const auto M_llt = checked_llt(s.R + s.B.transpose() * XB, "riccati_gain");
  return M_llt.solve(XB.transpose() * s.A);
}

ContractionConstants contraction_constants(const LiftedProblem& lp) {
  ContractionConstants cc;
  cc.window_limited = !lp.periodic();
  cc.zeta_hi = 0.0;
  cc.eps_lo = INFINITY;
  for (Index t = 0; t < lp.count(); ++t) {
    const LiftedStep& s = lp.at(t);
    Eigen::PartialPivLU<Matrix> A_lu(s.A);
    const Matrix F = A_lu.solve(s.B);  // A~^{-1} B~
    const auto R_llt = checked_llt(s.R, "contraction_constants");
    const Matrix QF = s.Q * F;
    const double zeta =
        1.0 / lambda_min(s.Q + QF * R_llt.solve(QF.transpose()));
    const auto M_llt = checked_llt(s.R + F.transpose() * QF,
                                   "contraction_constants");
    const double eps = lambda_min(symmetrize(F * M_llt.solve(F.transpose())));
    if (!(zeta > 0.0) || !std::isfinite(zeta) || !(eps > 0.0)) {
      std::ostringstream os;
      os << "contraction constants degenerate at lifted step " << t
         << ": zeta = " << zeta << ", eps = " << eps;
      throw CertificationError(os.str());
    }
    cc.zeta.push_back(zeta);
    cc.eps.push_back(eps);
    cc.rho.push_back(zeta / (zeta + eps));
    cc.zeta_hi = std::max(cc.zeta_hi, zeta);
    cc.eps_lo = std::min(cc.eps_lo, eps);
  }
  cc.rho_hi = cc.zeta_hi / (cc.zeta_hi + cc.eps_lo);
  return cc;
}

const SpdMatrix& RiccatiApprox::at(Index t) const {
  if (t < t0 || t > t1) {
    std::ostringstream os;
    os << "RiccatiApprox: index " << t << " outside [" << t0 << ", " << t1
       << "]";
    throw InputError(os.str());
  }
  return P[static_cast<std::size_t>(t - t0)];
}

double RiccatiApprox::spectral_gap(Index t) const {
  return sym_norm2(at(t)) * std::expm1(trunc_err);
}

RiccatiApprox solve_infinite_horizon(const LiftedProblem& lp, Index t0,
                                     Index t1, double tol_delta) {
  if (!(tol_delta > 0.0)) {
    throw InputError("solve_infinite_horizon: tol_delta must be > 0");
  }
  if (t0 < 0 || t1 < t0) {
    throw InputError("solve_infinite_horizon: invalid window");
  }
  const ContractionConstants cc = contraction_constants(lp);
  if (!(cc.rho_hi < 1.0)) {
    throw CertificationError(
        "solve_infinite_horizon: contraction factor is not below 1");
  }
  RiccatiApprox ra;
  ra.t0 = t0;
  ra.t1 = t1;
  ra.rho_hi = cc.rho_hi;
  ra.delta_bar = delta_bar(lp, 1);

  Index N = 0;
  if (ra.delta_bar > tol_delta) {
    N = static_cast<Index>(
        std::ceil(std::log(tol_delta / ra.delta_bar) / std::log(cc.rho_hi)));
  }
  if (N > kMaxTail) {
    std::ostringstream os;
    os << "solve_infinite_horizon: tail of " << N
       << " steps needed (rho = " << cc.rho_hi << ")";
    throw CertificationError(os.str());
  }
  if (!lp.contains(t1 + N)) {
    std::ostringstream os;
    os << "solve_infinite_horizon: window-limited data ends before the "
          "required tail index "
       << t1 + N;
    throw CertificationError(os.str());
  }
  ra.tail = N;
  ra.trunc_err = std::pow(cc.rho_hi, static_cast<double>(N)) * ra.delta_bar;

  const Index last = t1 + N;
  SpdMatrix X = terminal_candidate(lp, last);
  // X currently plays the role of P^_{last}; recurse down to t0.
  std::vector<SpdMatrix> window;
  window.reserve(static_cast<std::size_t>(t1 - t0 + 1));
  for (Index t = last; t >= t0; --t) {
    if (t < last) X = riccati_apply(lp, t, X);
    if (t <= t1) window.push_back(X);
  }
  ra.P.assign(window.rbegin(), window.rend());
  return ra;
}

}  // namespace rhlqr
