#pragma once

// Test-only oracles. None of these call into the code paths they check.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <random>

#include "rhlqr/errors.hpp"
#include "rhlqr/lifting.hpp"
#include "rhlqr/riccati.hpp"
#include "rhlqr/workbench.hpp"

namespace rhlqr::testing {

/// exp(M) by scaling and squaring with a degree-18 Taylor polynomial.
inline Matrix expm_taylor(const Matrix& M) {
  const double nrm = M.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  if (nrm > 0.5) s = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
  const Matrix A = M / std::ldexp(1.0, s);
  Matrix term = Matrix::Identity(M.rows(), M.cols());
  Matrix sum = term;
  for (int k = 1; k <= 18; ++k) {
    term = term * A / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

/// delta(Y, Z) from the (generally nonsymmetric) product Y Z^{-1}.
inline double distance_from_product(const Matrix& Y, const Matrix& Z) {
  const Matrix P = Y * Z.inverse();
  Eigen::EigenSolver<Matrix> es(P);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const std::complex<double> l = es.eigenvalues()(i);
    sum += std::pow(std::log(l.real()), 2);
  }
  return std::sqrt(sum);
}

/// ||log(Z^{-1/2} Y Z^{-1/2})||_F with Z^{-1/2} from an eigendecomposition.
inline double distance_from_congruence(const Matrix& Y, const Matrix& Z) {
  Eigen::SelfAdjointEigenSolver<Matrix> ez(Z);
  const Matrix Zm =
      ez.eigenvectors() *
      ez.eigenvalues().array().rsqrt().matrix().asDiagonal() *
      ez.eigenvectors().transpose();
  const Matrix C = 0.5 * (Zm * Y * Zm + (Zm * Y * Zm).transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> ec(C);
  return std::sqrt(ec.eigenvalues().array().log().square().sum());
}

/// Lifted data through an explicit dense inverse of A_hat.
struct DenseLift {
  Matrix A, B, Q, R;
};
inline DenseLift dense_lift(const ProblemData& pd, Index t, int d) {
  const LiftingBlocks lb = lifting_blocks(pd, t, d);
  const int n = pd.n(), m = pd.m();
  const Matrix Ainv = lb.A_hat.inverse();
  Matrix E0 = Matrix::Zero(n * (d + 1), n);
  E0.topRows(n).setIdentity();
  Matrix Elast = Matrix::Zero(n, n * (d + 1));
  Elast.rightCols(n).setIdentity();
  const Matrix Phi = Elast * Ainv * E0;
  const Matrix Gamma = Elast * Ainv * lb.B_hat;
  const Matrix Xi = lb.C_hat * Ainv * E0;
  const Matrix Delta = lb.C_hat * Ainv * lb.B_hat;
  Matrix Rd = Matrix::Zero(m * d, m * d);
  for (int i = 0; i < d; ++i) Rd.block(i * m, i * m, m, m) = pd.R(d * t + i);
  DenseLift out;
  out.R = Rd + Delta.transpose() * Delta;
  const Matrix Rinv = out.R.inverse();
  out.Q = Xi.transpose() * Xi - Xi.transpose() * Delta * Rinv *
                                    Delta.transpose() * Xi;
  out.A = Phi - Gamma * Rinv * Delta.transpose() * Xi;
  out.B = Gamma;
  return out;
}

/// Plain Riccati map with explicit inverses, for fixed-point oracles.
inline Matrix riccati_plain(const Matrix& A, const Matrix& B, const Matrix& Q,
                            const Matrix& R, const Matrix& P) {
  const Matrix M = (R + B.transpose() * P * B).inverse();
  const Matrix out =
      Q + A.transpose() * (P - P * B * M * B.transpose() * P) * A;
  return 0.5 * (out + out.transpose());
}

/// Fixed point of the time-invariant Riccati map by plain iteration from Q.
inline Matrix dare_iterate(const Matrix& A, const Matrix& B, const Matrix& Q,
                           const Matrix& R, int iters = 200000) {
  Matrix P = Q;
  for (int i = 0; i < iters; ++i) {
    const Matrix next = riccati_plain(A, B, Q, R, P);
    if ((next - P).norm() <= 1e-15 * next.norm()) return next;
    P = next;
  }
  return P;
}

inline ProblemData scalar_unit() {
  return generate_scenario({"scalar-unit", 1, 1, 1, 0});
}

inline ProblemData scalar_problem(double a, double b, double q, double r) {
  auto s = [](double v) { return Matrix::Constant(1, 1, v); };
  return ProblemData(1, 1, HorizonMode::periodic(1), {s(a)}, {s(b)}, {s(q)},
                     {s(r)});
}

struct DrawOptions {
  int n_max = 3;
  int m_max = 2;
  Index period_max = 3;
  int d = 0;             // 0: smallest admissible depth
  double rho_max = 0.98;  // keeps infinite-horizon tails short
};

struct Draw {
  ProblemData pd;
  LiftedProblem lp;
  std::uint64_t seed;
};

/// Random periodic problem, redrawn until it lifts at the requested depth
/// with contraction rate below rho_max. A has singular values in [0.3, 1.1].
inline Draw draw_problem(std::uint64_t seed, const DrawOptions& opt = {}) {
  for (std::uint64_t k = 0;; ++k) {
    std::mt19937_64 rng(seed * 7919 + k);
    std::uniform_int_distribution<int> un(1, opt.n_max), um(1, opt.m_max);
    std::uniform_int_distribution<Index> up(1, opt.period_max);
    std::uniform_real_distribution<double> sv(0.3, 1.1);
    std::normal_distribution<double> g(0.0, 1.0);
    const int n = un(rng), m = um(rng);
    const Index p = up(rng);
    std::vector<Matrix> A, B, Q, R;
    for (Index j = 0; j < p; ++j) {
      Vector s(n);
      for (int i = 0; i < n; ++i) s(i) = sv(rng);
      A.push_back(random_orthogonal(rng, n) * s.asDiagonal() *
                  random_orthogonal(rng, n));
      Matrix b(n, m);
      for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = g(rng);
      B.push_back(b);
      Q.push_back(random_spd(rng, n, 10.0, 1.0));
      R.push_back(random_spd(rng, m, 10.0, 1.0));
    }
    try {
      ProblemData pd(n, m, HorizonMode::periodic(p), A, B, Q, R);
      const int d = opt.d > 0 ? opt.d : choose_depth(pd, 4);
      LiftedProblem lp = lift(pd, d);
      if (contraction_constants(lp).rho_hi > opt.rho_max) continue;
      return {std::move(pd), std::move(lp), seed * 7919 + k};
    } catch (const Error&) {
    }
  }
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace rhlqr::testing
