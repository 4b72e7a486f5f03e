#include "rhlqr/lifting.hpp"

#include <numeric>
#include <sstream>

#include "rhlqr/errors.hpp"

namespace rhlqr {
namespace {

// Solves A_hat Z = V for unit lower block bidiagonal A_hat with n x n blocks.
Matrix block_forward_substitute(const Matrix& A_hat, const Matrix& V, int n,
                                int blocks) {
  Matrix Z(V.rows(), V.cols());
  Z.topRows(n) = V.topRows(n);
  for (int i = 0; i + 1 < blocks; ++i) {
    Z.middleRows((i + 1) * n, n) =
        V.middleRows((i + 1) * n, n) -
        A_hat.block((i + 1) * n, i * n, n, n) * Z.middleRows(i * n, n);
  }
  return Z;
}

}  // namespace

bool LiftedProblem::contains(Index t) const {
  return t >= 0 && (periodic_ || t < count());
}

Index LiftedProblem::resolve(Index t) const {
  if (!contains(t)) {
    std::ostringstream os;
    os << "lifted index " << t << " outside the lifted window [0, " << count()
       << ")";
    throw InputError(os.str());
  }
  return periodic_ ? t % count() : t;
}

LiftingBlocks lifting_blocks(const ProblemData& pd, Index t, int d) {
  if (d < 1) throw InputError("lifting depth must be >= 1");
  const int n = pd.n(), m = pd.m();
  const Index k0 = static_cast<Index>(d) * t;
  const int N = n * (d + 1);

  LiftingBlocks lb;
  lb.A_hat = Matrix::Identity(N, N);
  lb.B_hat = Matrix::Zero(N, m * d);
  lb.C_hat = Matrix::Zero(n * d, N);
  for (int i = 0; i < d; ++i) {
    lb.A_hat.block((i + 1) * n, i * n, n, n) = -pd.A(k0 + i);
    lb.B_hat.block((i + 1) * n, i * m, n, m) = pd.B(k0 + i);
    lb.C_hat.block(i * n, i * n, n, n) = pd.C(k0 + i);
  }

  Matrix E0 = Matrix::Zero(N, n);
  E0.topRows(n).setIdentity();
  const Matrix Z_state = block_forward_substitute(lb.A_hat, E0, n, d + 1);
  const Matrix Z_input = block_forward_substitute(lb.A_hat, lb.B_hat, n, d + 1);

  lb.Phi = Z_state.bottomRows(n);
  lb.Gamma = Z_input.bottomRows(n);
  lb.Xi = lb.C_hat * Z_state;
  lb.Delta = lb.C_hat * Z_input;
  return lb;
}

LiftedProblem lift(const ProblemData& pd, int d, const Tolerances& tol) {
  if (d < 1) throw InputError("lifting depth must be >= 1");
  LiftedProblem lp(pd);
  lp.n_ = pd.n();
  lp.m_ = pd.m();
  lp.d_ = d;
  lp.periodic_ = pd.mode().is_periodic();

  Index count = 0;
  if (lp.periodic_) {
    count = std::lcm(pd.stored(), static_cast<Index>(d)) / d;
  } else {
    count = pd.stored() / d;
    if (count == 0) {
      std::ostringstream os;
      os << "window of " << pd.stored() << " base steps is shorter than d = "
         << d;
      throw InputError(os.str());
    }
    if (pd.stored() % d != 0) {
      std::ostringstream os;
      os << "window length " << pd.stored() << " is not a multiple of d = "
         << d << "; trailing " << pd.stored() % d
         << " base step(s) discarded";
      lp.warnings_.push_back(os.str());
    }
  }

  const int n = pd.n(), m = pd.m();
  lp.margins_.q = lp.margins_.b = lp.margins_.a = INFINITY;
  for (Index t = 0; t < count; ++t) {
    LiftingBlocks lb = lifting_blocks(pd, t, d);
    Matrix R_diag = Matrix::Zero(m * d, m * d);
    for (int i = 0; i < d; ++i) {
      R_diag.block(i * m, i * m, m, m) = pd.R(d * t + i);
    }

    LiftedStep st;
    st.R = symmetrize(R_diag + lb.Delta.transpose() * lb.Delta);
    Eigen::LLT<Matrix> R_llt(st.R);
    if (R_llt.info() != Eigen::Success) {
      throw NumericalError("lift: Cholesky of the lifted input weight failed");
    }
    // R~^{-1} Delta' Xi
    st.correction = R_llt.solve(lb.Delta.transpose() * lb.Xi);
    st.Q = symmetrize(lb.Xi.transpose() * lb.Xi -
                      lb.Xi.transpose() * lb.Delta * st.correction);
    st.A = lb.Phi - lb.Gamma * st.correction;
    st.B = lb.Gamma;

    const double q = lambda_min(st.Q);
    const double b = n > 0 ? lambda_min(st.B * st.B.transpose()) : 0.0;
    const double a = lambda_min(st.A * st.A.transpose());
    lp.margins_.q = std::min(lp.margins_.q, q);
    lp.margins_.b = std::min(lp.margins_.b, b);
    lp.margins_.a = std::min(lp.margins_.a, a);
    if (!(q > tol.margin_tol) || !(b > tol.margin_tol) ||
        !(a > tol.margin_tol)) {
      std::ostringstream os;
      os << "MarginViolation at lifted step " << t << " with d = " << d
         << ": lambda_min(Q~) = " << q << ", lambda_min(B~B~') = " << b
         << ", lambda_min(A~A~') = " << a;
      throw CertificationError(os.str());
    }
    lp.steps_.push_back(std::move(st));
    lp.blocks_.push_back(std::move(lb));
  }
  return lp;
}

int choose_depth(const ProblemData& pd, int d_max, const Tolerances& tol) {
  const int d_min = find_min_d(pd, d_max);
  std::string last;
  for (int d = d_min; d <= d_max; ++d) {
    try {
      lift(pd, d, tol);
      return d;
    } catch (const CertificationError& e) {
      last = e.what();
    }
  }
  throw CertificationError("choose_depth: no d <= " + std::to_string(d_max) +
                           " yields positive lifted margins (" + last + ")");
}

}  // namespace rhlqr
