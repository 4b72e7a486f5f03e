#include "rhlqr/oracle.hpp"

#include <sstream>

#include "rhlqr/errors.hpp"

namespace rhlqr {

double StackedLQ::evaluate(const Vector& w) const {
  return w.dot(H * w) + 2.0 * g.dot(w) + c;
}

StackedLQ build_stacked(const LiftedProblem& lp, Index t, int T,
                        const Vector& chi, const Matrix& X, Index stack_max) {
  if (T < 1) throw InputError("build_stacked: T must be >= 1");
  const int n = lp.n(), p = lp.md();
  if (static_cast<Index>(T) * p > stack_max) {
    std::ostringstream os;
    os << "build_stacked: " << T * p << " stacked inputs exceed the cap of "
       << stack_max;
    throw InputError(os.str());
  }
  if (chi.size() != n || X.rows() != n || X.cols() != n) {
    throw InputError("build_stacked: dimension mismatch");
  }

  StackedLQ sq;
  sq.t = t;
  sq.T = T;
  sq.chi = chi;
  const int N = n * (T + 1);
  sq.Sx = Matrix::Zero(N, n);
  sq.Su = Matrix::Zero(N, p * T);
  Matrix Qbig = Matrix::Zero(N, N);
  Matrix Rbig = Matrix::Zero(p * T, p * T);

  sq.Sx.topRows(n).setIdentity();
  for (int j = 0; j < T; ++j) {
    const LiftedStep& s = lp.at(t + j);
    // z_{j+1} = A_j z_j + B_j w_j
    sq.Sx.middleRows((j + 1) * n, n) = s.A * sq.Sx.middleRows(j * n, n);
    sq.Su.middleRows((j + 1) * n, n) = s.A * sq.Su.middleRows(j * n, n);
    sq.Su.block((j + 1) * n, j * p, n, p) += s.B;
    Qbig.block(j * n, j * n, n, n) = s.Q;
    Rbig.block(j * p, j * p, p, p) = s.R;
  }
  Qbig.block(T * n, T * n, n, n) = symmetrize(X);

  sq.H = symmetrize(sq.Su.transpose() * Qbig * sq.Su + Rbig);
  const Vector zfree = sq.Sx * chi;
  sq.g = sq.Su.transpose() * (Qbig * zfree);
  sq.c = zfree.dot(Qbig * zfree);
  return sq;
}

StackedSolution solve_stacked(const StackedLQ& sq) {
  Eigen::LLT<Matrix> llt(sq.H);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("solve_stacked: Hessian is not positive definite");
  }
  StackedSolution sol;
  sol.w = -llt.solve(sq.g);
  const Vector residual = -sq.g - sq.H * sol.w;
  sol.w += llt.solve(residual);
  sol.value = sq.evaluate(sol.w);
  return sol;
}

}  // namespace rhlqr
