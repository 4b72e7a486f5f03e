#pragma once

// Dense finite-horizon LQ solver over stacked inputs. It only reads the
// lifted data and never touches the Riccati code path, so it can validate
// value functions and receding-horizon gains.

#include "rhlqr/lifting.hpp"

namespace rhlqr {

/// L_T(t, chi, w, X) = w' H w + 2 g' w + c with stacked
/// w = (w_t, ..., w_{t+T-1}).
struct StackedLQ {
  Index t = 0;
  int T = 0;
  Vector chi;
  Matrix Sx;  // stacked states z_t..z_{t+T} = Sx chi + Su w
  Matrix Su;
  Matrix H;
  Vector g;
  double c = 0;

  double evaluate(const Vector& w) const;
};

struct StackedSolution {
  Vector w;
  double value = 0;
};

/// Throws InputError if T * md exceeds stack_max.
StackedLQ build_stacked(const LiftedProblem& lp, Index t, int T,
                        const Vector& chi, const Matrix& X,
                        Index stack_max = 2000);

/// w* = -H^{-1} g by Cholesky with one step of iterative refinement.
StackedSolution solve_stacked(const StackedLQ& sq);

}  // namespace rhlqr
