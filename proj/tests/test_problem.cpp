#include <random>

#include "doctest.h"
#include "rhlqr/errors.hpp"
#include "rhlqr/problem.hpp"
#include "support.hpp"

using namespace rhlqr;
using namespace rhlqr::testing;

namespace {

Matrix gaussian(std::mt19937_64& rng, int r, int c) {
  std::normal_distribution<double> g;
  Matrix M(r, c);
  for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = g(rng);
  return M;
}

ProblemData random_periodic(std::mt19937_64& rng, int n, int m, Index p) {
  std::vector<Matrix> A, B, Q, R;
  for (Index k = 0; k < p; ++k) {
    A.push_back(gaussian(rng, n, n) + 2.0 * Matrix::Identity(n, n));
    B.push_back(gaussian(rng, n, m));
    Q.push_back(random_spd(rng, n, 10, 1));
    R.push_back(random_spd(rng, m, 10, 1));
  }
  return ProblemData(n, m, HorizonMode::periodic(p), A, B, Q, R);
}

ProblemData chain() {
  Matrix A(2, 2), B(2, 1);
  A << 1, 1, 0, 1;
  B << 0, 1;
  return ProblemData(2, 1, HorizonMode::periodic(1), {A}, {B},
                     {Matrix::Identity(2, 2)}, {Matrix::Identity(1, 1)});
}

}  // namespace

TEST_CASE("ProblemData validation") {
  const Matrix I = Matrix::Identity(2, 2);
  const Matrix b = Matrix::Ones(2, 1);
  const Matrix r = Matrix::Ones(1, 1);
  auto make = [&](Matrix A, Matrix B, Matrix Q, Matrix R, Index p = 1) {
    return ProblemData(2, 1, HorizonMode::periodic(p),
                       std::vector<Matrix>(p, A), std::vector<Matrix>(p, B),
                       std::vector<Matrix>(p, Q), std::vector<Matrix>(p, R));
  };
  CHECK_NOTHROW(make(I, b, I, r));
  CHECK_THROWS_AS(make(Matrix::Zero(2, 2), b, I, r), InputError);
  CHECK_THROWS_AS(make(I, Matrix::Ones(1, 1), I, r), InputError);
  CHECK_THROWS_AS(make(I, b, -I, r), InputError);
  CHECK_THROWS_AS(make(I, b, I, Matrix::Zero(1, 1)), InputError);
  Matrix asym = I;
  asym(0, 1) = 0.5;
  CHECK_THROWS_AS(make(I, b, asym, r), InputError);
  CHECK_THROWS_AS(ProblemData(2, 1, HorizonMode::periodic(2), {I}, {b}, {I},
                              {r}),
                  InputError);
  // Q only needs to be positive semidefinite.
  Matrix q = Matrix::Zero(2, 2);
  q(0, 0) = 1;
  CHECK_NOTHROW(make(I, b, q, r));
}

TEST_CASE("periodic and window indexing") {
  std::mt19937_64 rng(1);
  const ProblemData pd = random_periodic(rng, 2, 1, 3);
  CHECK(pd.A(4).isApprox(pd.A(1)));
  CHECK(pd.contains(1000));

  const ProblemData w(1, 1, HorizonMode::window(2),
                      {Matrix::Ones(1, 1), Matrix::Ones(1, 1)},
                      {Matrix::Ones(1, 1), Matrix::Ones(1, 1)},
                      {Matrix::Ones(1, 1), Matrix::Ones(1, 1)},
                      {Matrix::Ones(1, 1), Matrix::Ones(1, 1)});
  CHECK(w.contains(1));
  CHECK_FALSE(w.contains(2));
  CHECK_THROWS_AS(w.A(2), InputError);
}

TEST_CASE("state_transition") {
  std::mt19937_64 rng(2);
  const ProblemData pd = random_periodic(rng, 3, 2, 4);
  CHECK(state_transition(pd, 2, 0).isApprox(Matrix::Identity(3, 3)));
  CHECK((state_transition(pd, 1, 2) - pd.A(2) * pd.A(1)).norm() < 1e-13);

  const ProblemData ti = random_periodic(rng, 3, 1, 1);
  const Matrix A = ti.A(0);
  CHECK((state_transition(ti, 5, 3) - A * A * A).norm() < 1e-12 * A.norm());

  Matrix loop = Matrix::Identity(3, 3);
  for (int i = 0; i < 7; ++i) loop = pd.A(3 + i) * loop;
  CHECK((state_transition(pd, 3, 7) - loop).norm() <= 1e-12 * loop.norm());
}

TEST_CASE("controllability and observability matrices") {
  std::mt19937_64 rng(3);
  const ProblemData pd = random_periodic(rng, 2, 1, 2);
  CHECK(controllability_matrix(pd, 1, 1).isApprox(pd.B(1)));

  Matrix brute(2, 2);
  brute << pd.A(1) * pd.B(0), pd.B(1);
  CHECK(controllability_matrix(pd, 0, 2).isApprox(brute));
  Eigen::JacobiSVD<Matrix> svd(brute);
  const int rank = static_cast<int>(
      (svd.singularValues().array() > 1e-12 * svd.singularValues()(0))
          .count());
  CHECK(numerical_rank(controllability_matrix(pd, 0, 2)) == rank);

  const ProblemData c = chain();
  CHECK(observability_matrix(c, 0, 1).topRows(2).isApprox(
      Matrix::Identity(2, 2)));
}

TEST_CASE("find_min_d") {
  Matrix A(2, 2);
  A << 0.9, 0.2, 0.1, 0.8;
  const ProblemData full(2, 2, HorizonMode::periodic(1), {A},
                         {Matrix::Identity(2, 2)}, {Matrix::Identity(2, 2)},
                         {Matrix::Identity(2, 2)});
  CHECK(find_min_d(full, 4) == 1);
  CHECK(find_min_d(chain(), 4) == 2);

  const ProblemData zero(2, 1, HorizonMode::periodic(1), {A},
                         {Matrix::Zero(2, 1)}, {Matrix::Identity(2, 2)},
                         {Matrix::Identity(1, 1)});
  CHECK_THROWS_WITH_AS(find_min_d(zero, 4),
                       doctest::Contains("NoUniformD"), CertificationError);
}
