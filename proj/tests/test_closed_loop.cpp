#include <cmath>
#include <random>

#include "doctest.h"
#include "rhlqr/closed_loop.hpp"
#include "rhlqr/errors.hpp"
#include "support.hpp"

using namespace rhlqr;
using namespace rhlqr::testing;

namespace {
const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;
}

TEST_CASE("zero initial state gives a zero trajectory") {
  const LiftedProblem lp = lift(scalar_unit(), 1);
  const ClosedLoopReport r =
      simulate(lp, candidate_policy(lp, 1), Vector::Zero(1));
  CHECK(r.cost == 0.0);
  CHECK(r.tail_hi == 0.0);
  CHECK(r.converged);
}

TEST_CASE("initial state of the wrong length is rejected") {
  const LiftedProblem lp = lift(scalar_unit(), 1);
  CHECK_THROWS_AS(simulate(lp, candidate_policy(lp, 1), Vector::Ones(2)),
                  InputError);
}

TEST_CASE("scalar fixture: realized cost within the certified interval") {
  const LiftedProblem lp = lift(scalar_unit(), 1);
  const Certificate cert = build_certificate(lp, 1);
  const ClosedLoopReport r =
      simulate(lp, candidate_policy(lp, 1), Vector::Ones(1));
  CHECK(r.converged);
  CHECK(r.cost_lo() >= kGolden - 1e-9);
  CHECK(r.cost_hi() <= kGolden + cert.beta_bound);
  const RiccatiApprox ra = solve_infinite_horizon(lp, 0, 0, 1e-12);
  const Interval beta = performance_loss(r, ra, Vector::Ones(1));
  CHECK(beta.hi <= 2.308);
  CHECK(beta.lo >= 0.0);
  CHECK(r.decrease_violations.empty());
  CHECK(r.envelope_violations.empty());
}

TEST_CASE("long horizon approaches the optimal policy") {
  const LiftedProblem lp = lift(scalar_unit(), 1);
  const RiccatiApprox ra = solve_infinite_horizon(lp, 0, 0, 1e-13);
  SimulationOptions so;
  so.stop = 1e-20;
  const ClosedLoopReport r =
      simulate(lp, candidate_policy(lp, 40), Vector::Ones(1), so);
  const Interval beta = performance_loss(r, ra, Vector::Ones(1));
  const Certificate cert = build_certificate(lp, 40);
  CHECK(beta.lo <= 1e-12);
  CHECK(beta.hi >= -1e-12);
  CHECK(beta.hi <= cert.beta_bound);
}

TEST_CASE("W decays no slower than the certified rate") {
  Matrix A(2, 2), B(2, 2);
  A << 1.1, 0.4, -0.3, 0.7;
  B << 1.0, 0.0, 0.5, 1.0;
  const Matrix I = Matrix::Identity(2, 2);
  const LiftedProblem lp =
      lift(ProblemData(2, 2, HorizonMode::periodic(1), {A}, {B}, {I}, {I}), 1);
  const PolicyRealization pol = candidate_policy(lp, 2);
  const EnvelopeConstants ec = envelope_constants(lp, pol);
  SimulationOptions so;
  so.stop = 1e-24;
  const ClosedLoopReport r = simulate(lp, pol, Vector::Ones(2), so);
  REQUIRE(r.W.size() > 3);
  // Least-squares slope of log W against t.
  const double N = static_cast<double>(r.W.size());
  double st = 0, sl = 0, stt = 0, stl = 0;
  for (std::size_t t = 0; t < r.W.size(); ++t) {
    const double l = std::log(r.W[t]);
    st += t;
    sl += l;
    stt += double(t) * t;
    stl += t * l;
  }
  const double slope = (N * stl - st * sl) / (N * stt - st * st);
  CHECK(std::exp(slope) <= 1.0 - ec.lambda_lo / ec.omega_hi);
}

TEST_CASE("d = 1 base inputs equal the lifted inputs") {
  DrawOptions opt;
  opt.d = 1;
  const Draw dr = draw_problem(3, opt);
  const PolicyRealization pol = candidate_policy(dr.lp, 2);
  std::mt19937_64 rng(3);
  const ClosedLoopReport r =
      simulate(dr.lp, pol, random_unit_vector(rng, dr.lp.n()));
  const BaseTrajectory bt = unlift_controls(dr.lp, pol, r);
  for (std::size_t k = 0; k < r.u.size(); ++k) {
    CHECK((bt.u[k] - r.u[k]).norm() == 0.0);
  }
}

TEST_CASE("d = 2 base trajectory matches the lifted trajectory") {
  DrawOptions opt;
  opt.d = 2;
  std::mt19937_64 rng(4);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Draw dr = draw_problem(seed, opt);
    const PolicyRealization pol = candidate_policy(dr.lp, 3);
    const ClosedLoopReport r =
        simulate(dr.lp, pol, random_unit_vector(rng, dr.lp.n()));
    const BaseTrajectory bt = unlift_controls(dr.lp, pol, r);
    CHECK(bt.max_block_mismatch <= 1e-10);
    for (std::size_t t = 0; t < r.x.size(); ++t) {
      CHECK((bt.x[2 * t] - r.x[t]).norm() <= 1e-10);
    }
    CHECK(rel_err(bt.cost, r.cost) <= 1e-8);
  }
}

TEST_CASE("closed loop obeys decrease and envelope on random problems") {
  std::mt19937_64 rng(5);
  SimulationOptions so;
  so.min_steps = 200;
  so.stop = 1e-14;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Draw dr = draw_problem(seed);
    for (int T : {1, 4}) {
      const ClosedLoopReport r =
          simulate(dr.lp, candidate_policy(dr.lp, T),
                   random_unit_vector(rng, dr.lp.n()), so);
      CHECK(r.decrease_violations.empty());
      CHECK(r.envelope_violations.empty());
      CHECK(r.u.size() >= 200);
    }
  }
}
