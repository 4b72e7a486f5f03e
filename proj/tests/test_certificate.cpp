#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "rhlqr/certificate.hpp"
#include "rhlqr/closed_loop.hpp"
#include "rhlqr/errors.hpp"
#include "rhlqr/riccati.hpp"
#include "rhlqr/workbench.hpp"
#include "support.hpp"

using namespace rhlqr;
using namespace rhlqr::testing;

TEST_CASE("terminal candidate: scalar and hand formula") {
  const LiftedProblem s = lift(scalar_unit(), 1);
  CHECK(terminal_candidate(s, 0).matrix()(0, 0) == doctest::Approx(2.0));

  Matrix A(2, 2), B(2, 2);
  A << 0.9, 0.3, -0.2, 1.1;
  B << 1.0, 0.5, 0.2, 2.0;
  const Matrix I = Matrix::Identity(2, 2);
  const LiftedProblem lp =
      lift(ProblemData(2, 2, HorizonMode::periodic(1), {A}, {B}, {I}, {I}), 1);
  // With B square and R = I: X = I + A' B^{-T} B^{-1} A.
  const Matrix Binv = B.inverse();
  const Matrix ref = I + A.transpose() * Binv.transpose() * Binv * A;
  CHECK((terminal_candidate(lp, 0).matrix() - ref).norm() <= 1e-12 * ref.norm());
}

TEST_CASE("terminal candidates satisfy the stability condition") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Draw dr = draw_problem(seed);
    for (Index t = 0; t < dr.lp.count(); ++t) {
      CHECK(loewner_geq(terminal_candidate(dr.lp, t),
                        riccati_apply(dr.lp, t, terminal_candidate(dr.lp, t + 1))));
    }
  }
}

TEST_CASE("hatX sequence") {
  const LiftedProblem s = lift(scalar_unit(), 1);
  CHECK(hatX_sequence(s, 1, 0, 1)[0].matrix()(0, 0) == doctest::Approx(2.0));
  CHECK(hatX_sequence(s, 3, 0, 1)[0].matrix()(0, 0) ==
        doctest::Approx(13.0 / 8.0).epsilon(1e-15));

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Draw dr = draw_problem(seed);
    const RiccatiApprox ra = solve_infinite_horizon(dr.lp, 0, 0, 1e-12);
    double prev = INFINITY;
    for (int T = 1; T <= 9; T += 2) {
      const double d =
          riemannian_distance(hatX_sequence(dr.lp, T, 0, 1)[0], ra.at(0));
      CHECK(d <= prev + 1e-12);
      prev = d;
    }
  }
}

TEST_CASE("delta_bar") {
  const LiftedProblem s = lift(scalar_unit(), 1);
  CHECK(delta_bar(s, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  // Terminal candidates dominate P, so the bound covers the true distance.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Draw dr = draw_problem(seed);
    const RiccatiApprox ra =
        solve_infinite_horizon(dr.lp, 0, dr.lp.count() - 1, 1e-12);
    const double db = delta_bar(dr.lp, 1);
    for (Index t = 0; t < dr.lp.count(); ++t) {
      CHECK(riemannian_distance(terminal_candidate(dr.lp, t), ra.at(t)) <=
            db + ra.trunc_err);
    }
  }
}

TEST_CASE("scalar certificate at T = 1") {
  const Certificate c = build_certificate(lift(scalar_unit(), 1), 1);
  CHECK(c.c.omega_hi == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
  CHECK(c.c.omega_lo == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
  CHECK(c.c.lambda_lo == doctest::Approx(13.0 / 9.0).epsilon(1e-14));
  CHECK(c.c.lambda_hi == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(c.rho_hi == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(c.beta_bound == doctest::Approx(30.0 / 13.0).epsilon(1e-12));
  CHECK(c.envelope_gain == doctest::Approx(1.0));
  CHECK(c.envelope_decay == doctest::Approx(1.0 - (13.0 / 9.0) / (5.0 / 3.0)));
}

TEST_CASE("beta_bound decreases with the horizon") {
  const LiftedProblem s = lift(scalar_unit(), 1);
  double prev = INFINITY;
  for (int T = 1; T <= 10; ++T) {
    const double b = build_certificate(s, T).beta_bound;
    CHECK(b < prev);
    CHECK(std::isfinite(b));
    prev = b;
  }
}

TEST_CASE("horizon_for_tolerance") {
  CertificateInputs c;
  c.omega_hi = c.lambda_hi = 2.0;
  c.omega_lo = c.lambda_lo = 1.0;
  c.delta_bar = 1.0;
  c.zeta_hi = c.eps_lo = 0.5;
  CHECK(horizon_for_tolerance(c, 0.1) == 8);
  CHECK(horizon_for_tolerance(c, std::numeric_limits<double>::max()) == 1);
  CHECK(horizon_for_tolerance(c, 1e-300, 50) == 50);
  CHECK_THROWS_AS(horizon_for_tolerance(c, 0.0), InputError);
  CHECK_THROWS_AS(horizon_for_tolerance(c, -1.0), InputError);
  int prev = 0;
  for (double beta = 10.0; beta > 1e-12; beta /= 2) {
    const int T = horizon_for_tolerance(c, beta);
    CHECK(T >= prev);
    prev = T;
  }
}

TEST_CASE("synthesize meets the tolerance") {
  const LiftedProblem s = lift(scalar_unit(), 1);
  const Synthesis syn = synthesize(s, 0.05);
  CHECK(syn.cert.T >= 1);
  CHECK(syn.cert.beta_bound <= 0.05);
  CHECK(syn.cert.T <= syn.T_surrogate);
  CHECK_THROWS_AS(synthesize(s, 1e-30, 3), CertificationError);
}

TEST_CASE("certificate invariants on random problems") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Draw dr = draw_problem(seed);
    for (int T : {1, 3, 6}) {
      const Certificate c = build_certificate(dr.lp, T);
      CHECK(c.c.omega_lo > 0.0);
      CHECK(c.c.omega_lo <= c.c.omega_hi);
      CHECK(c.c.lambda_lo <= c.c.omega_hi * (1 + 1e-12));
      CHECK(c.envelope_decay > 0.0);
      CHECK(c.envelope_decay < 1.0);
      CHECK(c.rho_hi < 1.0);
      CHECK(c.beta_bound > 0.0);
    }
  }
}

TEST_CASE("window-mode certificate is flagged") {
  const Draw dr = draw_problem(4);
  const Index K = 12 * dr.pd.stored();
  std::vector<Matrix> A, B, Q, R;
  for (Index k = 0; k < K; ++k) {
    A.push_back(dr.pd.A(k));
    B.push_back(dr.pd.B(k));
    Q.push_back(dr.pd.Q(k));
    R.push_back(dr.pd.R(k));
  }
  const ProblemData w(dr.pd.n(), dr.pd.m(), HorizonMode::window(K), A, B, Q,
                      R);
  const LiftedProblem lp = lift(w, dr.lp.d());
  const Certificate c = build_certificate(lp, 3);
  CHECK(c.window_limited);
  CHECK(certificate_to_json(c)["mode"] == "window-limited");
  CHECK(c.beta_bound > 0.0);

  const PolicyRealization pol = candidate_policy(lp, 3);
  CHECK(pol.size() == lp.count() - 3);
  std::mt19937_64 rng(4);
  const ClosedLoopReport r =
      simulate(lp, pol, random_unit_vector(rng, lp.n()));
  CHECK(r.decrease_violations.empty());
  CHECK(r.envelope_violations.empty());
  CHECK_THROWS_AS(build_certificate(lp, static_cast<int>(lp.count())),
                  CertificationError);
}
