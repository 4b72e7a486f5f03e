#include "rhlqr/verify.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <sstream>

#include "rhlqr/errors.hpp"
#include "rhlqr/oracle.hpp"

namespace rhlqr {
namespace {

using CheckFn = std::function<std::string()>;

// A check returns an empty string on success and a diagnostic otherwise.
void run_check(RunReport& rep, const std::string& name, const CheckFn& fn) {
  CheckResult r{name, false, ""};
  try {
    r.detail = fn();
    r.passed = r.detail.empty();
  } catch (const std::exception& e) {
    r.detail = std::string("exception: ") + e.what();
  }
  rep.checks.push_back(std::move(r));
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace

RunReport verify_problem(const ProblemData& pd, const VerifyOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  RunReport rep;
  rep.input_digest = digest(problem_to_json(pd));
  rep.d = opt.d > 0 ? opt.d : choose_depth(pd, opt.d_max);
  const LiftedProblem lp = lift(pd, rep.d);
  const Index steps = lp.count();
  std::mt19937_64 rng(opt.seed);
  const int n = lp.n();

  run_check(rep, "lifting.transition_consistency", [&]() -> std::string {
    for (Index t = 0; t < steps; ++t) {
      const Matrix Theta = state_transition(pd, lp.d() * t, lp.d());
      const double err = (lp.blocks(t).Phi - Theta).norm() /
                         std::max(Theta.norm(), 1e-300);
      if (err > 1e-10) return "Phi differs from Theta at t = " +
                              std::to_string(t);
      Matrix R_diag = Matrix::Zero(lp.md(), lp.md());
      for (int i = 0; i < lp.d(); ++i) {
        R_diag.block(i * lp.m(), i * lp.m(), lp.m(), lp.m()) =
            pd.R(lp.d() * t + i);
      }
      if (!loewner_geq(lp.at(t).R, R_diag)) {
        return "lifted R below diag(R) at t = " + std::to_string(t);
      }
    }
    return {};
  });

  ContractionConstants cc;
  run_check(rep, "riccati.contraction", [&]() -> std::string {
    cc = contraction_constants(lp);
    if (!(cc.rho_hi < 1.0)) return "rho_hi >= 1";
    for (Index t = 0; t < steps; ++t) {
      for (int s = 0; s < opt.seeds; ++s) {
        const SpdMatrix Y(random_spd(rng, n, 1e3, 10.0));
        const SpdMatrix Z(random_spd(rng, n, 1e3, 10.0));
        const double lhs = riemannian_distance(riccati_apply(lp, t, Y),
                                               riccati_apply(lp, t, Z));
        const double rhs =
            cc.rho[static_cast<std::size_t>(t)] * riemannian_distance(Y, Z);
        if (lhs > rhs + 1e-8) {
          std::ostringstream os;
          os << "contraction violated at t = " << t << ": " << lhs << " > "
             << rhs;
          return os.str();
        }
      }
    }
    return {};
  });

  run_check(rep, "riccati.monotonicity", [&]() -> std::string {
    for (Index t = 0; t < steps; ++t) {
      for (int s = 0; s < opt.seeds; ++s) {
        const Matrix Z = random_spd(rng, n, 1e3, 10.0);
        const Matrix Y = Z + random_spd(rng, n, 1e3, 1.0);
        if (!loewner_geq(riccati_apply(lp, t, Y), riccati_apply(lp, t, Z))) {
          return "monotonicity violated at t = " + std::to_string(t);
        }
      }
    }
    return {};
  });

  run_check(rep, "oracle.equivalence", [&]() -> std::string {
    const int T_hi = lp.periodic() ? 6 : static_cast<int>(std::min<Index>(
                                             6, steps - 1));
    for (int T = 1; T <= T_hi; ++T) {
      const SpdMatrix X(random_spd(rng, n, 1e2, 5.0));
      const Vector chi = random_unit_vector(rng, n);
      const StackedSolution sol =
          solve_stacked(build_stacked(lp, 0, T, chi, X));
      const double ricc = chi.dot(riccati_compose(lp, 0, X, T).matrix() * chi);
      if (rel_err(sol.value, ricc) > 1e-8) {
        std::ostringstream os;
        os << "value mismatch at T = " << T << ": " << sol.value << " vs "
           << ricc;
        return os.str();
      }
      const Matrix X1 = T > 1 ? riccati_compose(lp, 1, X, T - 1).matrix()
                              : X.matrix();
      const Vector u = -riccati_gain(lp, 0, X1) * chi;
      const Vector w0 = sol.w.head(lp.md());
      if ((u - w0).norm() > 1e-8 * std::max(1.0, u.norm())) {
        return "first input block differs from the receding-horizon action "
               "at T = " +
               std::to_string(T);
      }
    }
    return {};
  });

  RiccatiApprox ra;
  run_check(rep, "riccati.infinite_horizon", [&]() -> std::string {
    ra = solve_infinite_horizon(lp, 0, 0, opt.tol_delta);
    return {};
  });

  for (int T : opt.horizons) {
    if (!lp.periodic() && T >= steps) continue;
    const std::string tag = "[T=" + std::to_string(T) + "]";
    Certificate cert;
    bool have_cert = false;
    run_check(rep, "certificate.build" + tag, [&]() -> std::string {
      cert = ra.P.empty() ? build_certificate(lp, T)
                          : build_certificate(lp, T, ra);
      have_cert = true;
      return {};
    });
    if (!have_cert) continue;
    if (!rep.has_certificate) {
      rep.has_certificate = true;
      rep.certificate = cert;
      rep.T = T;
    }
    const PolicyRealization pol = candidate_policy(lp, T);
    std::vector<ClosedLoopReport> runs;
    std::vector<Vector> xis;
    run_check(rep, "closed_loop.stability" + tag, [&]() -> std::string {
      SimulationOptions so;
      so.min_steps = 200;
      so.stop = 1e-14;
      for (int s = 0; s < opt.seeds; ++s) {
        xis.push_back(random_unit_vector(rng, n));
        runs.push_back(simulate(lp, pol, xis.back(), so));
        const auto& r = runs.back();
        if (!r.decrease_violations.empty()) {
          return "Lyapunov decrease violated at t = " +
                 std::to_string(r.decrease_violations.front());
        }
        if (!r.envelope_violations.empty()) {
          return "envelope violated at t = " +
                 std::to_string(r.envelope_violations.front());
        }
      }
      return {};
    });
    run_check(rep, "closed_loop.performance_bound" + tag,
              [&]() -> std::string {
                if (ra.P.empty()) return "no infinite-horizon approximation";
                for (std::size_t s = 0; s < runs.size(); ++s) {
                  const Interval beta = performance_loss(runs[s], ra, xis[s]);
                  const double xi2 = xis[s].squaredNorm();
                  ScenarioSummary ss;
                  ss.xi.assign(xis[s].data(), xis[s].data() + n);
                  ss.T = T;
                  ss.steps = static_cast<Index>(runs[s].u.size());
                  ss.converged = runs[s].converged;
                  ss.cost_lo = runs[s].cost_lo();
                  ss.cost_hi = runs[s].cost_hi();
                  ss.beta_lo = beta.lo;
                  ss.beta_hi = beta.hi;
                  ss.beta_bound = cert.beta_bound * xi2;
                  ss.envelope_violations = static_cast<Index>(
                      runs[s].envelope_violations.size());
                  ss.decrease_violations = static_cast<Index>(
                      runs[s].decrease_violations.size());
                  rep.scenarios.push_back(ss);
                  if (beta.hi > cert.beta_bound * xi2) {
                    std::ostringstream os;
                    os << "measured loss " << beta.hi << " exceeds bound "
                       << cert.beta_bound * xi2;
                    return os.str();
                  }
                  const double p_gap = ra.spectral_gap(0) * xi2;
                  const double floor = 2.0 * p_gap + runs[s].tail_hi +
                                       1e-12 * runs[s].cost_hi();
                  if (beta.lo < -floor) {
                    std::ostringstream os;
                    os << "measured loss " << beta.lo
                       << " is negative beyond truncation slack";
                    return os.str();
                  }
                }
                return {};
              });
    run_check(rep, "closed_loop.base_cost_equivalence" + tag,
              [&]() -> std::string {
                for (const auto& r : runs) {
                  const BaseTrajectory bt = unlift_controls(lp, pol, r);
                  if (rel_err(bt.cost, r.cost) > 1e-8) {
                    std::ostringstream os;
                    os << "base cost " << bt.cost << " vs lifted " << r.cost;
                    return os.str();
                  }
                }
                return {};
              });
  }

  rep.elapsed_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return rep;
}

}  // namespace rhlqr
