// rhlqr: lift, certify, synthesize and simulate receding-horizon controllers
// for time-varying LQR problems.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "rhlqr/errors.hpp"
#include "rhlqr/verify.hpp"

namespace {

using namespace rhlqr;

Vector parse_vector(const std::string& text, int expected) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      vals.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError("--x0: cannot parse '" + item + "' as a number");
    }
  }
  if (static_cast<int>(vals.size()) != expected) {
    throw InputError("--x0 has " + std::to_string(vals.size()) +
                     " components, the problem has state dimension " +
                     std::to_string(expected));
  }
  return Eigen::Map<Vector>(vals.data(), expected);
}

void write_json(const std::string& path, const Json& j) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump(2) << "\n";
}

int depth_for(const ProblemData& pd, int d) {
  return d > 0 ? d : choose_depth(pd, 4);
}

void print_warnings(const LiftedProblem& lp) {
  for (const auto& w : lp.warnings()) std::cerr << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Receding-horizon controllers for time-varying LQR problems"};
  app.require_subcommand(1);

  std::string in, out, csv, x0, kind = "scalar-unit";
  int d = 0, T = 1, n = 2, m = 1, seeds = 5;
  long long period = 1;
  std::uint64_t seed = 1;
  double beta = 0.0, stop = 1e-10, tol_delta = 1e-12;
  int t_max = 10000;

  auto* lift_cmd = app.add_subcommand("lift", "Emit lifted data and margins");
  lift_cmd->add_option("--in", in, "Problem file")->required();
  lift_cmd->add_option("--d", d, "Lifting depth (default: smallest admissible)");
  lift_cmd->add_option("--out", out, "Output JSON (default stdout)");

  auto* certify_cmd = app.add_subcommand("certify", "Emit a certificate");
  certify_cmd->add_option("--in", in, "Problem file")->required();
  certify_cmd->add_option("--d", d, "Lifting depth");
  certify_cmd->add_option("--T", T, "Prediction horizon")->required();
  certify_cmd->add_option("--out", out, "Output JSON (default stdout)");

  auto* synth_cmd =
      app.add_subcommand("synthesize", "Choose T for a loss tolerance");
  synth_cmd->add_option("--in", in, "Problem file")->required();
  synth_cmd->add_option("--d", d, "Lifting depth");
  synth_cmd->add_option("--beta", beta, "Loss tolerance beta_bar > 0")
      ->required();
  synth_cmd->add_option("--T-max", t_max, "Largest admissible horizon");
  synth_cmd->add_option("--out", out, "Output JSON (default stdout)");

  auto* sim_cmd = app.add_subcommand("simulate", "Closed-loop simulation");
  sim_cmd->add_option("--in", in, "Problem file")->required();
  sim_cmd->add_option("--d", d, "Lifting depth");
  sim_cmd->add_option("--T", T, "Prediction horizon")->required();
  sim_cmd->add_option("--x0", x0, "Initial state, comma separated")
      ->required();
  sim_cmd->add_option("--out", out, "Report JSON")->required();
  sim_cmd->add_option("--csv", csv,
                      "Trajectory CSV prefix (default: report path stem)");
  sim_cmd->add_option("--stop", stop, "Relative tail tolerance");
  sim_cmd->add_option("--tol-delta", tol_delta,
                      "Riemannian tolerance for the optimal cost");

  auto* verify_cmd = app.add_subcommand("verify", "Run all invariant checks");
  verify_cmd->add_option("--in", in, "Problem file")->required();
  verify_cmd->add_option("--d", d, "Lifting depth");
  verify_cmd->add_option("--seeds", seeds, "Random draws per check");
  verify_cmd->add_option("--seed", seed, "Random seed");
  verify_cmd->add_option("--out", out, "Report JSON (default stdout)");

  auto* gen_cmd = app.add_subcommand("generate", "Generate a problem file");
  gen_cmd->add_option("--kind", kind,
                      "scalar-unit | time-invariant-random | periodic-random")
      ->required();
  gen_cmd->add_option("--seed", seed, "Random seed");
  gen_cmd->add_option("--n", n, "State dimension");
  gen_cmd->add_option("--m", m, "Input dimension");
  gen_cmd->add_option("--period", period, "Base period");
  gen_cmd->add_option("--out", out, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::kInput);
  }

  try {
    if (*gen_cmd) {
      write_problem(out, generate_scenario({kind, n, m, period, seed}));
      return 0;
    }
    const ProblemData pd = parse_problem(in);
    if (*lift_cmd) {
      const LiftedProblem lp = lift(pd, depth_for(pd, d));
      print_warnings(lp);
      write_json(out, lifted_to_json(lp));
    } else if (*certify_cmd) {
      const LiftedProblem lp = lift(pd, depth_for(pd, d));
      print_warnings(lp);
      write_json(out, certificate_to_json(build_certificate(lp, T)));
    } else if (*synth_cmd) {
      const LiftedProblem lp = lift(pd, depth_for(pd, d));
      print_warnings(lp);
      const Synthesis syn = synthesize(lp, beta, t_max);
      write_json(out, {{"T", syn.cert.T},
                       {"T_surrogate", syn.T_surrogate},
                       {"beta", beta},
                       {"certificate", certificate_to_json(syn.cert)}});
    } else if (*sim_cmd) {
      const auto start = std::chrono::steady_clock::now();
      const Vector xi = parse_vector(x0, pd.n());
      RunReport rep;
      rep.input_digest = digest(problem_to_json(pd));
      const LiftedProblem lp = lift(pd, depth_for(pd, d));
      print_warnings(lp);
      rep.d = lp.d();
      rep.T = T;
      rep.certificate = build_certificate(lp, T);
      rep.has_certificate = true;
      const PolicyRealization pol = candidate_policy(lp, T);
      SimulationOptions so;
      so.stop = stop;
      const ClosedLoopReport cl = simulate(lp, pol, xi, so);
      const BaseTrajectory bt = unlift_controls(lp, pol, cl);

      ScenarioSummary ss;
      ss.xi.assign(xi.data(), xi.data() + xi.size());
      ss.T = T;
      ss.steps = static_cast<Index>(cl.u.size());
      ss.converged = cl.converged;
      ss.cost_lo = cl.cost_lo();
      ss.cost_hi = cl.cost_hi();
      ss.beta_bound = rep.certificate.beta_bound * xi.squaredNorm();
      ss.envelope_violations =
          static_cast<Index>(cl.envelope_violations.size());
      ss.decrease_violations =
          static_cast<Index>(cl.decrease_violations.size());
      if (lp.periodic()) {
        const RiccatiApprox ra = solve_infinite_horizon(lp, 0, 0, tol_delta);
        const Interval beta_i = performance_loss(cl, ra, xi);
        ss.beta_lo = beta_i.lo;
        ss.beta_hi = beta_i.hi;
        rep.checks.push_back({"performance_bound",
                              beta_i.hi <= ss.beta_bound, ""});
      }
      rep.checks.push_back({"lyapunov_decrease",
                            cl.decrease_violations.empty(), ""});
      rep.checks.push_back({"envelope", cl.envelope_violations.empty(), ""});
      rep.scenarios.push_back(ss);
      rep.elapsed_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
      write_json(out, report_to_json(rep));

      std::filesystem::path prefix = csv.empty()
                                         ? std::filesystem::path(out)
                                               .replace_extension("")
                                         : std::filesystem::path(csv);
      std::ofstream lifted_csv(prefix.string() + ".lifted.csv");
      std::ofstream base_csv(prefix.string() + ".base.csv");
      if (!lifted_csv || !base_csv) {
        throw InputError("cannot write trajectory CSV at " + prefix.string());
      }
      write_lifted_csv(lifted_csv, cl);
      write_base_csv(base_csv, lp, cl, bt);
      if (!rep.all_passed()) return static_cast<int>(ExitCode::kVerification);
    } else if (*verify_cmd) {
      VerifyOptions vo;
      vo.d = d;
      vo.seeds = seeds;
      vo.seed = seed;
      const RunReport rep = verify_problem(pd, vo);
      write_json(out, report_to_json(rep));
      for (const auto& c : rep.checks) {
        std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name
                  << (c.detail.empty() ? "" : ": " + c.detail) << "\n";
      }
      if (!rep.all_passed()) return static_cast<int>(ExitCode::kVerification);
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kNumerical);
  }
}
