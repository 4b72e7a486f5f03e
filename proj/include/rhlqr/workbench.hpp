#pragma once

// File formats and scenario generation.
//
// Problem file (JSON):
//   { "schema_version": 1, "n": 2, "m": 1,
//     "mode": "periodic" | "window", "period": p | "window": K,
//     "A": [[[..row..], ...], ...], "B": ..., "Q": ..., "R": ...,
//     "metadata": { "name": "...", "description": "..." } }
// Each of A, B, Q, R lists one row-major nested matrix per base step.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "rhlqr/certificate.hpp"
#include "rhlqr/closed_loop.hpp"

namespace rhlqr {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

ProblemData problem_from_json(const Json& j, const Tolerances& tol = {});
Json problem_to_json(const ProblemData& pd);

/// Reads and validates a problem file. Schema problems and invariant
/// violations both raise InputError with the offending path or matrix.
ProblemData parse_problem(const std::filesystem::path& path,
                          const Tolerances& tol = {});
void write_problem(const std::filesystem::path& path, const ProblemData& pd);

/// 64-bit FNV-1a of the canonical JSON dump, as "fnv1a64:<hex>".
std::string digest(const Json& j);

struct ScenarioSpec {
  std::string kind = "scalar-unit";  // time-invariant-random, periodic-random
  int n = 1;
  int m = 1;
  Index period = 1;
  std::uint64_t seed = 0;
};

/// Deterministic in all ScenarioSpec fields, including the seed.
ProblemData generate_scenario(const ScenarioSpec& spec);

/// Random SPD matrix with eigenvalues log-uniform in [1/cond, 1] * scale.
Matrix random_spd(std::mt19937_64& rng, int n, double cond = 100.0,
                  double scale = 1.0);
Matrix random_orthogonal(std::mt19937_64& rng, int n);
Vector random_unit_vector(std::mt19937_64& rng, int n);

Json lifted_to_json(const LiftedProblem& lp);
Json certificate_to_json(const Certificate& cert);
Certificate certificate_from_json(const Json& j);

struct ScenarioSummary {
  std::vector<double> xi;
  int T = 0;
  Index steps = 0;
  bool converged = false;
  double cost_lo = 0, cost_hi = 0;
  double beta_lo = 0, beta_hi = 0;
  double beta_bound = 0;  // certificate coefficient times |xi|^2
  Index envelope_violations = 0;
  Index decrease_violations = 0;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunReport {
  std::string input_digest;
  int d = 0;
  int T = 0;
  bool has_certificate = false;
  Certificate certificate;
  std::vector<ScenarioSummary> scenarios;
  std::vector<CheckResult> checks;
  double elapsed_ms = 0;

  bool all_passed() const;
};

Json report_to_json(const RunReport& r);
RunReport report_from_json(const Json& j);

/// Lifted trajectory: t, x..., u..., stage, W. The final row carries the
/// last state with empty input and stage fields.
void write_lifted_csv(std::ostream& os, const ClosedLoopReport& rep);
/// Base trajectory: k, x..., u..., stage, W (W only at block starts).
void write_base_csv(std::ostream& os, const LiftedProblem& lp,
                    const ClosedLoopReport& rep, const BaseTrajectory& bt);

}  // namespace rhlqr
