#include "rhlqr/workbench.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "rhlqr/errors.hpp"

namespace rhlqr {
namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void schema_error(const std::string& path, const std::string& msg) {
  throw InputError("schema error at " + path + ": " + msg);
}

const Json& require(const Json& j, const char* key) {
  if (!j.is_object()) schema_error("$", "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema_error(std::string("$.") + key, "missing field");
  return *it;
}

long long require_int(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_number_integer()) {
    schema_error(std::string("$.") + key, "expected an integer");
  }
  return v.get<long long>();
}

Matrix matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols,
                        const std::string& path) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    schema_error(path, "expected an array of " + std::to_string(rows) +
                           " rows");
  }
  Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    const std::string rpath = path + "[" + std::to_string(i) + "]";
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      schema_error(rpath, "expected a row of " + std::to_string(cols) +
                              " numbers");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Json& v = row[static_cast<std::size_t>(c)];
      const std::string vpath = rpath + "[" + std::to_string(c) + "]";
      if (!v.is_number()) schema_error(vpath, "expected a number");
      const double x = v.get<double>();
      if (!std::isfinite(x)) schema_error(vpath, "non-finite value");
      M(i, c) = x;
    }
  }
  return M;
}

std::vector<Matrix> sequence_from_json(const Json& root, const char* key,
                                       Index count, Eigen::Index rows,
                                       Eigen::Index cols) {
  const Json& seq = require(root, key);
  const std::string path = std::string("$.") + key;
  if (!seq.is_array() || static_cast<Index>(seq.size()) != count) {
    schema_error(path, "expected " + std::to_string(count) + " matrices");
  }
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::size_t k = 0; k < seq.size(); ++k) {
    out.push_back(matrix_from_json(seq[k], rows, cols,
                                   path + "[" + std::to_string(k) + "]"));
  }
  return out;
}

Json matrix_to_json(const Matrix& M) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(i, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json sequence_to_json(const std::vector<Matrix>& seq) {
  Json out = Json::array();
  for (const auto& M : seq) out.push_back(matrix_to_json(M));
  return out;
}

double normal(std::mt19937_64& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

Matrix gaussian(std::mt19937_64& rng, int rows, int cols) {
  Matrix M(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) M(r, c) = normal(rng);
  return M;
}

// U D U' with D block diagonal: 2x2 scaled rotations and real scalars whose
// moduli lie in [0.5, 1.5].
Matrix random_dynamics(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> radius(0.5, 1.5);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  Matrix D = Matrix::Zero(n, n);
  int i = 0;
  for (; i + 1 < n; i += 2) {
    const double r = radius(rng), th = angle(rng);
    D(i, i) = r * std::cos(th);
    D(i, i + 1) = -r * std::sin(th);
    D(i + 1, i) = r * std::sin(th);
    D(i + 1, i + 1) = r * std::cos(th);
  }
  if (i < n) D(i, i) = (normal(rng) < 0 ? -1.0 : 1.0) * radius(rng);
  const Matrix U = random_orthogonal(rng, n);
  return U * D * U.transpose();
}

Matrix weight(std::mt19937_64& rng, int n) {
  const Matrix G = gaussian(rng, n, n) / std::sqrt(static_cast<double>(n));
  return G.transpose() * G + 0.1 * Matrix::Identity(n, n);
}

}  // namespace

ProblemData problem_from_json(const Json& j, const Tolerances& tol) {
  if (!j.is_object()) schema_error("$", "expected an object");
  const long long version = require_int(j, "schema_version");
  if (version != kSchemaVersion) {
    schema_error("$.schema_version",
                 "unsupported version " + std::to_string(version));
  }
  const long long n = require_int(j, "n");
  const long long m = require_int(j, "m");
  if (n < 1) schema_error("$.n", "must be >= 1");
  if (m < 1) schema_error("$.m", "must be >= 1");
  const Json& mode_j = require(j, "mode");
  if (!mode_j.is_string()) schema_error("$.mode", "expected a string");
  const std::string mode = mode_j.get<std::string>();
  HorizonMode hm;
  if (mode == "periodic") {
    hm = HorizonMode::periodic(require_int(j, "period"));
    if (hm.length < 1) schema_error("$.period", "must be >= 1");
  } else if (mode == "window") {
    hm = HorizonMode::window(require_int(j, "window"));
    if (hm.length < 1) schema_error("$.window", "must be >= 1");
  } else {
    schema_error("$.mode", "expected \"periodic\" or \"window\"");
  }
  const auto ni = static_cast<Eigen::Index>(n);
  const auto mi = static_cast<Eigen::Index>(m);
  ProblemData pd(static_cast<int>(n), static_cast<int>(m), hm,
                 sequence_from_json(j, "A", hm.length, ni, ni),
                 sequence_from_json(j, "B", hm.length, ni, mi),
                 sequence_from_json(j, "Q", hm.length, ni, ni),
                 sequence_from_json(j, "R", hm.length, mi, mi), tol);
  if (auto it = j.find("metadata"); it != j.end()) {
    if (!it->is_object()) schema_error("$.metadata", "expected an object");
    pd.name = it->value("name", "");
    pd.description = it->value("description", "");
  }
  return pd;
}

Json problem_to_json(const ProblemData& pd) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["n"] = pd.n();
  j["m"] = pd.m();
  if (pd.mode().is_periodic()) {
    j["mode"] = "periodic";
    j["period"] = pd.stored();
  } else {
    j["mode"] = "window";
    j["window"] = pd.stored();
  }
  j["A"] = sequence_to_json(pd.A_seq());
  j["B"] = sequence_to_json(pd.B_seq());
  j["Q"] = sequence_to_json(pd.Q_seq());
  j["R"] = sequence_to_json(pd.R_seq());
  if (!pd.name.empty() || !pd.description.empty()) {
    j["metadata"] = {{"name", pd.name}, {"description", pd.description}};
  }
  return j;
}

ProblemData parse_problem(const std::filesystem::path& path,
                          const Tolerances& tol) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open problem file " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError("problem file " + path.string() +
                     " is not valid JSON: " + e.what());
  }
  return problem_from_json(j, tol);
}

void write_problem(const std::filesystem::path& path, const ProblemData& pd) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << problem_to_json(pd).dump(2) << "\n";
}

std::string digest(const Json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016" PRIx64, h);
  return buf;
}

Matrix random_orthogonal(std::mt19937_64& rng, int n) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(rng, n, n));
  Matrix Q = qr.householderQ();
  // Fix column signs so the distribution is Haar.
  const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) {
    if (R(i, i) < 0) Q.col(i) *= -1.0;
  }
  return Q;
}

Matrix random_spd(std::mt19937_64& rng, int n, double cond, double scale) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector ev(n);
  for (int i = 0; i < n; ++i) ev(i) = scale * std::pow(cond, -u(rng));
  const Matrix U = random_orthogonal(rng, n);
  return symmetrize(U * ev.asDiagonal() * U.transpose());
}

Vector random_unit_vector(std::mt19937_64& rng, int n) {
  Vector v(n);
  do {
    for (int i = 0; i < n; ++i) v(i) = normal(rng);
  } while (v.norm() < 1e-8);
  return v / v.norm();
}

ProblemData generate_scenario(const ScenarioSpec& spec) {
  if (spec.kind == "scalar-unit") {
    const Matrix one = Matrix::Ones(1, 1);
    ProblemData pd(1, 1, HorizonMode::periodic(1), {one}, {one}, {one}, {one});
    pd.name = "scalar-unit";
    pd.description = "a = b = q = r = 1";
    return pd;
  }
  Index period = 1;
  if (spec.kind == "periodic-random") {
    period = spec.period;
  } else if (spec.kind != "time-invariant-random") {
    throw InputError("unknown scenario kind '" + spec.kind + "'");
  }
  if (spec.n < 1 || spec.m < 1 || period < 1) {
    throw InputError("scenario dimensions and period must be >= 1");
  }
  std::mt19937_64 rng(spec.seed);
  std::vector<Matrix> A, B, Q, R;
  for (Index k = 0; k < period; ++k) {
    A.push_back(random_dynamics(rng, spec.n));
    B.push_back(gaussian(rng, spec.n, spec.m));
    Q.push_back(weight(rng, spec.n));
    R.push_back(weight(rng, spec.m));
  }
  ProblemData pd(spec.n, spec.m, HorizonMode::periodic(period), std::move(A),
                 std::move(B), std::move(Q), std::move(R));
  std::ostringstream name;
  name << spec.kind << "-n" << spec.n << "-m" << spec.m << "-p" << period
       << "-s" << spec.seed;
  pd.name = name.str();
  return pd;
}

Json lifted_to_json(const LiftedProblem& lp) {
  Json steps = Json::array();
  for (Index t = 0; t < lp.count(); ++t) {
    const LiftedStep& s = lp.at(t);
    steps.push_back({{"t", t},
                     {"A", matrix_to_json(s.A)},
                     {"B", matrix_to_json(s.B)},
                     {"Q", matrix_to_json(s.Q)},
                     {"R", matrix_to_json(s.R)},
                     {"correction", matrix_to_json(s.correction)}});
  }
  Json j;
  j["n"] = lp.n();
  j["m"] = lp.m();
  j["d"] = lp.d();
  j["mode"] = lp.periodic() ? "periodic" : "window";
  j["count"] = lp.count();
  j["margins"] = {{"q", lp.margins().q},
                  {"b", lp.margins().b},
                  {"a", lp.margins().a}};
  j["steps"] = std::move(steps);
  j["warnings"] = lp.warnings();
  return j;
}

Json certificate_to_json(const Certificate& c) {
  return {{"d", c.d},
          {"T", c.T},
          {"omega_hi", c.c.omega_hi},
          {"omega_lo", c.c.omega_lo},
          {"lambda_lo", c.c.lambda_lo},
          {"lambda_hi_ub", c.c.lambda_hi},
          {"delta_bar", c.c.delta_bar},
          {"zeta_hi", c.c.zeta_hi},
          {"eps_lo", c.c.eps_lo},
          {"rho_hi", c.rho_hi},
          {"beta_bound", c.beta_bound},
          {"envelope_gain", c.envelope_gain},
          {"envelope_decay", c.envelope_decay},
          {"q_margin", c.q_margin},
          {"mode", c.window_limited ? "window-limited" : "exact-periodic"}};
}

Certificate certificate_from_json(const Json& j) {
  Certificate c;
  c.d = j.at("d").get<int>();
  c.T = j.at("T").get<int>();
  c.c.omega_hi = j.at("omega_hi").get<double>();
  c.c.omega_lo = j.at("omega_lo").get<double>();
  c.c.lambda_lo = j.at("lambda_lo").get<double>();
  c.c.lambda_hi = j.at("lambda_hi_ub").get<double>();
  c.c.delta_bar = j.at("delta_bar").get<double>();
  c.c.zeta_hi = j.at("zeta_hi").get<double>();
  c.c.eps_lo = j.at("eps_lo").get<double>();
  c.rho_hi = j.at("rho_hi").get<double>();
  c.beta_bound = j.at("beta_bound").get<double>();
  c.envelope_gain = j.at("envelope_gain").get<double>();
  c.envelope_decay = j.at("envelope_decay").get<double>();
  c.q_margin = j.at("q_margin").get<double>();
  c.window_limited = j.at("mode").get<std::string>() == "window-limited";
  return c;
}

bool RunReport::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

Json report_to_json(const RunReport& r) {
  Json scenarios = Json::array();
  for (const auto& s : r.scenarios) {
    scenarios.push_back({{"xi", s.xi},
                         {"T", s.T},
                         {"steps", s.steps},
                         {"converged", s.converged},
                         {"cost_lo", s.cost_lo},
                         {"cost_hi", s.cost_hi},
                         {"beta_lo", s.beta_lo},
                         {"beta_hi", s.beta_hi},
                         {"beta_bound", s.beta_bound},
                         {"envelope_violations", s.envelope_violations},
                         {"decrease_violations", s.decrease_violations}});
  }
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    checks.push_back(
        {{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  Json j;
  j["input_digest"] = r.input_digest;
  j["d"] = r.d;
  j["T"] = r.T;
  j["certificate"] =
      r.has_certificate ? certificate_to_json(r.certificate) : Json(nullptr);
  j["scenarios"] = std::move(scenarios);
  j["checks"] = std::move(checks);
  j["elapsed_ms"] = r.elapsed_ms;
  return j;
}

RunReport report_from_json(const Json& j) {
  RunReport r;
  r.input_digest = j.at("input_digest").get<std::string>();
  r.d = j.at("d").get<int>();
  r.T = j.at("T").get<int>();
  if (!j.at("certificate").is_null()) {
    r.has_certificate = true;
    r.certificate = certificate_from_json(j.at("certificate"));
  }
  for (const auto& s : j.at("scenarios")) {
    ScenarioSummary ss;
    ss.xi = s.at("xi").get<std::vector<double>>();
    ss.T = s.at("T").get<int>();
    ss.steps = s.at("steps").get<Index>();
    ss.converged = s.at("converged").get<bool>();
    ss.cost_lo = s.at("cost_lo").get<double>();
    ss.cost_hi = s.at("cost_hi").get<double>();
    ss.beta_lo = s.at("beta_lo").get<double>();
    ss.beta_hi = s.at("beta_hi").get<double>();
    ss.beta_bound = s.at("beta_bound").get<double>();
    ss.envelope_violations = s.at("envelope_violations").get<Index>();
    ss.decrease_violations = s.at("decrease_violations").get<Index>();
    r.scenarios.push_back(std::move(ss));
  }
  for (const auto& c : j.at("checks")) {
    r.checks.push_back({c.at("name").get<std::string>(),
                        c.at("passed").get<bool>(),
                        c.at("detail").get<std::string>()});
  }
  r.elapsed_ms = j.at("elapsed_ms").get<double>();
  return r;
}

void write_lifted_csv(std::ostream& os, const ClosedLoopReport& rep) {
  if (rep.x.empty()) return;
  const auto n = rep.x.front().size();
  const auto p = rep.u.empty() ? 0 : rep.u.front().size();
  os << "t";
  for (Eigen::Index i = 0; i < n; ++i) os << ",x" << i;
  for (Eigen::Index i = 0; i < p; ++i) os << ",u" << i;
  os << ",stage,W\n";
  for (std::size_t t = 0; t < rep.x.size(); ++t) {
    os << t;
    for (Eigen::Index i = 0; i < n; ++i) os << "," << fmt_double(rep.x[t](i));
    for (Eigen::Index i = 0; i < p; ++i) {
      os << ",";
      if (t < rep.u.size()) os << fmt_double(rep.u[t](i));
    }
    os << ",";
    if (t < rep.stage.size()) os << fmt_double(rep.stage[t]);
    os << "," << fmt_double(rep.W[t]) << "\n";
  }
}

void write_base_csv(std::ostream& os, const LiftedProblem& lp,
                    const ClosedLoopReport& rep, const BaseTrajectory& bt) {
  if (bt.x.empty()) return;
  const ProblemData& pd = lp.base();
  const int n = pd.n(), m = pd.m(), d = lp.d();
  os << "k";
  for (int i = 0; i < n; ++i) os << ",x" << i;
  for (int i = 0; i < m; ++i) os << ",u" << i;
  os << ",stage,W\n";
  for (std::size_t k = 0; k < bt.x.size(); ++k) {
    os << k;
    for (int i = 0; i < n; ++i) os << "," << fmt_double(bt.x[k](i));
    const bool has_u = k < bt.u.size();
    for (int i = 0; i < m; ++i) {
      os << ",";
      if (has_u) os << fmt_double(bt.u[k](i));
    }
    os << ",";
    if (has_u) {
      const auto kk = static_cast<Index>(k);
      os << fmt_double(bt.x[k].dot(pd.Q(kk) * bt.x[k]) +
                       bt.u[k].dot(pd.R(kk) * bt.u[k]));
    }
    os << ",";
    if (k % static_cast<std::size_t>(d) == 0 &&
        k / static_cast<std::size_t>(d) < rep.W.size()) {
      os << fmt_double(rep.W[k / static_cast<std::size_t>(d)]);
    }
    os << "\n";
  }
}

}  // namespace rhlqr
