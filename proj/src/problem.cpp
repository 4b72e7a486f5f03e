#include "rhlqr/problem.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "rhlqr/errors.hpp"

namespace rhlqr {
namespace {

void check_shape(const Matrix& M, Eigen::Index rows, Eigen::Index cols,
                 const char* name, std::size_t k) {
  if (M.rows() != rows || M.cols() != cols) {
    std::ostringstream os;
    os << name << "[" << k << "] has shape " << M.rows() << "x" << M.cols()
       << ", expected " << rows << "x" << cols;
    throw InputError(os.str());
  }
  if (!M.allFinite()) {
    std::ostringstream os;
    os << name << "[" << k << "] has non-finite entries";
    throw InputError(os.str());
  }
}

void check_symmetric(const Matrix& M, const char* name, std::size_t k,
                     const Tolerances& tol) {
  if (norm2(M - M.transpose()) > tol.sym_tol * std::max(norm2(M), 1e-300)) {
    std::ostringstream os;
    os << name << "[" << k << "] is not symmetric";
    throw InputError(os.str());
  }
}

}  // namespace

ProblemData::ProblemData(int n, int m, HorizonMode mode, std::vector<Matrix> A,
                         std::vector<Matrix> B, std::vector<Matrix> Q,
                         std::vector<Matrix> R, const Tolerances& tol)
    : n_(n), m_(m), mode_(mode) {
  if (n < 1 || m < 1) throw InputError("dimensions n and m must be >= 1");
  if (mode.length < 1) throw InputError("period/window length must be >= 1");
  const auto count = static_cast<std::size_t>(mode.length);
  auto check_count = [&](const std::vector<Matrix>& v, const char* name) {
    if (v.size() != count) {
      std::ostringstream os;
      os << name << " has " << v.size() << " entries, expected " << count;
      throw InputError(os.str());
    }
  };
  check_count(A, "A");
  check_count(B, "B");
  check_count(Q, "Q");
  check_count(R, "R");

  for (std::size_t k = 0; k < count; ++k) {
    check_shape(A[k], n, n, "A", k);
    check_shape(B[k], n, m, "B", k);
    check_shape(Q[k], n, n, "Q", k);
    check_shape(R[k], m, m, "R", k);
    check_symmetric(Q[k], "Q", k, tol);
    check_symmetric(R[k], "R", k, tol);
    Q[k] = symmetrize(Q[k]);
    R[k] = symmetrize(R[k]);

    const double qmin = lambda_min(Q[k]);
    if (qmin < -tol.psd_tol * std::max(sym_norm2(Q[k]), 1.0)) {
      std::ostringstream os;
      os << "Q[" << k << "] is not positive semi-definite: lambda_min = "
         << qmin;
      throw InputError(os.str());
    }
    const double rmin = lambda_min(R[k]);
    if (!(rmin > tol.psd_tol * sym_norm2(R[k]))) {
      std::ostringstream os;
      os << "R[" << k << "] is not positive definite: lambda_min = " << rmin;
      throw InputError(os.str());
    }
    Eigen::JacobiSVD<Matrix> svd(A[k]);
    const double smin = svd.singularValues()(n - 1);
    if (!(smin >= tol.inv_tol)) {
      std::ostringstream os;
      os << "A[" << k << "] is singular: sigma_min = " << smin;
      throw InputError(os.str());
    }
    bounds_.a = std::max(bounds_.a, svd.singularValues()(0));
    bounds_.b = std::max(bounds_.b, norm2(B[k]));
    bounds_.q = std::max(bounds_.q, sym_norm2(Q[k]));
    bounds_.r = std::max(bounds_.r, sym_norm2(R[k]));
    C_.push_back(psd_sqrt(Q[k]));
  }
  A_ = std::move(A);
  B_ = std::move(B);
  Q_ = std::move(Q);
  R_ = std::move(R);
}

bool ProblemData::contains(Index k) const {
  if (k < 0) return false;
  return mode_.is_periodic() || k < mode_.length;
}

Index ProblemData::resolve(Index k) const {
  if (!contains(k)) {
    std::ostringstream os;
    os << "base index " << k << " outside the data window [0, "
       << mode_.length << ")";
    throw InputError(os.str());
  }
  return mode_.is_periodic() ? k % mode_.length : k;
}

Matrix state_transition(const ProblemData& pd, Index k, int d) {
  if (d < 0) throw InputError("state_transition: depth must be >= 0");
  Matrix Theta = Matrix::Identity(pd.n(), pd.n());
  for (int i = 0; i < d; ++i) Theta = pd.A(k + i) * Theta;
  return Theta;
}

Matrix controllability_matrix(const ProblemData& pd, Index k, int d) {
  if (d < 1) throw InputError("controllability_matrix: depth must be >= 1");
  const int n = pd.n(), m = pd.m();
  Matrix C(n, m * d);
  for (int j = 0; j < d; ++j) {
    C.middleCols(j * m, m) = state_transition(pd, k + j + 1, d - j - 1) *
                             pd.B(k + j);
  }
  return C;
}

Matrix observability_matrix(const ProblemData& pd, Index k, int d) {
  if (d < 1) throw InputError("observability_matrix: depth must be >= 1");
  const int n = pd.n();
  Matrix O(n * (d + 1), n);
  Matrix Theta = Matrix::Identity(n, n);
  for (int i = 0; i <= d; ++i) {
    O.middleRows(i * n, n) = pd.C(k + i) * Theta;
    if (i < d) Theta = pd.A(k + i) * Theta;
  }
  return O;
}

int numerical_rank(const Matrix& M) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(M);
  const auto& s = svd.singularValues();
  const double thresh = static_cast<double>(std::max(M.rows(), M.cols())) *
                        std::numeric_limits<double>::epsilon() * s(0);
  return static_cast<int>((s.array() > thresh).count());
}

int find_min_d(const ProblemData& pd, int d_max) {
  if (d_max < 1) throw InputError("find_min_d: d_max must be >= 1");
  const int n = pd.n();
  Index failing_k = -1;
  for (int d = 1; d <= d_max; ++d) {
    // Window mode needs C_{k+d}, so k + d must stay inside the data.
    const Index k_end = pd.mode().is_periodic() ? pd.stored()
                                                : pd.stored() - d;
    if (k_end <= 0) {
      failing_k = 0;
      continue;
    }
    bool ok = true;
    for (Index k = 0; k < k_end && ok; ++k) {
      if (numerical_rank(controllability_matrix(pd, k, d)) < n ||
          numerical_rank(observability_matrix(pd, k, d)) < n) {
        ok = false;
        failing_k = k;
      }
    }
    if (ok) return d;
  }
  std::ostringstream os;
  os << "NoUniformD: no depth d <= " << d_max
     << " gives uniform controllability/observability (last failing k = "
     << failing_k << ")";
  throw CertificationError(os.str());
}

}  // namespace rhlqr
