#pragma once

namespace rhlqr {

/// Numerical thresholds shared by the library. Relative unless noted.
struct Tolerances {
  double sym_tol = 1e-10;     // ||M - M'||_2 <= sym_tol * ||M||_2
  double psd_tol = 1e-9;      // lambda_min >= -psd_tol * ||M||_2
  double rtol = 1e-8;         // round-trip checks
  double inv_tol = 1e-10;     // absolute floor on sigma_min(A_k)
  double margin_tol = 1e-10;  // absolute floor on the lifted margins
};

}  // namespace rhlqr
