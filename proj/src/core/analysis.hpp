#pragma once

#include <span>
#include <string>
#include <vector>

#include "costs.hpp"
#include "linalg.hpp"
#include "mixing.hpp"
#include "solvers.hpp"

namespace dsg {

/// (1/n) sum_i ||x_i - y*|| / ||y*|| with n = x.size() / y*.size().
/// Throws kInvalidArgument when y* = 0.
double relative_error(std::span<const double> x, std::span<const double> y_star);

/// Splits the stacked error around x* = 1 kron y*.
struct ErrorDecomposition {
  Vector e;        // x - x*
  Vector x_tilde;  // (I - J) x, consensus violation
  Vector e_bar;    // mean block of x minus y*
  Vector u_tilde;  // u + grad F(x*)
};

ErrorDecomposition decompose_error(std::span<const double> x, std::span<const double> u,
                                   const CostEnsemble& e);

/// max_k ||e^{k+1} - (I - A / sigma_k) e^k|| / max(1, ||e^k||) over a
/// centralized SG history on a quadratic with Hessian `a` and minimizer
/// `minimizer`.
double verify_sg_recursion(const History& h, const Matrix& a, std::span<const double> minimizer);

/// Residual of the primal-dual error recursion
///   [e+; u~+] = [[W - S^-1 H, -S^-1], [(W - I) H, W - J]] [e; u~]
/// over a primal-dual DSG history (aux = v) on scalar quadratics, relative to
/// max(1, ||(e, u~)||). Throws kInvalidArgument for d != 1 or non-quadratic costs.
double verify_dsg_recursion(const History& h, const CostEnsemble& e, const MixingMatrix& m);

/// Sufficient step-size conditions for R-linear convergence, evaluated for a
/// given safeguard interval. Diagnostic only.
struct SafeguardReport {
  double d_min = 0.0;  // 1 / sigma_max
  double d_max = 0.0;  // 1 / sigma_min
  double delta = 0.0;  // d_max - d_min
  bool cond_ratio_ok = false;      // d_max / d_min < 1 + mu / L
  bool cond_magnitude_ok = false;  // d_max < (1 - lambda_2) / (mu + L)
  /// Admissible contraction factors (lower, 1); empty when lower >= 1.
  double rate_lower = 0.0;
  bool rate_interval_empty = true;
};

SafeguardReport check_safeguards(double mu, double l, double lambda2, double lambda_n, const Safeguards& g);

/// Least-squares slope of ln(rel_error) against k over the trailing
/// `tail_fraction` of the trace. Records with zero error are skipped; an
/// all-zero tail yields -infinity.
double estimate_rate(const Trace& trace, double tail_fraction = 0.5);

struct OracleResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Self-contained numerical checks of the library against independent
/// oracles (closed-form spectra, finite differences, error recursions,
/// tracking identities). Used by `dsgsim verify`.
std::vector<OracleResult> run_oracle_suite();

}  // namespace dsg
