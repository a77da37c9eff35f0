#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "costs.hpp"
#include "linalg.hpp"
#include "mixing.hpp"

namespace dsg {

/// Bounds on the inverse step-sizes sigma. sigma_min == sigma_max is
/// accepted and pins every step to 1 / sigma_min.
struct Safeguards {
  double sigma_min = 1e-8;
  double sigma_max = 1e8;

  /// Throws kInvalidArgument unless 0 < sigma_min <= sigma_max < inf.
  void validate() const;
  bool contains(double sigma) const { return sigma >= sigma_min && sigma <= sigma_max; }
};

/// How each node turns its secant pair (s_i, y_i) and its neighbors' y_j
/// into a new inverse step-size.
enum class StepRule {
  /// s_i'y_i/s_i's_i + sum_{j in closed nbhd} w_ij (sigma_i^{k-1} - s_i'y_j/s_i's_i)
  kNeighborSecant,
  /// s_i'y_i/s_i's_i + sum_{j in closed nbhd} w_ij (1 - s_i'y_j/s_i's_i)
  kUnitAnchor,
  /// Least-squares fit of sigma s = Sigma_k (I - W) s + y:
  /// s_i'y_i/s_i's_i + sigma_i^{k-1} sum_{j in closed nbhd} w_ij (1 - s_i's_j/s_i's_i)
  kSecantFit,
};

const char* to_string(StepRule rule);
std::optional<StepRule> parse_step_rule(std::string_view name);

struct DsgParams {
  Safeguards guards{};
  double sigma_init = 1.0;
  StepRule rule = StepRule::kNeighborSecant;
};

enum class RunStatus { kConverged, kMaxIterations, kDiverged };
const char* to_string(RunStatus status);

struct TraceRecord {
  int k = 0;
  double rel_error = 0.0;
  double step_min = 0.0;
  double step_mean = 0.0;
  double step_max = 0.0;
  /// Distributed runs: ||sum_i grad f_i(x_i^k)||. Centralized: ||grad phi(x^k)||.
  double grad_norm = 0.0;
};

struct Trace {
  std::string algorithm;
  std::vector<TraceRecord> records;  // k = 0 .. iterations()
  RunStatus status = RunStatus::kMaxIterations;
  Vector final_x;

  int iterations() const { return static_cast<int>(records.size()) - 1; }
  /// First k whose relative error is <= target.
  std::optional<int> iterations_to(double target) const;
};

/// Read-only view of the solver state at iteration k, handed to observers.
/// `aux` is u^k (tracking form), v^k (primal-dual form), or empty.
/// `sigma` holds the inverse step-sizes used to leave iteration k.
struct IterationView {
  int k;
  std::size_t d;
  std::span<const double> x;
  std::span<const double> aux;
  std::span<const double> grad;
  std::span<const double> sigma;
};

using Observer = std::function<void(const IterationView&)>;

struct RunOptions {
  int max_iters = 1000;
  /// Stop when the relative error (distributed) or gradient norm
  /// (centralized) drops to tol. 0 disables early stopping.
  double tol = 0.0;
  Observer observer;
};

/// Copies of every iteration's state, for the recursion verifiers.
struct History {
  struct Snapshot {
    Vector x, aux, grad, sigma;
  };
  std::vector<Snapshot> snapshots;

  /// Observer appending to this history; the history must outlive the run.
  Observer recorder();
};

/// ||x|| above this (or any non-finite entry) ends a run as diverged.
inline constexpr double kDivergenceBound = 1e12;

/// s'y / s's, or nullopt when s's < 1e-300.
std::optional<double> bb_coefficient(std::span<const double> s, std::span<const double> y);

/// Projection onto [sigma_min, sigma_max]; `fallback` when v is missing or
/// not finite.
double safeguard(std::optional<double> v, const Safeguards& g, double fallback);

/// New inverse step-sizes for all nodes from stacked displacements s, stacked
/// gradient differences y, and the previous sigmas. Nodes whose s_i's_i
/// underflows keep their previous sigma.
Vector dsg_coefficients(const MixingMatrix& m, std::span<const double> s, std::span<const double> y,
                        std::span<const double> prev_sigma, std::size_t d, const Safeguards& g,
                        StepRule rule = StepRule::kNeighborSecant);

using GradientFn = std::function<void(std::span<const double> x, std::span<double> grad)>;

struct SgResult {
  Trace trace;
  Vector x;
};

/// Centralized spectral gradient: x^{k+1} = x^k - grad/sigma_k with the
/// safeguarded Barzilai-Borwein coefficient. When `y_star` is given the trace
/// carries ||x - y*|| / ||y*||, otherwise NaN.
SgResult run_centralized_sg(const GradientFn& grad, Vector x0, double sigma0, const Safeguards& g,
                            const RunOptions& opts, std::optional<Vector> y_star = std::nullopt);

/// DSG, tracking form: x+ = W x - Sigma^{-1} u, u+ = W u + grad F(x+) - grad F(x), u0 = grad F(x0).
Trace run_dsg_form_a(const CostEnsemble& e, const MixingMatrix& m, const DsgParams& p,
                     std::span<const double> x0, const RunOptions& opts);

/// DSG, primal-dual form: x+ = W x - Sigma^{-1}(grad F(x) + v), v+ = W v + (W - I) grad F(x), v0 = 0.
Trace run_dsg_form_b(const CostEnsemble& e, const MixingMatrix& m, const DsgParams& p,
                     std::span<const double> x0, const RunOptions& opts);

/// Constant-step gradient tracking baseline. Divergence is reported in the
/// trace status, never thrown.
Trace run_gradient_tracking(const CostEnsemble& e, const MixingMatrix& m, double alpha,
                            std::span<const double> x0, const RunOptions& opts);

/// Plain distributed gradient descent x+ = W x - alpha grad F(x). alpha = 0
/// is allowed and gives pure consensus averaging.
Trace run_dgd(const CostEnsemble& e, const MixingMatrix& m, double alpha, std::span<const double> x0,
              const RunOptions& opts);

}  // namespace dsg
