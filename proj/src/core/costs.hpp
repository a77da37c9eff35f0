#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "linalg.hpp"

namespace dsg {

/// f(x) = 1/2 (x - b)^T A (x - b), A symmetric positive definite.
struct QuadraticCost {
  Matrix a;
  Vector b;
};

struct LabeledSample {
  Vector features;
  double label = 1.0;  // -1 or +1
};

/// f(x) = sum_s log(1 + exp(-label_s * features_s^T x)) + reg/2 ||x||^2.
struct LogisticCost {
  std::vector<LabeledSample> samples;
  double reg = 1.0;
};

using Cost = std::variant<QuadraticCost, LogisticCost>;

std::size_t dimension(const Cost& c);
double value(const Cost& c, std::span<const double> x);
Vector gradient(const Cost& c, std::span<const double> x);
void gradient_into(const Cost& c, std::span<const double> x, std::span<double> out);

/// The n local costs of one problem instance together with their common
/// strong-convexity modulus `mu`, gradient Lipschitz constant `l`, and the
/// minimizer `y_star` of the aggregate sum_i f_i.
struct CostEnsemble {
  std::vector<Cost> costs;
  std::size_t d = 0;
  double mu = 0.0;
  double l = 0.0;
  Vector y_star;

  std::size_t node_count() const noexcept { return costs.size(); }
  bool is_quadratic() const;
};

/// Stacked gradient: block i = grad f_i(x_i).
void stacked_gradient(const CostEnsemble& e, std::span<const double> x, std::span<double> out);
/// sum_i grad f_i(y) at a single point y.
Vector aggregate_gradient(const CostEnsemble& e, std::span<const double> y);

struct QuadraticRanges {
  double b_lo = 1.0;
  double b_hi = 31.0;
  double eig_lo = 1.0;
  double eig_hi = 101.0;
};

/// Per node: b entries iid U[b_lo, b_hi]; A = Q D Q^T with D iid U[eig_lo,
/// eig_hi] on the diagonal and Q the eigenvectors of a symmetrized standard
/// Gaussian matrix. mu / l are the extreme sampled eigenvalues over all nodes.
CostEnsemble generate_quadratic_ensemble(std::size_t n, std::size_t d, std::uint64_t seed,
                                         const QuadraticRanges& ranges = {});

/// Standard Gaussian features; labels are the sign of a planted linear model
/// plus Gaussian noise, so the classes overlap.
CostEnsemble generate_logistic_ensemble(std::size_t n, std::size_t d, std::size_t samples_per_node,
                                        double reg, std::uint64_t seed);

/// Builds an ensemble from explicit costs: derives mu, l from the costs and
/// solves for y_star (closed form for quadratics, centralized spectral
/// gradient otherwise).
CostEnsemble make_ensemble(std::vector<Cost> costs);

/// Minimizer of sum_i f_i. Quadratics: direct linear solve. Logistic:
/// centralized spectral gradient until ||sum_i grad f_i|| <= tol; throws
/// kNotConverged with the final gradient norm otherwise.
Vector solve_centralized(const CostEnsemble& e, double tol = 1e-10);

/// Replayable text format:
///   dsg-ensemble 1
///   kind quadratic|logistic
///   n <n>
///   d <d>
///   mu <mu>
///   L <l>
///   y_star <d values>
///   then per node i, quadratic:  "node i", "b <d values>", d lines "a <d values>"
///                    logistic:   "node i <samples> <reg>", lines "s <label> <d values>"
/// Numbers are written with 17 significant digits so a reload is exact.
void write_ensemble(const CostEnsemble& e, std::ostream& out);
CostEnsemble read_ensemble(std::istream& in);
void save_ensemble(const CostEnsemble& e, const std::string& path);
CostEnsemble load_ensemble(const std::string& path);

}  // namespace dsg
