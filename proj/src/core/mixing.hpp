#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "network.hpp"

namespace dsg {

/// Symmetric doubly stochastic weight matrix W with its two extreme
/// non-unit eigenvalues cached. Instances are validated on construction
/// and immutable afterwards.
class MixingMatrix {
 public:
  /// Validates `w` (symmetry, unit row sums, diagonal in (0,1), unit top
  /// eigenvalue, |lambda_2|, |lambda_n| < 1). When `graph` is given, also
  /// checks that the off-diagonal support matches its edges exactly.
  explicit MixingMatrix(Matrix w, const Graph* graph = nullptr);

  std::size_t size() const noexcept { return w_.rows(); }
  const Matrix& weights() const noexcept { return w_; }
  double operator()(std::size_t i, std::size_t j) const { return w_(i, j); }
  double lambda2() const noexcept { return lambda2_; }
  double lambda_n() const noexcept { return lambda_n_; }

  /// Closed neighborhood of i: all j with w_ij > 0, i included, ascending.
  const std::vector<std::size_t>& closed_neighborhood(std::size_t i) const { return support_.at(i); }

 private:
  Matrix w_;
  double lambda2_ = 0.0;
  double lambda_n_ = 0.0;
  std::vector<std::vector<std::size_t>> support_;
};

/// w_ij = 1 / (2 (1 + max(d_i, d_j))) on edges, w_ii = 1 - sum of the row.
MixingMatrix build_max_degree_weights(const Graph& g);

struct SpectralBounds {
  double lambda2;
  double lambda_n;
};

/// Second-largest and smallest eigenvalue of any symmetric matrix
/// (Jacobi). For a 1x1 matrix both are reported as 0.
SpectralBounds spectral_bounds(const Matrix& symmetric);
inline SpectralBounds spectral_bounds(const MixingMatrix& m) { return {m.lambda2(), m.lambda_n()}; }

/// (W kron I_d) x for a stacked iterate of size() blocks of length d.
Vector mix(const MixingMatrix& m, std::span<const double> x, std::size_t d);
void mix_into(const MixingMatrix& m, std::span<const double> x, std::size_t d, std::span<double> out);

/// n rows of n comma-separated values, 17 significant digits.
void write_csv(const MixingMatrix& m, std::ostream& out);
void save_csv(const MixingMatrix& m, const std::string& path);

}  // namespace dsg
