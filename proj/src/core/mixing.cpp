#include "mixing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "error.hpp"

namespace dsg {

namespace {

[[noreturn]] void reject(const std::string& why) {
  throw Error(ErrorCode::kValidation, "mixing matrix: " + why);
}

std::string at(std::size_t i, std::size_t j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

}  // namespace

MixingMatrix::MixingMatrix(Matrix w, const Graph* graph) : w_(std::move(w)) {
  const std::size_t n = w_.rows();
  if (n == 0 || w_.cols() != n) reject("must be square and non-empty");
  if (graph && graph->node_count() != n) reject("size differs from graph node count");

  support_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double wij = w_(i, j);
      if (!std::isfinite(wij) || wij < 0.0) reject("negative or non-finite entry at " + at(i, j));
      if (wij != w_(j, i)) reject("not symmetric at " + at(i, j));
      if (i != j && graph && ((wij > 0.0) != graph->has_edge(i, j))) {
        reject("support does not match graph edges at " + at(i, j));
      }
      if (wij > 0.0 || i == j) support_[i].push_back(j);
      row_sum += wij;
    }
    if (std::abs(row_sum - 1.0) > 1e-12) reject("row " + std::to_string(i) + " does not sum to 1");
    // A single node has w_00 = 1 necessarily.
    if (n > 1 && !(w_(i, i) > 0.0 && w_(i, i) < 1.0)) {
      reject("diagonal entry " + std::to_string(i) + " outside (0,1)");
    }
  }

  if (n > 1) {
    const SymmetricEigen eig = symmetric_eigen(w_);
    if (std::abs(eig.values.front() - 1.0) > 1e-10) reject("largest eigenvalue is not 1");
    lambda2_ = eig.values[1];
    lambda_n_ = eig.values.back();
    if (!(std::abs(lambda2_) < 1.0 - 1e-10) || !(std::abs(lambda_n_) < 1.0 - 1e-10)) {
      reject("|lambda_2| or |lambda_n| is not below 1 (graph disconnected?)");
    }
  }
}

MixingMatrix build_max_degree_weights(const Graph& g) {
  if (!is_connected(g)) {
    throw Error(ErrorCode::kNotConnected, "build_max_degree_weights: graph is not connected");
  }
  const std::size_t n = g.node_count();
  const auto deg = degrees(g);
  Matrix w(n, n);
  for (const auto& [i, j] : g.edges()) {
    const double wij = 1.0 / (2.0 * (1.0 + static_cast<double>(std::max(deg[i], deg[j]))));
    w(i, j) = wij;
    w(j, i) = wij;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) off += w(i, j);
    w(i, i) = 1.0 - off;
  }
  return MixingMatrix(std::move(w), &g);
}

SpectralBounds spectral_bounds(const Matrix& symmetric) {
  if (symmetric.rows() < 2) return {0.0, 0.0};
  const SymmetricEigen eig = symmetric_eigen(symmetric);
  return {eig.values[1], eig.values.back()};
}

void mix_into(const MixingMatrix& m, std::span<const double> x, std::size_t d, std::span<double> out) {
  const std::size_t n = m.size();
  if (x.size() != n * d || out.size() != n * d) {
    throw Error(ErrorCode::kDimensionMismatch,
                "mix: expected " + std::to_string(n) + " blocks of " + std::to_string(d));
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto oi = out.subspan(i * d, d);
    std::fill(oi.begin(), oi.end(), 0.0);
    for (std::size_t j : m.closed_neighborhood(i)) {
      const double wij = m(i, j);
      const auto xj = x.subspan(j * d, d);
      for (std::size_t k = 0; k < d; ++k) oi[k] += wij * xj[k];
    }
  }
}

Vector mix(const MixingMatrix& m, std::span<const double> x, std::size_t d) {
  Vector out(x.size());
  mix_into(m, x, d, out);
  return out;
}

void write_csv(const MixingMatrix& m, std::ostream& out) {
  out << std::setprecision(17);
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) out << (j ? "," : "") << m(i, j);
    out << '\n';
  }
}

void save_csv(const MixingMatrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  write_csv(m, out);
}

}  // namespace dsg
