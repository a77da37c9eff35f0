#include "analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>

#include "error.hpp"

namespace dsg {

double relative_error(std::span<const double> x, std::span<const double> y_star) {
  const std::size_t d = y_star.size();
  if (d == 0 || x.size() % d != 0 || x.empty()) {
    throw Error(ErrorCode::kDimensionMismatch, "relative_error: x is not a stack of y*-sized blocks");
  }
  const double ref = norm(y_star);
  if (!(ref > 0.0)) throw Error(ErrorCode::kInvalidArgument, "relative_error: undefined for y* = 0");
  const std::size_t n = x.size() / d;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double diff = x[i * d + c] - y_star[c];
      sq += diff * diff;
    }
    total += std::sqrt(sq);
  }
  return total / (static_cast<double>(n) * ref);
}

ErrorDecomposition decompose_error(std::span<const double> x, std::span<const double> u,
                                   const CostEnsemble& e) {
  const std::size_t n = e.node_count();
  const std::size_t d = e.d;
  if (x.size() != n * d || u.size() != n * d) {
    throw Error(ErrorCode::kDimensionMismatch, "decompose_error: expected n*d entries");
  }
  ErrorDecomposition out;
  Vector mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) axpy(1.0 / static_cast<double>(n), x.subspan(i * d, d), mean);

  out.e.resize(n * d);
  out.x_tilde.resize(n * d);
  out.e_bar.resize(d);
  for (std::size_t c = 0; c < d; ++c) out.e_bar[c] = mean[c] - e.y_star[c];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < d; ++c) {
      out.e[i * d + c] = x[i * d + c] - e.y_star[c];
      out.x_tilde[i * d + c] = x[i * d + c] - mean[c];
    }

  Vector x_star(n * d);
  for (std::size_t i = 0; i < n; ++i) std::copy(e.y_star.begin(), e.y_star.end(), x_star.begin() + i * d);
  out.u_tilde.resize(n * d);
  stacked_gradient(e, x_star, out.u_tilde);
  axpy(1.0, u, out.u_tilde);
  return out;
}

double verify_sg_recursion(const History& h, const Matrix& a, std::span<const double> minimizer) {
  const std::size_t d = minimizer.size();
  if (a.rows() != d || a.cols() != d) {
    throw Error(ErrorCode::kDimensionMismatch, "verify_sg_recursion: Hessian size mismatch");
  }
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < h.snapshots.size(); ++k) {
    const auto& cur = h.snapshots[k];
    const auto& nxt = h.snapshots[k + 1];
    Vector e(d), e_next(d);
    for (std::size_t c = 0; c < d; ++c) {
      e[c] = cur.x[c] - minimizer[c];
      e_next[c] = nxt.x[c] - minimizer[c];
    }
    const Vector ae = a * std::span<const double>(e);
    const double inv_sigma = 1.0 / cur.sigma.at(0);
    Vector residual(d);
    for (std::size_t c = 0; c < d; ++c) residual[c] = e_next[c] - (e[c] - inv_sigma * ae[c]);
    worst = std::max(worst, norm(residual) / std::max(1.0, norm(e)));
  }
  return worst;
}

double verify_dsg_recursion(const History& h, const CostEnsemble& e, const MixingMatrix& m) {
  if (e.d != 1) throw Error(ErrorCode::kInvalidArgument, "verify_dsg_recursion: requires d = 1");
  if (!e.is_quadratic()) throw Error(ErrorCode::kInvalidArgument, "verify_dsg_recursion: requires quadratic costs");
  const std::size_t n = e.node_count();
  if (m.size() != n) throw Error(ErrorCode::kDimensionMismatch, "verify_dsg_recursion: mixing size mismatch");

  Vector hess(n), grad_star(n);
  const double y = e.y_star[0];
  for (std::size_t i = 0; i < n; ++i) {
    const auto& q = std::get<QuadraticCost>(e.costs[i]);
    hess[i] = q.a(0, 0);
    grad_star[i] = hess[i] * (y - q.b[0]);
  }

  auto errors = [&](const History::Snapshot& s, Vector& err, Vector& dual) {
    err.resize(n);
    dual.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      err[i] = s.x.at(i) - y;
      dual[i] = s.aux.at(i) + grad_star[i];
    }
  };

  double worst = 0.0;
  Vector err, dual, err_next, dual_next;
  for (std::size_t k = 0; k + 1 < h.snapshots.size(); ++k) {
    const auto& cur = h.snapshots[k];
    errors(cur, err, dual);
    errors(h.snapshots[k + 1], err_next, dual_next);

    double dual_mean = 0.0;
    for (double v : dual) dual_mean += v;
    dual_mean /= static_cast<double>(n);

    const Vector w_err = m.weights() * std::span<const double>(err);
    const Vector w_dual = m.weights() * std::span<const double>(dual);
    Vector h_err(n);
    for (std::size_t i = 0; i < n; ++i) h_err[i] = hess[i] * err[i];
    const Vector w_h_err = m.weights() * std::span<const double>(h_err);

    double res_sq = 0.0;
    double state_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double inv_sigma = 1.0 / cur.sigma.at(i);
      const double pred_e = w_err[i] - inv_sigma * h_err[i] - inv_sigma * dual[i];
      const double pred_u = (w_h_err[i] - h_err[i]) + (w_dual[i] - dual_mean);
      res_sq += (err_next[i] - pred_e) * (err_next[i] - pred_e) +
                (dual_next[i] - pred_u) * (dual_next[i] - pred_u);
      state_sq += err[i] * err[i] + dual[i] * dual[i];
    }
    worst = std::max(worst, std::sqrt(res_sq) / std::max(1.0, std::sqrt(state_sq)));
  }
  return worst;
}

SafeguardReport check_safeguards(double mu, double l, double lambda2, double /*lambda_n*/,
                                 const Safeguards& g) {
  SafeguardReport r;
  r.d_min = 1.0 / g.sigma_max;
  r.d_max = 1.0 / g.sigma_min;
  r.delta = r.d_max - r.d_min;
  r.cond_ratio_ok = r.d_max / r.d_min < 1.0 + mu / l;
  r.cond_magnitude_ok = r.d_max < (1.0 - lambda2) / (mu + l);
  r.rate_lower = 1.0 - r.d_min * mu + r.delta * l;
  r.rate_interval_empty = !(r.rate_lower < 1.0);
  return r;
}

double estimate_rate(const Trace& trace, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "estimate_rate: tail_fraction must lie in (0,1)");
  }
  const std::size_t total = trace.records.size();
  if (total < 20) throw Error(ErrorCode::kInvalidArgument, "estimate_rate: need at least 20 records");
  const auto tail = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(total))));

  double sk = 0.0, sl = 0.0, skk = 0.0, skl = 0.0;
  std::size_t count = 0;
  for (std::size_t idx = total - tail; idx < total; ++idx) {
    const auto& r = trace.records[idx];
    if (!(r.rel_error > 0.0) || !std::isfinite(r.rel_error)) continue;
    const double k = r.k;
    const double lg = std::log(r.rel_error);
    sk += k;
    sl += lg;
    skk += k * k;
    skl += k * lg;
    ++count;
  }
  if (count == 0) return -std::numeric_limits<double>::infinity();
  if (count < 2) throw Error(ErrorCode::kInvalidArgument, "estimate_rate: fewer than two positive errors in tail");
  const double c = static_cast<double>(count);
  return (c * skl - sk * sl) / (c * skk - sk * sk);
}

}  // namespace dsg
