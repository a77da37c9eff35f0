#include "solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "analysis.hpp"
#include "error.hpp"

namespace dsg {

void Safeguards::validate() const {
  if (!(sigma_min > 0.0) || !(sigma_min <= sigma_max) || !std::isfinite(sigma_max)) {
    throw Error(ErrorCode::kInvalidArgument, "safeguards: require 0 < sigma_min <= sigma_max < inf");
  }
}

const char* to_string(StepRule rule) {
  switch (rule) {
    case StepRule::kNeighborSecant: return "neighbor-secant";
    case StepRule::kUnitAnchor: return "unit-anchor";
    case StepRule::kSecantFit: return "secant-fit";
  }
  return "?";
}

std::optional<StepRule> parse_step_rule(std::string_view name) {
  for (auto r : {StepRule::kNeighborSecant, StepRule::kUnitAnchor, StepRule::kSecantFit})
    if (name == to_string(r)) return r;
  return std::nullopt;
}

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::kConverged: return "converged";
    case RunStatus::kMaxIterations: return "max-iters";
    case RunStatus::kDiverged: return "diverged";
  }
  return "?";
}

std::optional<int> Trace::iterations_to(double target) const {
  for (const auto& r : records)
    if (r.rel_error <= target) return r.k;
  return std::nullopt;
}

Observer History::recorder() {
  return [this](const IterationView& v) {
    snapshots.push_back({Vector(v.x.begin(), v.x.end()), Vector(v.aux.begin(), v.aux.end()),
                         Vector(v.grad.begin(), v.grad.end()), Vector(v.sigma.begin(), v.sigma.end())});
  };
}

std::optional<double> bb_coefficient(std::span<const double> s, std::span<const double> y) {
  const double ss = dot(s, s);
  if (!(ss >= 1e-300)) return std::nullopt;
  return dot(s, y) / ss;
}

double safeguard(std::optional<double> v, const Safeguards& g, double fallback) {
  if (!v || !std::isfinite(*v)) return fallback;
  return std::clamp(*v, g.sigma_min, g.sigma_max);
}

Vector dsg_coefficients(const MixingMatrix& m, std::span<const double> s, std::span<const double> y,
                        std::span<const double> prev_sigma, std::size_t d, const Safeguards& g,
                        StepRule rule) {
  const std::size_t n = m.size();
  if (s.size() != n * d || y.size() != n * d || prev_sigma.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "dsg_coefficients: inconsistent sizes");
  }
  Vector sigma(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto si = s.subspan(i * d, d);
    const double ss = dot(si, si);
    if (!(ss >= 1e-300)) {
      sigma[i] = prev_sigma[i];
      continue;
    }
    double raw = dot(si, y.subspan(i * d, d)) / ss;
    for (std::size_t j : m.closed_neighborhood(i)) {
      const double wij = m(i, j);
      switch (rule) {
        case StepRule::kNeighborSecant:
          raw += wij * (prev_sigma[i] - dot(si, y.subspan(j * d, d)) / ss);
          break;
        case StepRule::kUnitAnchor:
          raw += wij * (1.0 - dot(si, y.subspan(j * d, d)) / ss);
          break;
        case StepRule::kSecantFit:
          raw += prev_sigma[i] * wij * (1.0 - dot(si, s.subspan(j * d, d)) / ss);
          break;
      }
    }
    sigma[i] = safeguard(raw, g, prev_sigma[i]);
  }
  return sigma;
}

namespace {

bool diverged(std::span<const double> x) {
  double sq = 0.0;
  for (double v : x) {
    if (!std::isfinite(v)) return true;
    sq += v * v;
  }
  return !(std::sqrt(sq) <= kDivergenceBound);
}

void fill_steps(TraceRecord& rec, std::span<const double> sigma) {
  rec.step_min = std::numeric_limits<double>::infinity();
  rec.step_max = 0.0;
  double total = 0.0;
  for (double s : sigma) {
    const double step = 1.0 / s;
    rec.step_min = std::min(rec.step_min, step);
    rec.step_max = std::max(rec.step_max, step);
    total += step;
  }
  rec.step_mean = total / static_cast<double>(sigma.size());
}

enum class Scheme { kTracking, kPrimalDual, kPlain };

struct StepPolicy {
  bool adaptive = false;
  double constant_sigma = 1.0;  // used when !adaptive
  DsgParams params;
};

Trace run_distributed(std::string name, const CostEnsemble& e, const MixingMatrix& m, Scheme scheme,
                      const StepPolicy& policy, std::span<const double> x0, const RunOptions& opts) {
  const std::size_t n = e.node_count();
  const std::size_t d = e.d;
  if (m.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "mixing matrix size " + std::to_string(m.size()) +
                                                   " differs from node count " + std::to_string(n));
  }
  if (x0.size() != n * d) throw Error(ErrorCode::kDimensionMismatch, "x0 must have n*d entries");
  if (opts.max_iters < 0) throw Error(ErrorCode::kInvalidArgument, "max_iters must be >= 0");
  if (policy.adaptive) {
    policy.params.guards.validate();
    if (!policy.params.guards.contains(policy.params.sigma_init)) {
      throw Error(ErrorCode::kInvalidArgument, "sigma_init must lie in [sigma_min, sigma_max]");
    }
  }

  const bool has_ref = norm(e.y_star) > 0.0;
  const std::size_t len = n * d;
  Vector x(x0.begin(), x0.end());
  Vector grad(len), aux(len, 0.0);
  stacked_gradient(e, x, grad);
  if (scheme == Scheme::kTracking) aux = grad;
  Vector sigma(n, policy.adaptive ? policy.params.sigma_init : policy.constant_sigma);
  Vector step(n);

  Vector x_next(len), grad_next(len), aux_next(len), mixed(len), s(len), y(len);
  Trace trace;
  trace.algorithm = std::move(name);

  for (int k = 0;; ++k) {
    TraceRecord rec;
    rec.k = k;
    rec.rel_error = has_ref ? relative_error(x, e.y_star)
                            : std::numeric_limits<double>::quiet_NaN();
    fill_steps(rec, sigma);
    Vector total(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) axpy(1.0, std::span<const double>(grad).subspan(i * d, d), total);
    rec.grad_norm = norm(total);
    trace.records.push_back(rec);
    if (opts.observer) {
      opts.observer({k, d, x, scheme == Scheme::kPlain ? std::span<const double>{} : aux, grad, sigma});
    }

    if (diverged(x)) {
      trace.status = RunStatus::kDiverged;
      break;
    }
    if (opts.tol > 0.0 && rec.rel_error <= opts.tol) {
      trace.status = RunStatus::kConverged;
      break;
    }
    if (k >= opts.max_iters) {
      trace.status = RunStatus::kMaxIterations;
      break;
    }

    for (std::size_t i = 0; i < n; ++i) step[i] = 1.0 / sigma[i];
    mix_into(m, x, d, x_next);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < d; ++c) {
        const std::size_t idx = i * d + c;
        switch (scheme) {
          case Scheme::kTracking: x_next[idx] -= step[i] * aux[idx]; break;
          case Scheme::kPrimalDual: x_next[idx] -= step[i] * (grad[idx] + aux[idx]); break;
          case Scheme::kPlain: x_next[idx] -= step[i] * grad[idx]; break;
        }
      }
    }
    stacked_gradient(e, x_next, grad_next);
    if (scheme == Scheme::kTracking) {
      mix_into(m, aux, d, aux_next);
      for (std::size_t idx = 0; idx < len; ++idx) aux_next[idx] += grad_next[idx] - grad[idx];
    } else if (scheme == Scheme::kPrimalDual) {
      mix_into(m, aux, d, aux_next);
      mix_into(m, grad, d, mixed);
      for (std::size_t idx = 0; idx < len; ++idx) aux_next[idx] += mixed[idx] - grad[idx];
    }
    if (policy.adaptive) {
      for (std::size_t idx = 0; idx < len; ++idx) {
        s[idx] = x_next[idx] - x[idx];
        y[idx] = grad_next[idx] - grad[idx];
      }
      sigma = dsg_coefficients(m, s, y, sigma, d, policy.params.guards, policy.params.rule);
    }
    x.swap(x_next);
    grad.swap(grad_next);
    aux.swap(aux_next);
  }
  trace.final_x = std::move(x);
  return trace;
}

double inverse_step(double alpha, const char* who) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::kInvalidArgument, std::string(who) + ": alpha must be positive");
  }
  return 1.0 / alpha;
}

}  // namespace

SgResult run_centralized_sg(const GradientFn& grad_fn, Vector x0, double sigma0, const Safeguards& g,
                            const RunOptions& opts, std::optional<Vector> y_star) {
  g.validate();
  if (!g.contains(sigma0)) throw Error(ErrorCode::kInvalidArgument, "sigma0 must lie in [sigma_min, sigma_max]");
  const std::size_t d = x0.size();
  const double ref = y_star ? norm(*y_star) : 0.0;

  Vector x = std::move(x0);
  Vector grad(d), x_next(d), grad_next(d), s(d), y(d);
  grad_fn(x, grad);
  double sigma = sigma0;
  Trace trace;
  trace.algorithm = "centralized-sg";

  for (int k = 0;; ++k) {
    TraceRecord rec;
    rec.k = k;
    if (y_star && ref > 0.0) {
      Vector diff = x;
      axpy(-1.0, *y_star, diff);
      rec.rel_error = norm(diff) / ref;
    } else {
      rec.rel_error = std::numeric_limits<double>::quiet_NaN();
    }
    rec.step_min = rec.step_mean = rec.step_max = 1.0 / sigma;
    rec.grad_norm = norm(grad);
    trace.records.push_back(rec);
    if (opts.observer) {
      const double sig[1] = {sigma};
      opts.observer({k, d, x, {}, grad, sig});
    }
    if (diverged(x)) {
      trace.status = RunStatus::kDiverged;
      break;
    }
    if (opts.tol > 0.0 && rec.grad_norm <= opts.tol) {
      trace.status = RunStatus::kConverged;
      break;
    }
    if (k >= opts.max_iters) {
      trace.status = RunStatus::kMaxIterations;
      break;
    }
    for (std::size_t c = 0; c < d; ++c) x_next[c] = x[c] - grad[c] / sigma;
    grad_fn(x_next, grad_next);
    for (std::size_t c = 0; c < d; ++c) {
      s[c] = x_next[c] - x[c];
      y[c] = grad_next[c] - grad[c];
    }
    sigma = safeguard(bb_coefficient(s, y), g, sigma);
    x.swap(x_next);
    grad.swap(grad_next);
  }
  trace.final_x = x;
  return {std::move(trace), std::move(x)};
}

Trace run_dsg_form_a(const CostEnsemble& e, const MixingMatrix& m, const DsgParams& p,
                     std::span<const double> x0, const RunOptions& opts) {
  return run_distributed("dsg", e, m, Scheme::kTracking, {true, 0.0, p}, x0, opts);
}

Trace run_dsg_form_b(const CostEnsemble& e, const MixingMatrix& m, const DsgParams& p,
                     std::span<const double> x0, const RunOptions& opts) {
  return run_distributed("dsg-pd", e, m, Scheme::kPrimalDual, {true, 0.0, p}, x0, opts);
}

Trace run_gradient_tracking(const CostEnsemble& e, const MixingMatrix& m, double alpha,
                            std::span<const double> x0, const RunOptions& opts) {
  const double sigma = inverse_step(alpha, "gradient tracking");
  return run_distributed("tracking", e, m, Scheme::kTracking, {false, sigma, {}}, x0, opts);
}

Trace run_dgd(const CostEnsemble& e, const MixingMatrix& m, double alpha, std::span<const double> x0,
              const RunOptions& opts) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::kInvalidArgument, "dgd: alpha must be nonnegative");
  }
  const double sigma = alpha > 0.0 ? 1.0 / alpha : std::numeric_limits<double>::infinity();
  return run_distributed("dgd", e, m, Scheme::kPlain, {false, sigma, {}}, x0, opts);
}

}  // namespace dsg
