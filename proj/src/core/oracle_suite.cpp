// Self-checks behind `dsgsim verify`. Every check compares the library
// against an independent route: closed-form spectra, finite differences,
// the linear error recursions of SG and DSG on quadratics, the update
// equations of both DSG forms, and the exact averaging identities of the
// tracking variables.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "analysis.hpp"
#include "network.hpp"
#include "rng.hpp"

namespace dsg {

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

OracleResult check(std::string name, bool ok, std::string detail) {
  return {std::move(name), ok, std::move(detail)};
}

OracleResult ring_spectrum() {
  // Ring of 4 with weights 1/3: circulant eigenvalues 1/3 + 2/3 cos(2 pi k / 4).
  Matrix w(4, 4);
  for (std::size_t i = 0; i < 4; ++i) {
    w(i, i) = 1.0 / 3.0;
    w(i, (i + 1) % 4) = 1.0 / 3.0;
    w(i, (i + 3) % 4) = 1.0 / 3.0;
  }
  const auto eig = symmetric_eigen(w);
  const double expected[4] = {1.0, 1.0 / 3.0, 1.0 / 3.0, -1.0 / 3.0};
  double err = 0.0;
  for (int k = 0; k < 4; ++k) err = std::max(err, std::abs(eig.values[k] - expected[k]));
  return check("eigensolver: ring-4 circulant spectrum", err <= 1e-10, "max deviation " + fmt(err));
}

OracleResult gradient_finite_differences() {
  const auto quad = generate_quadratic_ensemble(3, 5, 11);
  const auto logi = generate_logistic_ensemble(3, 5, 15, 0.5, 12);
  Rng rng(13);
  double worst = 0.0;
  for (const auto* ens : {&quad, &logi}) {
    for (const auto& c : ens->costs) {
      for (int trial = 0; trial < 20; ++trial) {
        Vector x(ens->d);
        for (auto& v : x) v = rng.uniform(-2.0, 2.0);
        const Vector g = gradient(c, x);
        Vector fd(ens->d);
        for (std::size_t k = 0; k < ens->d; ++k) {
          Vector xp = x, xm = x;
          xp[k] += 1e-6;
          xm[k] -= 1e-6;
          fd[k] = (value(c, xp) - value(c, xm)) / 2e-6;
        }
        Vector diff = g;
        axpy(-1.0, fd, diff);
        worst = std::max(worst, norm(diff) / std::max(1.0, norm(g)));
      }
    }
  }
  return check("costs: gradients vs central differences", worst <= 1e-5, "max relative gap " + fmt(worst));
}

OracleResult sg_recursion() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto ens = generate_quadratic_ensemble(1, 10, seed);
    const auto& q = std::get<QuadraticCost>(ens.costs[0]);
    History h;
    RunOptions opts;
    opts.max_iters = 60;
    opts.observer = h.recorder();
    const GradientFn grad = [&](std::span<const double> x, std::span<double> g) { gradient_into(q, x, g); };
    run_centralized_sg(grad, Vector(10, 0.0), ens.l, {ens.mu, ens.l}, opts);
    worst = std::max(worst, verify_sg_recursion(h, q.a, ens.y_star));
  }
  return check("centralized SG: quadratic error recursion", worst <= 1e-10, "max residual " + fmt(worst));
}

OracleResult dsg_recursion() {
  Rng rng(21);
  std::vector<Cost> costs;
  for (int i = 0; i < 5; ++i) {
    QuadraticCost q{Matrix(1, 1, rng.uniform(1.0, 10.0)), Vector{rng.uniform(1.0, 5.0)}};
    costs.emplace_back(std::move(q));
  }
  const auto ens = make_ensemble(std::move(costs));
  const auto w = build_max_degree_weights(ring_graph(5));
  History h;
  RunOptions opts;
  opts.max_iters = 100;
  opts.observer = h.recorder();
  run_dsg_form_b(ens, w, {{3.0, 1e8}, 30.0}, Vector(5, 0.0), opts);
  const double res = verify_dsg_recursion(h, ens, w);
  return check("DSG: primal-dual error recursion (d=1)", res <= 1e-10, "max residual " + fmt(res));
}

// Largest relative residual of each recorded step against the defining
// update of its form, recomputed here from the stored state.
double step_residual(const History& h, const CostEnsemble& e, const MixingMatrix& w, bool primal_dual) {
  const std::size_t d = e.d;
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < h.snapshots.size(); ++k) {
    const auto& cur = h.snapshots[k];
    const auto& nxt = h.snapshots[k + 1];
    const Vector wx = mix(w, cur.x, d);
    const Vector wa = mix(w, cur.aux, d);
    const Vector wg = mix(w, cur.grad, d);
    double res = 0.0, scale = 1.0;
    for (std::size_t idx = 0; idx < cur.x.size(); ++idx) {
      const double step = 1.0 / cur.sigma[idx / d];
      const double dir = primal_dual ? cur.grad[idx] + cur.aux[idx] : cur.aux[idx];
      const double aux = primal_dual ? wa[idx] + wg[idx] - cur.grad[idx] : wa[idx] + nxt.grad[idx] - cur.grad[idx];
      res = std::max({res, std::abs(nxt.x[idx] - (wx[idx] - step * dir)), std::abs(nxt.aux[idx] - aux)});
      scale = std::max({scale, std::abs(cur.x[idx]), std::abs(cur.aux[idx]), std::abs(cur.grad[idx])});
    }
    worst = std::max(worst, res / scale);
  }
  return worst;
}

OracleResult form_equivalence_and_identities() {
  const auto ens = generate_quadratic_ensemble(10, 3, 31);
  const auto w = build_max_degree_weights(ring_graph(10));
  const Vector x0(30, 0.0);

  auto record = [&](const DsgParams& p, History& ha, History& hb) {
    RunOptions oa, ob;
    oa.max_iters = ob.max_iters = 200;
    oa.observer = ha.recorder();
    ob.observer = hb.recorder();
    run_dsg_form_a(ens, w, p, x0, oa);
    run_dsg_form_b(ens, w, p, x0, ob);
  };

  // Pinned safeguards: both forms follow one deterministic trajectory.
  const double sigma = 3.0 * ens.l;
  History pa, pb;
  record({{sigma, sigma}, sigma}, pa, pb);
  double gap = 0.0;
  for (std::size_t k = 0; k < std::min(pa.snapshots.size(), pb.snapshots.size()); ++k) {
    Vector diff = pa.snapshots[k].x;
    axpy(-1.0, pb.snapshots[k].x, diff);
    gap = std::max(gap, norm(diff) / std::max(1e-300, norm(pa.snapshots[k].x)));
  }

  // Adaptive steps: each recorded step satisfies its own update equations,
  // and the averaging identities hold at every k.
  History ha, hb;
  record({{0.3 * ens.l, 1e8}, 3.0 * ens.l}, ha, hb);
  const double residual = std::max(step_residual(ha, ens, w, false), step_residual(hb, ens, w, true));
  double track = 0.0, dual = 0.0;
  for (const auto* h : {&ha, &hb}) {
    const bool is_b = h == &hb;
    for (const auto& s : h->snapshots) {
      double scale = 1.0;
      for (std::size_t i = 0; i < s.grad.size(); ++i) scale = std::max({scale, std::abs(s.grad[i]), std::abs(s.aux[i])});
      for (std::size_t c = 0; c < 3; ++c) {
        double ma = 0.0, mg = 0.0;
        for (std::size_t i = 0; i < 10; ++i) {
          ma += s.aux[i * 3 + c];
          mg += s.grad[i * 3 + c];
        }
        if (is_b) {
          dual = std::max(dual, std::abs(ma) / 10.0 / scale);
        } else {
          track = std::max(track, std::abs(ma - mg) / 10.0 / scale);
        }
      }
    }
  }
  const bool ok = pa.snapshots.size() == 201 && ha.snapshots.size() == 201 && gap <= 1e-9 && residual <= 1e-12 &&
                  track <= 1e-12 && dual <= 1e-12;
  return check("DSG: forms agree, updates and mean identities hold", ok,
               "pinned-step gap " + fmt(gap) + ", step residual " + fmt(residual) + ", mean(u)-mean(grad) " +
                   fmt(track) + ", mean(v) " + fmt(dual));
}

OracleResult safeguard_diagnostic() {
  const auto r = check_safeguards(1.0, 1.0, 0.5, -0.2, {10.0, 10.0});
  const bool ok = r.cond_ratio_ok && r.cond_magnitude_ok && !r.rate_interval_empty &&
                  std::abs(r.rate_lower - 0.9) <= 1e-15;
  return check("analysis: safeguard conditions on a hand-worked case", ok, "rate lower bound " + fmt(r.rate_lower));
}

}  // namespace

std::vector<OracleResult> run_oracle_suite() {
  std::vector<OracleResult> out;
  auto guarded = [&out](const char* name, OracleResult (*fn)()) {
    try {
      out.push_back(fn());
    } catch (const std::exception& ex) {
      out.push_back(check(name, false, std::string("threw: ") + ex.what()));
    }
  };
  guarded("eigensolver", ring_spectrum);
  guarded("costs", gradient_finite_differences);
  guarded("centralized SG", sg_recursion);
  guarded("DSG recursion", dsg_recursion);
  guarded("DSG forms", form_equivalence_and_identities);
  guarded("safeguards", safeguard_diagnostic);
  return out;
}

}  // namespace dsg
