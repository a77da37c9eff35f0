#include <doctest.h>

#include <cmath>

#include "analysis.hpp"
#include "error.hpp"
#include "mixing.hpp"
#include "network.hpp"
#include "solvers.hpp"

using namespace dsg;

namespace {

QuadraticCost scaled_identity(std::size_t d, double a, Vector b) {
  Matrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) m(i, i) = a;
  return {m, std::move(b)};
}

Vector consensus(const Vector& y, std::size_t n) {
  Vector x;
  for (std::size_t i = 0; i < n; ++i) x.insert(x.end(), y.begin(), y.end());
  return x;
}

}  // namespace

TEST_CASE("spectral coefficient") {
  CHECK(*bb_coefficient(Vector{1, 1}, Vector{3, 3}) == 3.0);
  CHECK_FALSE(bb_coefficient(Vector{0, 0}, Vector{3, 3}).has_value());

  Matrix a(3, 3);
  a(0, 0) = 2;
  a(1, 1) = 5;
  a(2, 2) = 9;
  a(0, 1) = a(1, 0) = 1;
  for (const Vector& s : {Vector{1, 0, 0}, Vector{1, -2, 3}, Vector{0.1, 7, -1}}) {
    const double c = *bb_coefficient(s, a * std::span<const double>(s));
    const auto eig = symmetric_eigen(a);
    CHECK(c >= eig.values.back() - 1e-12);
    CHECK(c <= eig.values.front() + 1e-12);
  }
}

TEST_CASE("safeguard projection") {
  const Safeguards g{1.0, 2.0};
  CHECK(safeguard(5.0, g, 1.7) == 2.0);
  CHECK(safeguard(1.5, g, 1.7) == 1.5);
  CHECK(safeguard(std::nullopt, g, 1.7) == 1.7);
  CHECK(safeguard(0.1, g, 1.7) == 1.0);
  CHECK_THROWS_AS((Safeguards{2.0, 1.0}.validate()), Error);
  CHECK_THROWS_AS((Safeguards{0.0, 1.0}.validate()), Error);
}

TEST_CASE("step rules on collinear secant pairs") {
  const auto m = build_max_degree_weights(ring_graph(5));
  const Safeguards g{1e-3, 1e3};
  Vector s(5), y(5);
  for (std::size_t i = 0; i < 5; ++i) {
    s[i] = 1.0;
    y[i] = 4.0;  // y_j = c s_i with c = 4
  }
  const Vector prev(5, 2.5);
  for (double v : dsg_coefficients(m, s, y, prev, 1, g, StepRule::kUnitAnchor)) CHECK(v == doctest::Approx(1.0));
  for (double v : dsg_coefficients(m, s, y, prev, 1, g, StepRule::kNeighborSecant)) CHECK(v == doctest::Approx(2.5));
}

TEST_CASE("step rule on a single node") {
  const auto m = build_max_degree_weights(Graph(1, {}));
  const Safeguards g{1e-3, 1e3};
  const Vector s{0.5, 1.0}, y{1.0, 7.0};
  CHECK(dsg_coefficients(m, s, y, Vector{9.0}, 2, g, StepRule::kUnitAnchor)[0] == doctest::Approx(1.0));
  CHECK(dsg_coefficients(m, s, y, Vector{9.0}, 2, g, StepRule::kNeighborSecant)[0] == doctest::Approx(9.0));
}

TEST_CASE("zero displacement keeps the previous coefficient") {
  const auto m = build_max_degree_weights(path_graph(3));
  const Vector s{0.0, 1.0, 1.0}, y{1.0, 2.0, 2.0};
  const Vector prev{4.2, 1.0, 1.0};
  for (auto rule : {StepRule::kNeighborSecant, StepRule::kUnitAnchor, StepRule::kSecantFit}) {
    CHECK(dsg_coefficients(m, s, y, prev, 1, {1e-3, 1e3}, rule)[0] == 4.2);
  }
}

TEST_CASE("step rule names") {
  for (auto r : {StepRule::kNeighborSecant, StepRule::kUnitAnchor, StepRule::kSecantFit}) {
    CHECK(parse_step_rule(to_string(r)) == r);
  }
  CHECK_FALSE(parse_step_rule("bogus").has_value());
}

TEST_CASE("centralized SG: scaled identity is solved at k = 2") {
  const double a = 7.0;
  const Vector b{1, -2, 3};
  const GradientFn grad = [&](std::span<const double> x, std::span<double> g) {
    for (std::size_t k = 0; k < 3; ++k) g[k] = a * (x[k] - b[k]);
  };
  History h;
  RunOptions opts;
  opts.max_iters = 2;
  opts.observer = h.recorder();
  const auto r = run_centralized_sg(grad, Vector{0, 0, 0}, 1.0, {1e-8, 1e8}, opts, b);
  REQUIRE(h.snapshots.size() == 3);
  CHECK(h.snapshots[1].sigma[0] == doctest::Approx(a).epsilon(1e-15));
  for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(r.x[k] - b[k]) <= 1e-14);
}

TEST_CASE("centralized SG: coefficients stay inside the Hessian spectrum") {
  const auto e = generate_quadratic_ensemble(1, 8, 3);
  const auto& q = std::get<QuadraticCost>(e.costs[0]);
  History h;
  RunOptions opts;
  opts.max_iters = 40;
  opts.observer = h.recorder();
  const GradientFn grad = [&](std::span<const double> x, std::span<double> g) { gradient_into(q, x, g); };
  run_centralized_sg(grad, Vector(8, 0.0), e.l, {1e-3, 1e3}, opts);
  for (std::size_t k = 1; k < h.snapshots.size(); ++k) {
    CHECK(h.snapshots[k].sigma[0] >= e.mu - 1e-9);
    CHECK(h.snapshots[k].sigma[0] <= e.l + 1e-9);
  }
}

TEST_CASE("fixed point: identical costs started at the minimizer") {
  const std::size_t n = 6;
  std::vector<Cost> costs(n, Cost{scaled_identity(2, 3.0, {1.0, 2.0})});
  const auto e = make_ensemble(std::move(costs));
  const auto w = build_max_degree_weights(ring_graph(n));
  const Vector x0 = consensus(e.y_star, n);
  RunOptions opts;
  opts.max_iters = 20;
  for (const auto& t : {run_dsg_form_a(e, w, {{1.0, 10.0}, 5.0}, x0, opts),
                        run_dsg_form_b(e, w, {{1.0, 10.0}, 5.0}, x0, opts),
                        run_gradient_tracking(e, w, 0.1, x0, opts)}) {
    CHECK(t.final_x == x0);
    CHECK(t.records.back().rel_error == 0.0);
  }
}

TEST_CASE("DSG degenerates to tracking when the safeguards pin the step") {
  const auto e = generate_quadratic_ensemble(10, 3, 12);
  const auto w = build_max_degree_weights(ring_graph(10));
  const double alpha = 1.0 / (3.0 * e.l);
  RunOptions opts;
  opts.max_iters = 150;
  const Vector x0(30, 0.0);
  const auto d = run_dsg_form_a(e, w, {{1.0 / alpha, 1.0 / alpha}, 1.0 / alpha}, x0, opts);
  const auto t = run_gradient_tracking(e, w, alpha, x0, opts);
  REQUIRE(d.records.size() == t.records.size());
  Vector diff = d.final_x;
  axpy(-1.0, t.final_x, diff);
  CHECK(norm(diff) <= 1e-12 * std::max(1.0, norm(t.final_x)));
  for (std::size_t k = 0; k < d.records.size(); ++k) CHECK(d.records[k].rel_error == t.records[k].rel_error);
}

TEST_CASE("tracking converges with 1/(3L) and diverges with 10/(3L)") {
  const Graph g = generate_rgg(30, default_rgg_radius(30), 1);
  const auto w = build_max_degree_weights(g);
  const auto e = generate_quadratic_ensemble(30, 10, 1);
  RunOptions opts;
  opts.max_iters = 3000;
  opts.tol = 1e-3;
  const Vector x0(300, 0.0);
  CHECK(run_gradient_tracking(e, w, 1.0 / (3.0 * e.l), x0, opts).status == RunStatus::kConverged);
  CHECK(run_gradient_tracking(e, w, 10.0 / (3.0 * e.l), x0, opts).status == RunStatus::kDiverged);
  CHECK_THROWS_AS(run_gradient_tracking(e, w, 0.0, x0, opts), Error);
}

TEST_CASE("DGD: zero step averages, small step plateaus while DSG decays") {
  const std::size_t n = 8;
  const auto w = build_max_degree_weights(ring_graph(n));
  const auto e = generate_quadratic_ensemble(n, 2, 5);
  Vector x0(n * 2);
  for (std::size_t k = 0; k < x0.size(); ++k) x0[k] = static_cast<double>(k);
  RunOptions opts;
  opts.max_iters = 400;
  const auto avg = run_dgd(e, w, 0.0, x0, opts);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(avg.final_x[i * 2] == doctest::Approx(7.0).epsilon(1e-8));
    CHECK(avg.final_x[i * 2 + 1] == doctest::Approx(8.0).epsilon(1e-8));
  }

  const Vector zero(n * 2, 0.0);
  opts.max_iters = 3000;
  const auto dgd = run_dgd(e, w, 1.0 / (3.0 * e.l), zero, opts);
  const auto dsg = run_dsg_form_a(e, w, {{0.3 * e.l, 1e8}, 3.0 * e.l}, zero, opts);
  const double plateau = dgd.records.back().rel_error;
  CHECK(plateau > 1e-4);
  CHECK(std::abs(dgd.records[2500].rel_error - plateau) < 1e-3 * plateau);
  CHECK(dsg.records.back().rel_error < 1e-3 * plateau);
}

TEST_CASE("DGD with identical costs is centralized gradient descent") {
  const std::size_t n = 4;
  const QuadraticCost q = scaled_identity(1, 2.0, {3.0});
  std::vector<Cost> costs(n, Cost{q});
  const auto e = make_ensemble(std::move(costs));
  const auto w = build_max_degree_weights(ring_graph(n));
  RunOptions opts;
  opts.max_iters = 5;
  const auto t = run_dgd(e, w, 0.1, Vector(n, 1.0), opts);
  double y = 1.0;
  for (int k = 0; k < 5; ++k) y -= 0.1 * 2.0 * (y - 3.0);
  for (double v : t.final_x) CHECK(v == doctest::Approx(y).epsilon(1e-14));
}

TEST_CASE("trace records and stopping") {
  const auto e = generate_quadratic_ensemble(5, 2, 2);
  const auto w = build_max_degree_weights(ring_graph(5));
  RunOptions opts;
  opts.max_iters = 0;
  const auto t0 = run_dsg_form_a(e, w, {{0.3 * e.l, 1e8}, 3.0 * e.l}, Vector(10, 0.0), opts);
  CHECK(t0.records.size() == 1);
  CHECK(t0.records[0].rel_error == doctest::Approx(1.0));  // x0 = 0
  CHECK(t0.records[0].step_min == doctest::Approx(1.0 / (3.0 * e.l)));
  CHECK(t0.status == RunStatus::kMaxIterations);

  opts.max_iters = 5000;
  opts.tol = 1e-6;
  const auto t = run_dsg_form_a(e, w, {{0.3 * e.l, 1e8}, 3.0 * e.l}, Vector(10, 0.0), opts);
  CHECK(t.status == RunStatus::kConverged);
  CHECK(t.records.back().rel_error <= 1e-6);
  CHECK(t.records[t.records.size() - 2].rel_error > 1e-6);
  CHECK(t.iterations_to(1e-2).value() < t.iterations());
  CHECK_FALSE(t.iterations_to(0.0).has_value());
}

TEST_CASE("dimension mismatches are rejected") {
  const auto e = generate_quadratic_ensemble(5, 2, 2);
  const auto w = build_max_degree_weights(ring_graph(4));
  CHECK_THROWS_AS(run_dsg_form_a(e, w, {}, Vector(10, 0.0), {}), Error);
  const auto w5 = build_max_degree_weights(ring_graph(5));
  CHECK_THROWS_AS(run_dsg_form_a(e, w5, {}, Vector(9, 0.0), {}), Error);
  CHECK_THROWS_AS(run_dsg_form_a(e, w5, {{2.0, 1.0}, 1.5}, Vector(10, 0.0), {}), Error);
}
