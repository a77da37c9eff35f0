#include <doctest.h>

#include <cmath>

#include "analysis.hpp"
#include "error.hpp"
#include "mixing.hpp"
#include "network.hpp"
#include "rng.hpp"

using namespace dsg;

namespace {

Trace synthetic(std::function<double(int)> err, int count) {
  Trace t;
  for (int k = 0; k < count; ++k) t.records.push_back({k, err(k), 0, 0, 0, 0});
  return t;
}

CostEnsemble scalar_ensemble(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  std::vector<Cost> costs;
  for (std::size_t i = 0; i < n; ++i) {
    costs.emplace_back(QuadraticCost{Matrix(1, 1, rng.uniform(1.0, 10.0)), Vector{rng.uniform(-5.0, 5.0)}});
  }
  return make_ensemble(std::move(costs));
}

}  // namespace

TEST_CASE("relative error") {
  const Vector y{1, 0};
  CHECK(relative_error(Vector{1, 0, 1, 0}, y) == 0.0);
  CHECK(relative_error(Vector{1, 0, 3, 0}, y) == 1.0);
  CHECK(relative_error(Vector{2, 0, 2, 0}, y) == 1.0);
  CHECK_THROWS_AS(relative_error(Vector{1, 1}, Vector{0, 0}), Error);
  CHECK_THROWS_AS(relative_error(Vector{1, 1, 1}, y), Error);
}

TEST_CASE("error decomposition") {
  const auto e = generate_quadratic_ensemble(4, 3, 6);
  Vector z{1, 2, 3};
  Vector x;
  for (int i = 0; i < 4; ++i) x.insert(x.end(), z.begin(), z.end());
  const Vector u(12, 0.0);
  auto d = decompose_error(x, u, e);
  for (double v : d.x_tilde) CHECK(v == 0.0);
  for (std::size_t c = 0; c < 3; ++c) CHECK(d.e_bar[c] == doctest::Approx(z[c] - e.y_star[c]));

  Vector star;
  for (int i = 0; i < 4; ++i) star.insert(star.end(), e.y_star.begin(), e.y_star.end());
  d = decompose_error(star, u, e);
  for (double v : d.e) CHECK(v == 0.0);
  for (double v : d.x_tilde) CHECK(std::abs(v) < 1e-14);
  for (double v : d.e_bar) CHECK(std::abs(v) < 1e-14);

  Rng rng(3);
  for (auto& v : x) v = rng.gaussian();
  d = decompose_error(x, u, e);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t c = 0; c < 3; ++c) CHECK(std::abs(d.e[i * 3 + c] - d.x_tilde[i * 3 + c] - d.e_bar[c]) < 1e-12);
}

TEST_CASE("SG recursion: scaled identity and eigenvector start") {
  const double a = 4.0;
  Matrix h = Matrix::identity(3);
  for (std::size_t i = 0; i < 3; ++i) h(i, i) = a;
  const Vector minimizer{1, 1, 1};
  const GradientFn grad = [&](std::span<const double> x, std::span<double> g) {
    for (std::size_t k = 0; k < 3; ++k) g[k] = a * (x[k] - minimizer[k]);
  };
  History hist;
  RunOptions opts;
  opts.max_iters = 2;
  opts.observer = hist.recorder();
  run_centralized_sg(grad, Vector{0, 0, 0}, 2.0, {1e-3, 1e3}, opts);
  CHECK(verify_sg_recursion(hist, h, minimizer) == 0.0);
  CHECK(hist.snapshots[2].x == minimizer);

  // Diagonal Hessian, error along an eigenvector: e1 = (1 - lambda / sigma0) e0.
  Matrix diag(2, 2);
  diag(0, 0) = 2.0;
  diag(1, 1) = 9.0;
  const GradientFn g2 = [&](std::span<const double> x, std::span<double> g) {
    g[0] = 2.0 * x[0];
    g[1] = 9.0 * x[1];
  };
  History h2;
  opts.max_iters = 1;
  opts.observer = h2.recorder();
  run_centralized_sg(g2, Vector{0.0, 3.0}, 12.0, {1e-3, 1e3}, opts);
  CHECK(h2.snapshots[1].x[0] == 0.0);
  CHECK(h2.snapshots[1].x[1] == (1.0 - 9.0 / 12.0) * 3.0);
}

TEST_CASE("SG recursion on random SPD quadratics") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto e = generate_quadratic_ensemble(1, 10, seed);
    const auto& q = std::get<QuadraticCost>(e.costs[0]);
    History h;
    RunOptions opts;
    opts.max_iters = 50;
    opts.observer = h.recorder();
    const GradientFn grad = [&](std::span<const double> x, std::span<double> g) { gradient_into(q, x, g); };
    run_centralized_sg(grad, Vector(10, 0.0), e.l, {e.mu, e.l}, opts);
    CHECK(verify_sg_recursion(h, q.a, q.b) <= 1e-10);
  }
}

TEST_CASE("DSG recursion") {
  const auto w = build_max_degree_weights(ring_graph(5));
  RunOptions opts;
  opts.max_iters = 100;

  SUBCASE("zero error stays zero") {
    // common minimizer, so grad F(x*) = 0 and the dual error starts at zero too
    std::vector<Cost> costs;
    for (double h : {1.0, 2.0, 4.0, 7.0, 9.0}) costs.emplace_back(QuadraticCost{Matrix(1, 1, h), Vector{3.0}});
    const auto e = make_ensemble(std::move(costs));
    History h;
    opts.observer = h.recorder();
    run_dsg_form_b(e, w, {{1.0, 100.0}, 10.0}, Vector(5, e.y_star[0]), opts);
    CHECK(verify_dsg_recursion(h, e, w) <= 1e-12);
    for (const auto& s : h.snapshots) CHECK(relative_error(s.x, e.y_star) <= 1e-12);
  }
  SUBCASE("random scalar quadratics") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const auto e = scalar_ensemble(seed, 5);
      History h;
      opts.observer = h.recorder();
      run_dsg_form_b(e, w, {{3.0, 1e8}, 30.0}, Vector(5, 0.0), opts);
      CHECK(verify_dsg_recursion(h, e, w) <= 1e-10);
    }
  }
  SUBCASE("constant safeguards give a constant recursion matrix") {
    const auto e = scalar_ensemble(9, 5);
    History h;
    opts.observer = h.recorder();
    run_dsg_form_b(e, w, {{20.0, 20.0}, 20.0}, Vector(5, 0.0), opts);
    for (const auto& s : h.snapshots)
      for (double v : s.sigma) CHECK(v == 20.0);
    CHECK(verify_dsg_recursion(h, e, w) <= 1e-10);
  }
  SUBCASE("rejects unsupported instances") {
    History h;
    CHECK_THROWS_AS(verify_dsg_recursion(h, generate_quadratic_ensemble(5, 2, 1), w), Error);
  }
}

TEST_CASE("safeguard diagnostic") {
  auto r = check_safeguards(1.0, 1.0, 0.5, -0.2, {10.0, 10.0});
  CHECK(r.d_min == 0.1);
  CHECK(r.delta == 0.0);
  CHECK(r.cond_ratio_ok);
  CHECK(r.cond_magnitude_ok);
  CHECK(r.rate_lower == doctest::Approx(0.9));
  CHECK_FALSE(r.rate_interval_empty);

  r = check_safeguards(1.0, 10.0, 0.5, -0.2, {1.0, 100.0});
  CHECK_FALSE(r.cond_ratio_ok);
  CHECK(r.rate_interval_empty);
}

TEST_CASE("rate estimate") {
  CHECK(estimate_rate(synthetic([](int k) { return std::pow(0.5, k); }, 60)) ==
        doctest::Approx(std::log(0.5)).epsilon(1e-6));
  CHECK(std::abs(estimate_rate(synthetic([](int) { return 0.3; }, 40))) < 1e-12);
  CHECK(std::isinf(estimate_rate(synthetic([](int k) { return k < 10 ? 1.0 : 0.0; }, 40))));
  CHECK_THROWS_AS(estimate_rate(synthetic([](int) { return 1.0; }, 10)), Error);
}

TEST_CASE("rate of DSG on a quadratic ensemble is negative") {
  const auto e = generate_quadratic_ensemble(20, 5, 3);
  const auto w = build_max_degree_weights(generate_rgg(20, default_rgg_radius(20), 3));
  RunOptions opts;
  opts.max_iters = 2000;
  opts.tol = 1e-8;
  const auto t = run_dsg_form_a(e, w, {{0.3 * e.l, 1e8}, 3.0 * e.l}, Vector(100, 0.0), opts);
  CHECK(estimate_rate(t) < 0.0);
}

TEST_CASE("oracle suite passes") {
  for (const auto& r : run_oracle_suite()) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.passed);
  }
}
