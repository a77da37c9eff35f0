#include "costs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "error.hpp"
#include "rng.hpp"
#include "solvers.hpp"

namespace dsg {

namespace {

void check_dim(std::size_t expected, std::size_t got) {
  if (expected != got) {
    throw Error(ErrorCode::kDimensionMismatch,
                "cost: expected dimension " + std::to_string(expected) + ", got " + std::to_string(got));
  }
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// 1 / (1 + exp(-z)).
double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double logistic_lipschitz(const LogisticCost& c, std::size_t d) {
  Matrix gram(d, d);
  for (const auto& s : c.samples)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) gram(i, j) += s.features[i] * s.features[j];
  double max_row = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < d; ++j) r += std::abs(gram(i, j));
    max_row = std::max(max_row, r);
  }
  return c.reg + 0.25 * max_row;
}

}  // namespace

std::size_t dimension(const Cost& c) {
  return std::visit(
      [](const auto& cost) -> std::size_t {
        using T = std::decay_t<decltype(cost)>;
        if constexpr (std::is_same_v<T, QuadraticCost>) {
          return cost.b.size();
        } else {
          return cost.samples.empty() ? 0 : cost.samples.front().features.size();
        }
      },
      c);
}

double value(const Cost& c, std::span<const double> x) {
  check_dim(dimension(c), x.size());
  if (const auto* q = std::get_if<QuadraticCost>(&c)) {
    Vector r(x.begin(), x.end());
    axpy(-1.0, q->b, r);
    return 0.5 * dot(r, q->a * std::span<const double>(r));
  }
  const auto& lg = std::get<LogisticCost>(c);
  double f = 0.5 * lg.reg * dot(x, x);
  for (const auto& s : lg.samples) f += softplus(-s.label * dot(s.features, x));
  return f;
}

void gradient_into(const Cost& c, std::span<const double> x, std::span<double> out) {
  const std::size_t d = dimension(c);
  check_dim(d, x.size());
  check_dim(d, out.size());
  if (const auto* q = std::get_if<QuadraticCost>(&c)) {
    for (std::size_t i = 0; i < d; ++i) {
      double s = 0.0;
      const auto row = q->a.row(i);
      for (std::size_t j = 0; j < d; ++j) s += row[j] * (x[j] - q->b[j]);
      out[i] = s;
    }
    return;
  }
  const auto& lg = std::get<LogisticCost>(c);
  for (std::size_t i = 0; i < d; ++i) out[i] = lg.reg * x[i];
  for (const auto& s : lg.samples) {
    const double weight = -s.label * logistic(-s.label * dot(s.features, x));
    axpy(weight, s.features, out);
  }
}

Vector gradient(const Cost& c, std::span<const double> x) {
  Vector g(x.size());
  gradient_into(c, x, g);
  return g;
}

bool CostEnsemble::is_quadratic() const {
  return std::all_of(costs.begin(), costs.end(),
                     [](const Cost& c) { return std::holds_alternative<QuadraticCost>(c); });
}

void stacked_gradient(const CostEnsemble& e, std::span<const double> x, std::span<double> out) {
  const std::size_t n = e.node_count();
  const std::size_t d = e.d;
  if (x.size() != n * d || out.size() != n * d) {
    throw Error(ErrorCode::kDimensionMismatch, "stacked_gradient: expected n*d entries");
  }
  for (std::size_t i = 0; i < n; ++i) gradient_into(e.costs[i], x.subspan(i * d, d), out.subspan(i * d, d));
}

Vector aggregate_gradient(const CostEnsemble& e, std::span<const double> y) {
  Vector total(e.d, 0.0);
  Vector g(e.d);
  for (const auto& c : e.costs) {
    gradient_into(c, y, g);
    axpy(1.0, g, total);
  }
  return total;
}

CostEnsemble generate_quadratic_ensemble(std::size_t n, std::size_t d, std::uint64_t seed,
                                         const QuadraticRanges& r) {
  if (n < 1 || d < 1) throw Error(ErrorCode::kInvalidArgument, "quadratic ensemble: need n, d >= 1");
  if (!(r.eig_lo > 0.0 && r.eig_lo <= r.eig_hi) || !(r.b_lo <= r.b_hi)) {
    throw Error(ErrorCode::kInvalidArgument, "quadratic ensemble: invalid sampling ranges");
  }
  Rng rng(seed);
  CostEnsemble e;
  e.d = d;
  e.mu = std::numeric_limits<double>::infinity();
  e.l = 0.0;
  for (std::size_t node = 0; node < n; ++node) {
    QuadraticCost q;
    q.b.resize(d);
    for (auto& v : q.b) v = rng.uniform(r.b_lo, r.b_hi);

    Matrix h(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) h(i, j) = rng.gaussian();
    Matrix sym(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) sym(i, j) = 0.5 * (h(i, j) + h(j, i));
    const Matrix qmat = symmetric_eigen(sym).vectors;

    Vector diag(d);
    for (auto& v : diag) {
      v = rng.uniform(r.eig_lo, r.eig_hi);
      e.mu = std::min(e.mu, v);
      e.l = std::max(e.l, v);
    }
    q.a = Matrix(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) s += qmat(i, k) * diag[k] * qmat(j, k);
        q.a(i, j) = s;
        q.a(j, i) = s;
      }
    e.costs.emplace_back(std::move(q));
  }
  e.y_star = solve_centralized(e);
  return e;
}

CostEnsemble generate_logistic_ensemble(std::size_t n, std::size_t d, std::size_t samples_per_node,
                                        double reg, std::uint64_t seed) {
  if (n < 1 || d < 1 || samples_per_node < 1) {
    throw Error(ErrorCode::kInvalidArgument, "logistic ensemble: need n, d, samples_per_node >= 1");
  }
  if (!(reg > 0.0)) throw Error(ErrorCode::kInvalidArgument, "logistic ensemble: reg must be positive");
  Rng rng(seed);
  Vector planted(d);
  for (auto& v : planted) v = rng.gaussian();
  std::vector<Cost> costs;
  for (std::size_t node = 0; node < n; ++node) {
    LogisticCost c;
    c.reg = reg;
    for (std::size_t s = 0; s < samples_per_node; ++s) {
      LabeledSample sample;
      sample.features.resize(d);
      for (auto& v : sample.features) v = rng.gaussian();
      sample.label = dot(planted, sample.features) + 0.5 * rng.gaussian() >= 0.0 ? 1.0 : -1.0;
      c.samples.push_back(std::move(sample));
    }
    costs.emplace_back(std::move(c));
  }
  return make_ensemble(std::move(costs));
}

CostEnsemble make_ensemble(std::vector<Cost> costs) {
  if (costs.empty()) throw Error(ErrorCode::kInvalidArgument, "ensemble needs at least one cost");
  CostEnsemble e;
  e.d = dimension(costs.front());
  if (e.d == 0) throw Error(ErrorCode::kInvalidArgument, "ensemble: zero-dimensional cost");
  e.mu = std::numeric_limits<double>::infinity();
  e.l = 0.0;
  for (const auto& c : costs) {
    check_dim(e.d, dimension(c));
    if (const auto* q = std::get_if<QuadraticCost>(&c)) {
      if (q->a.rows() != e.d || q->a.cols() != e.d) {
        throw Error(ErrorCode::kDimensionMismatch, "quadratic cost: A must be d x d");
      }
      for (std::size_t i = 0; i < e.d; ++i)
        for (std::size_t j = 0; j < e.d; ++j)
          if (std::abs(q->a(i, j) - q->a(j, i)) > 1e-12 * std::max(1.0, std::abs(q->a(i, j)))) {
            throw Error(ErrorCode::kValidation, "quadratic cost: A is not symmetric");
          }
      const auto eig = symmetric_eigen(q->a);
      if (!(eig.values.back() > 0.0)) {
        throw Error(ErrorCode::kValidation, "quadratic cost: A is not positive definite");
      }
      e.mu = std::min(e.mu, eig.values.back());
      e.l = std::max(e.l, eig.values.front());
    } else {
      const auto& lg = std::get<LogisticCost>(c);
      if (!(lg.reg > 0.0)) throw Error(ErrorCode::kValidation, "logistic cost: reg must be positive");
      for (const auto& s : lg.samples) {
        check_dim(e.d, s.features.size());
        if (s.label != 1.0 && s.label != -1.0) {
          throw Error(ErrorCode::kValidation, "logistic cost: labels must be -1 or +1");
        }
      }
      e.mu = std::min(e.mu, lg.reg);
      e.l = std::max(e.l, logistic_lipschitz(lg, e.d));
    }
  }
  e.costs = std::move(costs);
  e.y_star = solve_centralized(e, 1e-12 * std::max(1.0, e.l * static_cast<double>(e.node_count())));
  return e;
}

Vector solve_centralized(const CostEnsemble& e, double tol) {
  const std::size_t d = e.d;
  if (e.is_quadratic()) {
    Matrix a_sum(d, d);
    Vector rhs(d, 0.0);
    for (const auto& c : e.costs) {
      const auto& q = std::get<QuadraticCost>(c);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) a_sum(i, j) += q.a(i, j);
      const Vector ab = q.a * std::span<const double>(q.b);
      axpy(1.0, ab, rhs);
    }
    return solve_linear(std::move(a_sum), std::move(rhs));
  }

  // Spectral gradient on the aggregate; its curvature lies in [n mu, n l].
  const double n = static_cast<double>(e.node_count());
  const Safeguards guards{n * e.mu, n * e.l};
  RunOptions opts;
  opts.max_iters = 20000;
  opts.tol = tol;
  const GradientFn grad = [&e](std::span<const double> y, std::span<double> g) {
    const Vector total = aggregate_gradient(e, y);
    std::copy(total.begin(), total.end(), g.begin());
  };
  const SgResult res = run_centralized_sg(grad, Vector(d, 0.0), guards.sigma_max, guards, opts);
  if (res.trace.status != RunStatus::kConverged) {
    std::ostringstream msg;
    msg << "solve_centralized: no convergence after " << res.trace.iterations()
        << " iterations, gradient norm " << res.trace.records.back().grad_norm;
    throw Error(ErrorCode::kNotConverged, msg.str());
  }
  return res.x;
}

namespace {

void write_values(std::ostream& out, std::span<const double> v) {
  for (double x : v) out << ' ' << x;
  out << '\n';
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::istringstream next(const std::string& expected_tag) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      std::string tag;
      ls >> tag;
      if (tag != expected_tag) fail("expected '" + expected_tag + "', found '" + tag + "'");
      return ls;
    }
    fail("unexpected end of file, expected '" + expected_tag + "'");
  }

  Vector values(std::istringstream& ls, std::size_t count) {
    Vector v(count);
    for (auto& x : v)
      if (!(ls >> x)) fail("expected " + std::to_string(count) + " numbers");
    return v;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::kParse, "ensemble file line " + std::to_string(line_no_) + ": " + why);
  }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

}  // namespace

void write_ensemble(const CostEnsemble& e, std::ostream& out) {
  out << std::setprecision(17);
  out << "dsg-ensemble 1\n";
  out << "kind " << (e.is_quadratic() ? "quadratic" : "logistic") << '\n';
  out << "n " << e.node_count() << '\n';
  out << "d " << e.d << '\n';
  out << "mu " << e.mu << '\n';
  out << "L " << e.l << '\n';
  out << "y_star";
  write_values(out, e.y_star);
  for (std::size_t i = 0; i < e.node_count(); ++i) {
    if (const auto* q = std::get_if<QuadraticCost>(&e.costs[i])) {
      out << "node " << i << '\n' << "b";
      write_values(out, q->b);
      for (std::size_t r = 0; r < e.d; ++r) {
        out << "a";
        write_values(out, q->a.row(r));
      }
    } else {
      const auto& lg = std::get<LogisticCost>(e.costs[i]);
      out << "node " << i << ' ' << lg.samples.size() << ' ' << lg.reg << '\n';
      for (const auto& s : lg.samples) {
        out << "s " << s.label;
        write_values(out, s.features);
      }
    }
  }
}

CostEnsemble read_ensemble(std::istream& in) {
  LineReader rd(in);
  int version = 0;
  if (!(rd.next("dsg-ensemble") >> version) || version != 1) rd.fail("unsupported format version");
  std::string kind;
  rd.next("kind") >> kind;
  if (kind != "quadratic" && kind != "logistic") rd.fail("unknown kind '" + kind + "'");
  CostEnsemble e;
  std::size_t n = 0;
  if (!(rd.next("n") >> n) || n == 0) rd.fail("bad node count");
  if (!(rd.next("d") >> e.d) || e.d == 0) rd.fail("bad dimension");
  if (!(rd.next("mu") >> e.mu)) rd.fail("bad mu");
  if (!(rd.next("L") >> e.l)) rd.fail("bad L");
  auto ys = rd.next("y_star");
  e.y_star = rd.values(ys, e.d);
  for (std::size_t i = 0; i < n; ++i) {
    auto header = rd.next("node");
    std::size_t idx = 0;
    if (!(header >> idx) || idx != i) rd.fail("node blocks must appear in order");
    if (kind == "quadratic") {
      QuadraticCost q;
      auto bl = rd.next("b");
      q.b = rd.values(bl, e.d);
      q.a = Matrix(e.d, e.d);
      for (std::size_t r = 0; r < e.d; ++r) {
        auto al = rd.next("a");
        const Vector row = rd.values(al, e.d);
        std::copy(row.begin(), row.end(), q.a.row(r).begin());
      }
      e.costs.emplace_back(std::move(q));
    } else {
      LogisticCost lg;
      std::size_t count = 0;
      if (!(header >> count >> lg.reg)) rd.fail("logistic node header needs '<samples> <reg>'");
      for (std::size_t s = 0; s < count; ++s) {
        auto sl = rd.next("s");
        LabeledSample sample;
        if (!(sl >> sample.label)) rd.fail("missing label");
        sample.features = rd.values(sl, e.d);
        lg.samples.push_back(std::move(sample));
      }
      e.costs.emplace_back(std::move(lg));
    }
  }
  if (!(e.mu > 0.0 && e.mu <= e.l)) rd.fail("require 0 < mu <= L");
  return e;
}

void save_ensemble(const CostEnsemble& e, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  write_ensemble(e, out);
}

CostEnsemble load_ensemble(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  return read_ensemble(in);
}

}  // namespace dsg
