#include "dsg/dsg.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>

#include "analysis.hpp"
#include "error.hpp"
#include "harness.hpp"

struct dsg_graph {
  dsg::Graph g;
};
struct dsg_mixing {
  dsg::MixingMatrix m;
};
struct dsg_ensemble {
  dsg::CostEnsemble e;
};
struct dsg_trace {
  dsg::Trace t;
};
struct dsg_experiment {
  dsg::ExperimentConfig cfg;
  std::optional<dsg::ExperimentResult> result;
};

namespace {

thread_local std::string g_last_error;

dsg_status fail(dsg_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
dsg_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return DSG_OK;
  } catch (const dsg::Error& e) {
    return fail(static_cast<dsg_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(DSG_ERR_INTERNAL, "out of memory");
  } catch (const std::out_of_range& e) {
    return fail(DSG_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(DSG_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(DSG_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw dsg::Error(dsg::ErrorCode::kInvalidArgument, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

dsg_run_status to_c(dsg::RunStatus s) {
  switch (s) {
    case dsg::RunStatus::kConverged: return DSG_RUN_CONVERGED;
    case dsg::RunStatus::kMaxIterations: return DSG_RUN_MAX_ITERS;
    case dsg::RunStatus::kDiverged: return DSG_RUN_DIVERGED;
  }
  return DSG_RUN_MAX_ITERS;
}

const dsg::ExperimentResult& finished(const dsg_experiment* x) {
  require(x, "experiment is null");
  if (!x->result) throw dsg::Error(dsg::ErrorCode::kInvalidArgument, "experiment has not been run");
  return *x->result;
}

}  // namespace

extern "C" {

const char* dsg_last_error(void) { return g_last_error.c_str(); }
const char* dsg_version(void) { return "1.0.0"; }
void dsg_string_free(char* s) { std::free(s); }

dsg_status dsg_graph_rgg(size_t n, double radius, uint64_t seed, int max_attempts, dsg_graph** out) {
  return guarded([&] {
    require(out, "out is null");
    const double r = radius > 0.0 ? radius : dsg::default_rgg_radius(n);
    *out = new dsg_graph{dsg::generate_rgg(n, r, seed, max_attempts)};
  });
}

dsg_status dsg_graph_named(const char* kind, size_t n, dsg_graph** out) {
  return guarded([&] {
    require(kind && out, "null argument");
    const std::string k = kind;
    if (k == "path") {
      *out = new dsg_graph{dsg::path_graph(n)};
    } else if (k == "ring") {
      *out = new dsg_graph{dsg::ring_graph(n)};
    } else if (k == "star") {
      *out = new dsg_graph{dsg::star_graph(n)};
    } else if (k == "complete") {
      *out = new dsg_graph{dsg::complete_graph(n)};
    } else {
      throw dsg::Error(dsg::ErrorCode::kInvalidArgument, "unknown graph kind '" + k + "'");
    }
  });
}

dsg_status dsg_graph_from_edges(size_t n, const size_t* edges, size_t edge_count, dsg_graph** out) {
  return guarded([&] {
    require(out && (edges || edge_count == 0), "null argument");
    std::vector<dsg::Graph::Edge> list;
    for (size_t k = 0; k < edge_count; ++k) list.emplace_back(edges[2 * k], edges[2 * k + 1]);
    *out = new dsg_graph{dsg::Graph(n, std::move(list))};
  });
}

dsg_status dsg_graph_load(const char* path, dsg_graph** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new dsg_graph{dsg::load_edge_list(path)};
  });
}

dsg_status dsg_graph_save(const dsg_graph* g, const char* path) {
  return guarded([&] {
    require(g && path, "null argument");
    dsg::save_edge_list(g->g, path);
  });
}

size_t dsg_graph_node_count(const dsg_graph* g) { return g ? g->g.node_count() : 0; }
size_t dsg_graph_edge_count(const dsg_graph* g) { return g ? g->g.edges().size() : 0; }
int dsg_graph_is_connected(const dsg_graph* g) { return g && dsg::is_connected(g->g) ? 1 : 0; }

dsg_status dsg_graph_degrees(const dsg_graph* g, size_t* out) {
  return guarded([&] {
    require(g && out, "null argument");
    const auto d = dsg::degrees(g->g);
    std::copy(d.begin(), d.end(), out);
  });
}

void dsg_graph_free(dsg_graph* g) { delete g; }

dsg_status dsg_mixing_max_degree(const dsg_graph* g, dsg_mixing** out) {
  return guarded([&] {
    require(g && out, "null argument");
    *out = new dsg_mixing{dsg::build_max_degree_weights(g->g)};
  });
}

dsg_status dsg_mixing_from_dense(size_t n, const double* w, const dsg_graph* g, dsg_mixing** out) {
  return guarded([&] {
    require(w && out && n > 0, "null argument or empty matrix");
    dsg::Matrix m(n, n);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) m(i, j) = w[i * n + j];
    *out = new dsg_mixing{dsg::MixingMatrix(std::move(m), g ? &g->g : nullptr)};
  });
}

size_t dsg_mixing_size(const dsg_mixing* m) { return m ? m->m.size() : 0; }

dsg_status dsg_mixing_weights(const dsg_mixing* m, double* out) {
  return guarded([&] {
    require(m && out, "null argument");
    const size_t n = m->m.size();
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) out[i * n + j] = m->m(i, j);
  });
}

dsg_status dsg_mixing_spectral(const dsg_mixing* m, double* lambda2, double* lambda_n) {
  return guarded([&] {
    require(m, "mixing is null");
    if (lambda2) *lambda2 = m->m.lambda2();
    if (lambda_n) *lambda_n = m->m.lambda_n();
  });
}

dsg_status dsg_mixing_apply(const dsg_mixing* m, const double* x, size_t d, double* out) {
  return guarded([&] {
    require(m && x && out && d > 0, "null argument or d = 0");
    const size_t len = m->m.size() * d;
    dsg::mix_into(m->m, {x, len}, d, {out, len});
  });
}

dsg_status dsg_mixing_save_csv(const dsg_mixing* m, const char* path) {
  return guarded([&] {
    require(m && path, "null argument");
    dsg::save_csv(m->m, path);
  });
}

void dsg_mixing_free(dsg_mixing* m) { delete m; }

dsg_status dsg_ensemble_quadratic(size_t n, size_t d, uint64_t seed, double b_lo, double b_hi, double eig_lo,
                                  double eig_hi, dsg_ensemble** out) {
  return guarded([&] {
    require(out, "out is null");
    *out = new dsg_ensemble{dsg::generate_quadratic_ensemble(n, d, seed, {b_lo, b_hi, eig_lo, eig_hi})};
  });
}

dsg_status dsg_ensemble_logistic(size_t n, size_t d, size_t samples_per_node, double reg, uint64_t seed,
                                 dsg_ensemble** out) {
  return guarded([&] {
    require(out, "out is null");
    *out = new dsg_ensemble{dsg::generate_logistic_ensemble(n, d, samples_per_node, reg, seed)};
  });
}

dsg_status dsg_ensemble_load(const char* path, dsg_ensemble** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new dsg_ensemble{dsg::load_ensemble(path)};
  });
}

dsg_status dsg_ensemble_save(const dsg_ensemble* e, const char* path) {
  return guarded([&] {
    require(e && path, "null argument");
    dsg::save_ensemble(e->e, path);
  });
}

dsg_status dsg_ensemble_get_info(const dsg_ensemble* e, dsg_ensemble_info* out) {
  return guarded([&] {
    require(e && out, "null argument");
    *out = {e->e.node_count(), e->e.d, e->e.mu, e->e.l, e->e.is_quadratic() ? 1 : 0};
  });
}

dsg_status dsg_ensemble_y_star(const dsg_ensemble* e, double* out) {
  return guarded([&] {
    require(e && out, "null argument");
    std::copy(e->e.y_star.begin(), e->e.y_star.end(), out);
  });
}

dsg_status dsg_ensemble_value(const dsg_ensemble* e, const double* y, double* out) {
  return guarded([&] {
    require(e && y && out, "null argument");
    double total = 0.0;
    for (const auto& c : e->e.costs) total += dsg::value(c, {y, e->e.d});
    *out = total;
  });
}

dsg_status dsg_ensemble_gradient(const dsg_ensemble* e, const double* y, double* out) {
  return guarded([&] {
    require(e && y && out, "null argument");
    const auto g = dsg::aggregate_gradient(e->e, {y, e->e.d});
    std::copy(g.begin(), g.end(), out);
  });
}

void dsg_ensemble_free(dsg_ensemble* e) { delete e; }

void dsg_run_params_default(dsg_run_params* p, double l) {
  if (!p) return;
  p->algorithm = DSG_ALGO_DSG;
  p->alpha = 1.0 / (3.0 * l);
  p->sigma_min = 0.3 * l;
  p->sigma_max = 1e8;
  p->sigma_init = 3.0 * l;
  p->rule = DSG_RULE_NEIGHBOR_SECANT;
  p->max_iters = 5000;
  p->tol = 1e-4;
}

dsg_status dsg_run(const dsg_ensemble* e, const dsg_mixing* m, const dsg_run_params* p, const double* x0,
                   dsg_trace** out) {
  return guarded([&] {
    require(e && m && p && out, "null argument");
    require(p->max_iters >= 0, "max_iters must be >= 0");
    const size_t len = e->e.node_count() * e->e.d;
    if (m->m.size() != e->e.node_count()) {
      throw dsg::Error(dsg::ErrorCode::kDimensionMismatch, "mixing matrix size differs from the node count");
    }
    const dsg::Vector start = x0 ? dsg::Vector(x0, x0 + len) : dsg::Vector(len, 0.0);
    dsg::RunOptions opts;
    opts.max_iters = p->max_iters;
    opts.tol = p->tol > 0.0 ? p->tol : 0.0;
    dsg::DsgParams dp;
    dp.guards = {p->sigma_min, p->sigma_max};
    dp.sigma_init = p->sigma_init;
    switch (p->rule) {
      case DSG_RULE_NEIGHBOR_SECANT: dp.rule = dsg::StepRule::kNeighborSecant; break;
      case DSG_RULE_UNIT_ANCHOR: dp.rule = dsg::StepRule::kUnitAnchor; break;
      case DSG_RULE_SECANT_FIT: dp.rule = dsg::StepRule::kSecantFit; break;
      default: throw dsg::Error(dsg::ErrorCode::kInvalidArgument, "unknown step rule");
    }
    auto t = std::make_unique<dsg_trace>();
    switch (p->algorithm) {
      case DSG_ALGO_DSG: t->t = dsg::run_dsg_form_a(e->e, m->m, dp, start, opts); break;
      case DSG_ALGO_DSG_PRIMAL_DUAL: t->t = dsg::run_dsg_form_b(e->e, m->m, dp, start, opts); break;
      case DSG_ALGO_TRACKING: t->t = dsg::run_gradient_tracking(e->e, m->m, p->alpha, start, opts); break;
      case DSG_ALGO_DGD: t->t = dsg::run_dgd(e->e, m->m, p->alpha, start, opts); break;
      default: throw dsg::Error(dsg::ErrorCode::kInvalidArgument, "unknown algorithm");
    }
    *out = t.release();
  });
}

dsg_run_status dsg_trace_status(const dsg_trace* t) { return t ? to_c(t->t.status) : DSG_RUN_MAX_ITERS; }
size_t dsg_trace_length(const dsg_trace* t) { return t ? t->t.records.size() : 0; }

dsg_status dsg_trace_record_at(const dsg_trace* t, size_t index, dsg_trace_record* out) {
  return guarded([&] {
    require(t && out, "null argument");
    const auto& r = t->t.records.at(index);
    *out = {r.k, r.rel_error, r.step_min, r.step_mean, r.step_max, r.grad_norm};
  });
}

int dsg_trace_iterations_to(const dsg_trace* t, double target) {
  if (!t) return -1;
  return t->t.iterations_to(target).value_or(-1);
}

size_t dsg_trace_state_size(const dsg_trace* t) { return t ? t->t.final_x.size() : 0; }

dsg_status dsg_trace_final_state(const dsg_trace* t, double* out) {
  return guarded([&] {
    require(t && out, "null argument");
    std::copy(t->t.final_x.begin(), t->t.final_x.end(), out);
  });
}

dsg_status dsg_trace_rate(const dsg_trace* t, double tail_fraction, double* out) {
  return guarded([&] {
    require(t && out, "null argument");
    *out = dsg::estimate_rate(t->t, tail_fraction);
  });
}

dsg_status dsg_trace_save_csv(const dsg_trace* t, const char* path) {
  return guarded([&] {
    require(t && path, "null argument");
    dsg::emit_csv(t->t, path);
  });
}

void dsg_trace_free(dsg_trace* t) { delete t; }

dsg_status dsg_check_safeguards(double mu, double l, double lambda2, double lambda_n, double sigma_min,
                                double sigma_max, dsg_safeguard_report* out) {
  return guarded([&] {
    require(out, "out is null");
    const dsg::Safeguards g{sigma_min, sigma_max};
    g.validate();
    const auto r = dsg::check_safeguards(mu, l, lambda2, lambda_n, g);
    *out = {r.d_min,      r.d_max, r.delta, r.cond_ratio_ok ? 1 : 0, r.cond_magnitude_ok ? 1 : 0,
            r.rate_lower, r.rate_interval_empty ? 1 : 0};
  });
}

dsg_status dsg_verify(int* all_passed, char** report) {
  return guarded([&] {
    require(all_passed, "all_passed is null");
    const auto results = dsg::run_oracle_suite();
    std::ostringstream s;
    bool ok = true;
    for (const auto& r : results) {
      ok = ok && r.passed;
      s << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.detail << ")\n";
    }
    *all_passed = ok ? 1 : 0;
    if (report) *report = dup_string(s.str());
  });
}

dsg_status dsg_experiment_load(const char* config_path, dsg_experiment** out) {
  return guarded([&] {
    require(config_path && out, "null argument");
    *out = new dsg_experiment{dsg::load_config(config_path), std::nullopt};
  });
}

dsg_status dsg_experiment_parse(const char* config_text, const char* base_dir, dsg_experiment** out) {
  return guarded([&] {
    require(config_text && out, "null argument");
    std::istringstream in(config_text);
    *out = new dsg_experiment{dsg::parse_config(in, base_dir ? base_dir : "."), std::nullopt};
  });
}

dsg_status dsg_experiment_set_seed(dsg_experiment* x, uint64_t seed) {
  return guarded([&] {
    require(x, "experiment is null");
    x->cfg.seed = seed;
  });
}

dsg_status dsg_experiment_set_output_dir(dsg_experiment* x, const char* dir) {
  return guarded([&] {
    require(x, "experiment is null");
    x->cfg.output_dir = dir ? dir : "";
  });
}

dsg_status dsg_experiment_set_max_iters(dsg_experiment* x, int max_iters) {
  return guarded([&] {
    require(x && max_iters >= 0, "null experiment or negative max_iters");
    x->cfg.max_iters = max_iters;
  });
}

dsg_status dsg_experiment_run(dsg_experiment* x) {
  return guarded([&] {
    require(x, "experiment is null");
    x->result.reset();
    x->result = dsg::run_experiment(x->cfg);
  });
}

size_t dsg_experiment_run_count(const dsg_experiment* x) {
  return x && x->result ? x->result->traces.size() : 0;
}

dsg_status dsg_experiment_run_status(const dsg_experiment* x, size_t index, dsg_run_status* out) {
  return guarded([&] {
    require(out, "out is null");
    *out = to_c(finished(x).traces.at(index).status);
  });
}

int dsg_experiment_all_converged(const dsg_experiment* x) {
  return x && x->result && x->result->all_converged() ? 1 : 0;
}

dsg_status dsg_experiment_summary(const dsg_experiment* x, char** out) {
  return guarded([&] {
    require(out, "out is null");
    *out = dup_string(dsg::format_report(finished(x)));
  });
}

dsg_status dsg_experiment_report_json(const dsg_experiment* x, char** out) {
  return guarded([&] {
    require(out, "out is null");
    *out = dup_string(dsg::report_to_json(finished(x)));
  });
}

void dsg_experiment_free(dsg_experiment* x) { delete x; }

}  // extern "C"
