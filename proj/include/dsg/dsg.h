#ifndef DSG_DSG_H
#define DSG_DSG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  ifdef DSG_BUILDING_LIBRARY
#    define DSG_API __declspec(dllexport)
#  else
#    define DSG_API __declspec(dllimport)
#  endif
#else
#  define DSG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dsg_status {
  DSG_OK = 0,
  DSG_ERR_INVALID_ARGUMENT = 1,
  DSG_ERR_DIMENSION_MISMATCH = 2,
  DSG_ERR_NOT_CONNECTED = 3,
  DSG_ERR_NOT_CONVERGED = 4,
  DSG_ERR_IO = 5,
  DSG_ERR_PARSE = 6,
  DSG_ERR_VALIDATION = 7,
  DSG_ERR_INTERNAL = 99
} dsg_status;

/* Message for the last failing call on this thread ("" if none). */
DSG_API const char* dsg_last_error(void);
DSG_API const char* dsg_version(void);

/* Strings returned through char** are owned by the caller. */
DSG_API void dsg_string_free(char* s);

typedef struct dsg_graph dsg_graph;
typedef struct dsg_mixing dsg_mixing;
typedef struct dsg_ensemble dsg_ensemble;
typedef struct dsg_trace dsg_trace;
typedef struct dsg_experiment dsg_experiment;

/* ---- graphs ---- */

/* radius <= 0 selects sqrt(ln n / n). */
DSG_API dsg_status dsg_graph_rgg(size_t n, double radius, uint64_t seed, int max_attempts, dsg_graph** out);
/* kind: "path", "ring", "star" or "complete". */
DSG_API dsg_status dsg_graph_named(const char* kind, size_t n, dsg_graph** out);
/* edges: 2*edge_count node indices. */
DSG_API dsg_status dsg_graph_from_edges(size_t n, const size_t* edges, size_t edge_count, dsg_graph** out);
DSG_API dsg_status dsg_graph_load(const char* path, dsg_graph** out);
DSG_API dsg_status dsg_graph_save(const dsg_graph* g, const char* path);
DSG_API size_t dsg_graph_node_count(const dsg_graph* g);
DSG_API size_t dsg_graph_edge_count(const dsg_graph* g);
DSG_API int dsg_graph_is_connected(const dsg_graph* g);
/* out must hold node_count entries. */
DSG_API dsg_status dsg_graph_degrees(const dsg_graph* g, size_t* out);
DSG_API void dsg_graph_free(dsg_graph* g);

/* ---- mixing matrices ---- */

DSG_API dsg_status dsg_mixing_max_degree(const dsg_graph* g, dsg_mixing** out);
/* Row-major n*n weights; graph may be NULL to skip the support check. */
DSG_API dsg_status dsg_mixing_from_dense(size_t n, const double* w, const dsg_graph* g, dsg_mixing** out);
DSG_API size_t dsg_mixing_size(const dsg_mixing* m);
DSG_API dsg_status dsg_mixing_weights(const dsg_mixing* m, double* out);
DSG_API dsg_status dsg_mixing_spectral(const dsg_mixing* m, double* lambda2, double* lambda_n);
/* out = (W kron I_d) x, x and out hold n*d entries. */
DSG_API dsg_status dsg_mixing_apply(const dsg_mixing* m, const double* x, size_t d, double* out);
DSG_API dsg_status dsg_mixing_save_csv(const dsg_mixing* m, const char* path);
DSG_API void dsg_mixing_free(dsg_mixing* m);

/* ---- cost ensembles ---- */

/* Quadratic costs with b ~ U[b_lo,b_hi] and eigenvalues ~ U[eig_lo,eig_hi]. */
DSG_API dsg_status dsg_ensemble_quadratic(size_t n, size_t d, uint64_t seed, double b_lo, double b_hi,
                                          double eig_lo, double eig_hi, dsg_ensemble** out);
DSG_API dsg_status dsg_ensemble_logistic(size_t n, size_t d, size_t samples_per_node, double reg, uint64_t seed,
                                         dsg_ensemble** out);
DSG_API dsg_status dsg_ensemble_load(const char* path, dsg_ensemble** out);
DSG_API dsg_status dsg_ensemble_save(const dsg_ensemble* e, const char* path);

typedef struct dsg_ensemble_info {
  size_t nodes;
  size_t dim;
  double mu;
  double l;
  int quadratic;
} dsg_ensemble_info;

DSG_API dsg_status dsg_ensemble_get_info(const dsg_ensemble* e, dsg_ensemble_info* out);
/* out must hold dim entries. */
DSG_API dsg_status dsg_ensemble_y_star(const dsg_ensemble* e, double* out);
/* Sum of local values / gradient at a common point y (dim entries). */
DSG_API dsg_status dsg_ensemble_value(const dsg_ensemble* e, const double* y, double* out);
DSG_API dsg_status dsg_ensemble_gradient(const dsg_ensemble* e, const double* y, double* out);
DSG_API void dsg_ensemble_free(dsg_ensemble* e);

/* ---- runs ---- */

typedef enum dsg_algorithm {
  DSG_ALGO_DSG = 0,
  DSG_ALGO_DSG_PRIMAL_DUAL = 1,
  DSG_ALGO_TRACKING = 2,
  DSG_ALGO_DGD = 3
} dsg_algorithm;

typedef enum dsg_step_rule {
  DSG_RULE_NEIGHBOR_SECANT = 0,
  DSG_RULE_UNIT_ANCHOR = 1,
  DSG_RULE_SECANT_FIT = 2
} dsg_step_rule;

typedef enum dsg_run_status { DSG_RUN_CONVERGED = 0, DSG_RUN_MAX_ITERS = 1, DSG_RUN_DIVERGED = 2 } dsg_run_status;

typedef struct dsg_run_params {
  dsg_algorithm algorithm;
  double alpha;      /* tracking, dgd */
  double sigma_min;  /* dsg, dsg-pd */
  double sigma_max;
  double sigma_init;
  dsg_step_rule rule;
  int max_iters;
  double tol; /* <= 0 disables the gradient-norm stop */
} dsg_run_params;

/* Fills defaults for the given L: alpha 1/(3L), sigma in [3L/10, 1e8], init 3L. */
DSG_API void dsg_run_params_default(dsg_run_params* p, double l);

/* x0 may be NULL (zeros); otherwise n*d entries. */
DSG_API dsg_status dsg_run(const dsg_ensemble* e, const dsg_mixing* m, const dsg_run_params* p, const double* x0,
                           dsg_trace** out);

typedef struct dsg_trace_record {
  int k;
  double rel_error;
  double step_min;
  double step_mean;
  double step_max;
  double grad_norm;
} dsg_trace_record;

DSG_API dsg_run_status dsg_trace_status(const dsg_trace* t);
DSG_API size_t dsg_trace_length(const dsg_trace* t);
DSG_API dsg_status dsg_trace_record_at(const dsg_trace* t, size_t index, dsg_trace_record* out);
/* First iteration with rel_error <= target, or -1. */
DSG_API int dsg_trace_iterations_to(const dsg_trace* t, double target);
/* Stacked n*d final iterate. */
DSG_API size_t dsg_trace_state_size(const dsg_trace* t);
DSG_API dsg_status dsg_trace_final_state(const dsg_trace* t, double* out);
/* Least-squares slope of ln(rel_error) over the last tail_fraction of records. */
DSG_API dsg_status dsg_trace_rate(const dsg_trace* t, double tail_fraction, double* out);
DSG_API dsg_status dsg_trace_save_csv(const dsg_trace* t, const char* path);
DSG_API void dsg_trace_free(dsg_trace* t);

/* ---- diagnostics ---- */

typedef struct dsg_safeguard_report {
  double d_min;
  double d_max;
  double delta;
  int ratio_condition;
  int magnitude_condition;
  double rate_lower;
  int rate_interval_empty;
} dsg_safeguard_report;

DSG_API dsg_status dsg_check_safeguards(double mu, double l, double lambda2, double lambda_n, double sigma_min,
                                        double sigma_max, dsg_safeguard_report* out);

/* Runs the built-in oracle checks. *report receives one line per check. */
DSG_API dsg_status dsg_verify(int* all_passed, char** report);

/* ---- experiments (config files) ---- */

DSG_API dsg_status dsg_experiment_load(const char* config_path, dsg_experiment** out);
DSG_API dsg_status dsg_experiment_parse(const char* config_text, const char* base_dir, dsg_experiment** out);
DSG_API dsg_status dsg_experiment_set_seed(dsg_experiment* x, uint64_t seed);
DSG_API dsg_status dsg_experiment_set_output_dir(dsg_experiment* x, const char* dir);
DSG_API dsg_status dsg_experiment_set_max_iters(dsg_experiment* x, int max_iters);
DSG_API dsg_status dsg_experiment_run(dsg_experiment* x);
DSG_API size_t dsg_experiment_run_count(const dsg_experiment* x);
DSG_API dsg_status dsg_experiment_run_status(const dsg_experiment* x, size_t index, dsg_run_status* out);
/* 1 if every run converged (requires a completed run). */
DSG_API int dsg_experiment_all_converged(const dsg_experiment* x);
DSG_API dsg_status dsg_experiment_summary(const dsg_experiment* x, char** out);
DSG_API dsg_status dsg_experiment_report_json(const dsg_experiment* x, char** out);
DSG_API void dsg_experiment_free(dsg_experiment* x);

#ifdef __cplusplus
}
#endif

#endif
