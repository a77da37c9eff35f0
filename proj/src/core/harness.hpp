#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "analysis.hpp"
#include "costs.hpp"
#include "mixing.hpp"
#include "network.hpp"
#include "solvers.hpp"

namespace dsg {

/// A scalar that is either absolute or a multiple of L or 1/L, e.g.
/// "1e8", "3L", "3L/10", "1/(3L)", "10/(3L)".
struct ScalarSpec {
  double coef = 1.0;
  int l_power = 0;  // -1, 0, or 1
  std::string text;

  static ScalarSpec absolute(double v);
  static ScalarSpec parse(std::string_view s);  // throws kParse
  double resolve(double l) const;
};

enum class TopologyKind { kRgg, kFile, kPath, kRing, kStar, kComplete };
enum class ProblemKind { kQuadratic, kLogistic, kFile };
enum class AlgorithmKind { kDsg, kDsgPrimalDual, kTracking, kDgd };

const char* to_string(AlgorithmKind kind);

struct TopologyConfig {
  TopologyKind kind = TopologyKind::kRgg;
  std::size_t nodes = 30;
  std::optional<double> radius;  // nullopt: sqrt(ln n / n)
  int max_attempts = 100;
  std::string file;
};

struct ProblemConfig {
  ProblemKind kind = ProblemKind::kQuadratic;
  std::size_t dim = 10;
  QuadraticRanges ranges;
  std::size_t samples_per_node = 20;
  double reg = 1.0;
  std::string file;
};

/// One algorithm entry; unset parameters fall back to the experiment-wide
/// values.
struct AlgorithmConfig {
  AlgorithmKind kind = AlgorithmKind::kDsg;
  std::string label;
  std::optional<ScalarSpec> alpha;
  std::optional<ScalarSpec> sigma_min;
  std::optional<ScalarSpec> sigma_max;
  std::optional<ScalarSpec> sigma_init;
  std::optional<StepRule> rule;
};

struct ExperimentConfig {
  TopologyConfig topology;
  ProblemConfig problem;
  std::vector<AlgorithmConfig> algorithms;
  ScalarSpec sigma_min = ScalarSpec::parse("3L/10");
  ScalarSpec sigma_max = ScalarSpec::parse("1e8");
  ScalarSpec sigma_init = ScalarSpec::parse("3L");
  ScalarSpec alpha = ScalarSpec::parse("1/(3L)");
  StepRule rule = StepRule::kNeighborSecant;
  std::uint64_t seed = 1;
  int max_iters = 5000;
  double tol = 1e-4;
  double target = 1e-2;
  std::string output_dir;  // empty: nothing is written

  /// Throws kValidation naming the offending field.
  void validate() const;
};

/// Flat "key = value" text, '#' comments. Keys:
///   seed, max_iters, tol, target, output_dir
///   topology (rgg|file|path|ring|star|complete), nodes, radius (auto|r),
///   max_attempts, graph_file
///   problem (quadratic|logistic|file), dim, b_range "lo hi", eig_range "lo hi",
///   samples_per_node, reg, ensemble_file
///   sigma_min, sigma_max, sigma_init, alpha, step_rule
///   algorithm = <dsg|dsg-pd|tracking|dgd> [key=value ...]   (repeatable;
///     per-algorithm keys: label, alpha, sigma_min, sigma_max, sigma_init, step_rule)
/// Relative file paths resolve against the config file's directory.
ExperimentConfig parse_config(std::istream& in, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

struct RunSummary {
  std::string label;
  AlgorithmKind kind = AlgorithmKind::kDsg;
  RunStatus status = RunStatus::kMaxIterations;
  int iterations = 0;
  std::optional<int> iterations_to_target;
  double final_error = 0.0;
  std::optional<double> rate;
  // Resolved parameters (NaN where not applicable).
  double alpha = 0.0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double sigma_init = 0.0;
  /// DSG runs only: sufficient-condition diagnostic for the safeguards.
  std::optional<SafeguardReport> safeguard_check;
};

struct Savings {
  std::string subject;
  std::string baseline;
  double ratio = 0.0;  // 1 - iters(subject) / iters(baseline)
};

struct ComparisonReport {
  double target = 1e-2;
  std::vector<RunSummary> runs;
  std::vector<Savings> savings;
};

struct ExperimentResult {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t dim = 0;
  double mu = 0.0;
  double l = 0.0;
  double lambda2 = 0.0;
  double lambda_n = 0.0;
  std::vector<Trace> traces;
  ComparisonReport report;
  std::vector<std::string> written_files;

  bool all_converged() const;
};

/// Builds graph, weights and ensemble from the seed, runs every algorithm
/// from x0 = 0 (concurrently), and writes per-run CSVs, the replay inputs,
/// and report.json into output_dir when it is set.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

ComparisonReport make_report(const std::vector<Trace>& traces, const std::vector<AlgorithmKind>& kinds,
                             double target);

/// Header "iteration,algorithm,rel_error,step_min,step_mean,step_max,grad_norm",
/// one row per record, 17 significant digits, LF endings.
void write_trace_csv(const Trace& trace, std::ostream& out);
void emit_csv(const Trace& trace, const std::string& path);

std::string report_to_json(const ExperimentResult& result);
std::string format_report(const ExperimentResult& result);

}  // namespace dsg
