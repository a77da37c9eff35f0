#include "harness.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "error.hpp"
#include "rng.hpp"

namespace dsg {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::optional<double> to_double(std::string_view s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// "3L", "0.3*L", "L" -> coefficient of L.
std::optional<double> l_multiple(std::string_view s) {
  std::string t = trim(s);
  if (t.empty() || t.back() != 'L') return std::nullopt;
  t.pop_back();
  if (!t.empty() && t.back() == '*') t.pop_back();
  if (t.empty()) return 1.0;
  return to_double(t);
}

}  // namespace

ScalarSpec ScalarSpec::absolute(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return {v, 0, s.str()};
}

ScalarSpec ScalarSpec::parse(std::string_view raw) {
  std::string s;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  auto bad = [&]() -> ScalarSpec {
    throw Error(ErrorCode::kParse, "cannot read '" + std::string(raw) +
                                       "' as a number or L-relative value (e.g. 1e8, 3L/10, 1/(3L))");
  };
  if (s.empty()) return bad();
  if (s.find('L') == std::string::npos) {
    const auto v = to_double(s);
    if (!v) return bad();
    return {*v, 0, s};
  }
  const auto slash = s.find('/');
  if (slash == std::string::npos) {
    const auto c = l_multiple(s);
    if (!c) return bad();
    return {*c, 1, s};
  }
  const std::string left = s.substr(0, slash);
  std::string right = s.substr(slash + 1);
  if (left.find('L') != std::string::npos) {
    // aL/b
    const auto c = l_multiple(left);
    const auto div = to_double(right);
    if (!c || !div || *div == 0.0) return bad();
    return {*c / *div, 1, s};
  }
  // a/(bL) or a/L
  if (right.size() >= 2 && right.front() == '(' && right.back() == ')') right = right.substr(1, right.size() - 2);
  const auto num = to_double(left);
  const auto den = l_multiple(right);
  if (!num || !den || *den == 0.0) return bad();
  return {*num / *den, -1, s};
}

double ScalarSpec::resolve(double l) const {
  switch (l_power) {
    case 1: return coef * l;
    case -1: return coef / l;
    default: return coef;
  }
}

const char* to_string(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::kDsg: return "dsg";
    case AlgorithmKind::kDsgPrimalDual: return "dsg-pd";
    case AlgorithmKind::kTracking: return "tracking";
    case AlgorithmKind::kDgd: return "dgd";
  }
  return "?";
}

namespace {

std::optional<AlgorithmKind> parse_algorithm(std::string_view name) {
  for (auto k : {AlgorithmKind::kDsg, AlgorithmKind::kDsgPrimalDual, AlgorithmKind::kTracking, AlgorithmKind::kDgd})
    if (name == to_string(k)) return k;
  return std::nullopt;
}

bool is_dsg(AlgorithmKind k) { return k == AlgorithmKind::kDsg || k == AlgorithmKind::kDsgPrimalDual; }

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kValidation, "config field '" + field + "': " + why);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (algorithms.empty()) invalid("algorithm", "at least one algorithm is required");
  if (!(tol > 0.0)) invalid("tol", "must be positive");
  if (!(target > 0.0)) invalid("target", "must be positive");
  if (max_iters < 0) invalid("max_iters", "must be >= 0");
  if (topology.kind == TopologyKind::kFile) {
    if (topology.file.empty()) invalid("graph_file", "required when topology = file");
  } else if (topology.nodes < 1 || (topology.kind == TopologyKind::kRgg && topology.nodes < 2)) {
    invalid("nodes", "too few nodes for this topology");
  }
  if (topology.radius && !(*topology.radius > 0.0)) invalid("radius", "must be positive or 'auto'");
  if (topology.max_attempts < 1) invalid("max_attempts", "must be >= 1");
  if (problem.kind == ProblemKind::kFile && problem.file.empty()) {
    invalid("ensemble_file", "required when problem = file");
  }
  if (problem.kind != ProblemKind::kFile && problem.dim < 1) invalid("dim", "must be >= 1");
  if (problem.kind == ProblemKind::kLogistic) {
    if (!(problem.reg > 0.0)) invalid("reg", "must be positive");
    if (problem.samples_per_node < 1) invalid("samples_per_node", "must be >= 1");
  }
  if (!(problem.ranges.eig_lo > 0.0 && problem.ranges.eig_lo <= problem.ranges.eig_hi)) {
    invalid("eig_range", "need 0 < lo <= hi");
  }
  if (!(problem.ranges.b_lo <= problem.ranges.b_hi)) invalid("b_range", "need lo <= hi");

  // Bounds expressed in the same unit can be compared before L is known.
  auto check_pair = [](const ScalarSpec& lo, const ScalarSpec& hi, const std::string& where) {
    if (lo.coef <= 0.0) invalid(where + "sigma_min", "must be positive");
    if (hi.coef <= 0.0) invalid(where + "sigma_max", "must be positive");
    if (lo.l_power == hi.l_power && lo.coef >= hi.coef) invalid(where + "sigma_min", "must be below sigma_max");
  };
  check_pair(sigma_min, sigma_max, "");
  std::set<std::string> labels;
  for (const auto& a : algorithms) {
    if (!labels.insert(a.label).second) invalid("algorithm", "duplicate label '" + a.label + "'");
    check_pair(a.sigma_min.value_or(sigma_min), a.sigma_max.value_or(sigma_max), a.label + ".");
    if (a.alpha && a.alpha->coef < 0.0) invalid(a.label + ".alpha", "must be nonnegative");
  }
}

ExperimentConfig parse_config(std::istream& in, const std::string& base_dir) {
  ExperimentConfig cfg;
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& why) -> void {
    throw Error(ErrorCode::kParse, "config line " + std::to_string(line_no) + ": " + why + "\n  " + line);
  };
  auto number = [&](const std::string& v) {
    const auto d = to_double(v);
    if (!d) fail("expected a number, got '" + v + "'");
    return *d;
  };
  auto count = [&](const std::string& v) -> std::size_t {
    const double d = number(v);
    if (d < 0 || d != std::floor(d)) fail("expected a nonnegative integer, got '" + v + "'");
    return static_cast<std::size_t>(d);
  };
  auto range = [&](const std::string& v) {
    std::istringstream rs(v);
    std::string a, b, extra;
    if (!(rs >> a >> b) || (rs >> extra)) fail("expected 'lo hi'");
    return std::pair{number(a), number(b)};
  };
  auto spec = [&](const std::string& v) {
    try {
      return ScalarSpec::parse(v);
    } catch (const Error& e) {
      fail(e.what());
    }
    return ScalarSpec{};
  };
  auto rule = [&](const std::string& v) {
    const auto r = parse_step_rule(v);
    if (!r) fail("unknown step_rule '" + v + "' (neighbor-secant|unit-anchor|secant-fit)");
    return *r;
  };
  auto resolve_path = [&](const std::string& v) {
    const std::filesystem::path p(v);
    return p.is_absolute() ? v : (std::filesystem::path(base_dir) / p).string();
  };

  std::map<std::string, int> label_counts;
  while (std::getline(in, line)) {
    ++line_no;
    std::string body = line;
    if (const auto hash = body.find('#'); hash != std::string::npos) body.erase(hash);
    body = trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    const std::string val = trim(body.substr(eq + 1));
    if (val.empty()) fail("missing value for '" + key + "'");

    if (key == "seed") {
      cfg.seed = count(val);
    } else if (key == "max_iters") {
      cfg.max_iters = static_cast<int>(count(val));
    } else if (key == "tol") {
      cfg.tol = number(val);
    } else if (key == "target") {
      cfg.target = number(val);
    } else if (key == "output_dir") {
      cfg.output_dir = resolve_path(val);
    } else if (key == "topology") {
      static const std::map<std::string, TopologyKind> kinds{
          {"rgg", TopologyKind::kRgg},   {"file", TopologyKind::kFile}, {"path", TopologyKind::kPath},
          {"ring", TopologyKind::kRing}, {"star", TopologyKind::kStar}, {"complete", TopologyKind::kComplete}};
      const auto it = kinds.find(val);
      if (it == kinds.end()) fail("unknown topology '" + val + "'");
      cfg.topology.kind = it->second;
    } else if (key == "nodes") {
      cfg.topology.nodes = count(val);
    } else if (key == "radius") {
      if (val == "auto") {
        cfg.topology.radius.reset();
      } else {
        cfg.topology.radius = number(val);
      }
    } else if (key == "max_attempts") {
      cfg.topology.max_attempts = static_cast<int>(count(val));
    } else if (key == "graph_file") {
      cfg.topology.file = resolve_path(val);
    } else if (key == "problem") {
      if (val == "quadratic") {
        cfg.problem.kind = ProblemKind::kQuadratic;
      } else if (val == "logistic") {
        cfg.problem.kind = ProblemKind::kLogistic;
      } else if (val == "file") {
        cfg.problem.kind = ProblemKind::kFile;
      } else {
        fail("unknown problem '" + val + "'");
      }
    } else if (key == "dim") {
      cfg.problem.dim = count(val);
    } else if (key == "b_range") {
      std::tie(cfg.problem.ranges.b_lo, cfg.problem.ranges.b_hi) = range(val);
    } else if (key == "eig_range") {
      std::tie(cfg.problem.ranges.eig_lo, cfg.problem.ranges.eig_hi) = range(val);
    } else if (key == "samples_per_node") {
      cfg.problem.samples_per_node = count(val);
    } else if (key == "reg") {
      cfg.problem.reg = number(val);
    } else if (key == "ensemble_file") {
      cfg.problem.file = resolve_path(val);
    } else if (key == "sigma_min") {
      cfg.sigma_min = spec(val);
    } else if (key == "sigma_max") {
      cfg.sigma_max = spec(val);
    } else if (key == "sigma_init") {
      cfg.sigma_init = spec(val);
    } else if (key == "alpha") {
      cfg.alpha = spec(val);
    } else if (key == "step_rule") {
      cfg.rule = rule(val);
    } else if (key == "algorithm") {
      std::istringstream as(val);
      std::string name;
      as >> name;
      const auto kind = parse_algorithm(name);
      if (!kind) fail("unknown algorithm '" + name + "' (dsg|dsg-pd|tracking|dgd)");
      AlgorithmConfig a;
      a.kind = *kind;
      std::string kv;
      while (as >> kv) {
        const auto p = kv.find('=');
        if (p == std::string::npos) fail("algorithm parameters must be key=value, got '" + kv + "'");
        const std::string k = kv.substr(0, p);
        const std::string v = kv.substr(p + 1);
        if (k == "label") {
          a.label = v;
        } else if (k == "alpha") {
          a.alpha = spec(v);
        } else if (k == "sigma_min") {
          a.sigma_min = spec(v);
        } else if (k == "sigma_max") {
          a.sigma_max = spec(v);
        } else if (k == "sigma_init") {
          a.sigma_init = spec(v);
        } else if (k == "step_rule") {
          a.rule = rule(v);
        } else {
          fail("unknown algorithm parameter '" + k + "'");
        }
      }
      if (a.label.empty()) {
        const int c = label_counts[name]++;
        a.label = c == 0 ? name : name + "-" + std::to_string(c + 1);
      }
      cfg.algorithms.push_back(std::move(a));
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config '" + path + "'");
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(in, dir.empty() ? "." : dir.string());
}

bool ExperimentResult::all_converged() const {
  for (const auto& t : traces)
    if (t.status != RunStatus::kConverged) return false;
  return true;
}

ComparisonReport make_report(const std::vector<Trace>& traces, const std::vector<AlgorithmKind>& kinds,
                             double target) {
  ComparisonReport rep;
  rep.target = target;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& t = traces[i];
    RunSummary s;
    s.label = t.algorithm;
    s.kind = kinds.at(i);
    s.status = t.status;
    s.iterations = t.iterations();
    s.iterations_to_target = t.iterations_to(target);
    s.final_error = t.records.back().rel_error;
    if (t.status != RunStatus::kDiverged && t.records.size() >= 20) {
      try {
        s.rate = estimate_rate(t, 0.5);
      } catch (const Error&) {
      }
    }
    rep.runs.push_back(std::move(s));
  }
  for (const auto& a : rep.runs) {
    if (!is_dsg(a.kind) || !a.iterations_to_target) continue;
    for (const auto& b : rep.runs) {
      if (is_dsg(b.kind) || !b.iterations_to_target || *b.iterations_to_target == 0) continue;
      rep.savings.push_back(
          {a.label, b.label,
           1.0 - static_cast<double>(*a.iterations_to_target) / static_cast<double>(*b.iterations_to_target)});
    }
  }
  return rep;
}

void write_trace_csv(const Trace& trace, std::ostream& out) {
  out << "iteration,algorithm,rel_error,step_min,step_mean,step_max,grad_norm\n";
  char buf[512];
  for (const auto& r : trace.records) {
    std::snprintf(buf, sizeof buf, "%d,%s,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.k, trace.algorithm.c_str(),
                  r.rel_error, r.step_min, r.step_mean, r.step_max, r.grad_norm);
    out << buf;
  }
}

void emit_csv(const Trace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  write_trace_csv(trace, out);
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

namespace {

Graph build_graph(const ExperimentConfig& cfg) {
  const auto& t = cfg.topology;
  switch (t.kind) {
    case TopologyKind::kRgg:
      return generate_rgg(t.nodes, t.radius.value_or(default_rgg_radius(t.nodes)), derive_seed(cfg.seed, 1),
                          t.max_attempts);
    case TopologyKind::kFile: return load_edge_list(t.file);
    case TopologyKind::kPath: return path_graph(t.nodes);
    case TopologyKind::kRing: return ring_graph(t.nodes);
    case TopologyKind::kStar: return star_graph(t.nodes);
    case TopologyKind::kComplete: return complete_graph(t.nodes);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown topology");
}

CostEnsemble build_ensemble(const ExperimentConfig& cfg, std::size_t n) {
  const auto& p = cfg.problem;
  const std::uint64_t seed = derive_seed(cfg.seed, 2);
  switch (p.kind) {
    case ProblemKind::kQuadratic: return generate_quadratic_ensemble(n, p.dim, seed, p.ranges);
    case ProblemKind::kLogistic: return generate_logistic_ensemble(n, p.dim, p.samples_per_node, p.reg, seed);
    case ProblemKind::kFile: {
      auto e = load_ensemble(p.file);
      if (e.node_count() != n) {
        throw Error(ErrorCode::kValidation, "ensemble file has " + std::to_string(e.node_count()) +
                                                " nodes but the graph has " + std::to_string(n));
      }
      return e;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown problem kind");
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Graph graph = build_graph(cfg);
  const MixingMatrix weights = build_max_degree_weights(graph);
  const CostEnsemble ens = build_ensemble(cfg, graph.node_count());
  const std::size_t n = graph.node_count();
  const double l = ens.l;

  ExperimentResult result;
  result.nodes = n;
  result.edges = graph.edges().size();
  result.dim = ens.d;
  result.mu = ens.mu;
  result.l = l;
  result.lambda2 = weights.lambda2();
  result.lambda_n = weights.lambda_n();

  RunOptions opts;
  opts.max_iters = cfg.max_iters;
  opts.tol = cfg.tol;
  const Vector x0(n * ens.d, 0.0);
  constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

  struct Resolved {
    double alpha = kNan;
    DsgParams dsg;
  };
  std::vector<Resolved> resolved;
  for (const auto& a : cfg.algorithms) {
    Resolved r;
    if (is_dsg(a.kind)) {
      r.dsg.guards = {a.sigma_min.value_or(cfg.sigma_min).resolve(l), a.sigma_max.value_or(cfg.sigma_max).resolve(l)};
      r.dsg.sigma_init = a.sigma_init.value_or(cfg.sigma_init).resolve(l);
      r.dsg.rule = a.rule.value_or(cfg.rule);
      if (!(r.dsg.guards.sigma_min < r.dsg.guards.sigma_max)) {
        invalid(a.label + ".sigma_min", "resolves to a value not below sigma_max");
      }
      if (!r.dsg.guards.contains(r.dsg.sigma_init)) {
        invalid(a.label + ".sigma_init", "resolves outside [sigma_min, sigma_max]");
      }
    } else {
      r.alpha = a.alpha.value_or(cfg.alpha).resolve(l);
    }
    resolved.push_back(r);
  }

  std::vector<std::future<Trace>> jobs;
  for (std::size_t i = 0; i < cfg.algorithms.size(); ++i) {
    jobs.push_back(std::async(std::launch::async, [&, i] {
      const auto& a = cfg.algorithms[i];
      const auto& r = resolved[i];
      Trace t;
      switch (a.kind) {
        case AlgorithmKind::kDsg: t = run_dsg_form_a(ens, weights, r.dsg, x0, opts); break;
        case AlgorithmKind::kDsgPrimalDual: t = run_dsg_form_b(ens, weights, r.dsg, x0, opts); break;
        case AlgorithmKind::kTracking: t = run_gradient_tracking(ens, weights, r.alpha, x0, opts); break;
        case AlgorithmKind::kDgd: t = run_dgd(ens, weights, r.alpha, x0, opts); break;
      }
      t.algorithm = a.label;
      return t;
    }));
  }
  std::vector<AlgorithmKind> kinds;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    result.traces.push_back(jobs[i].get());
    kinds.push_back(cfg.algorithms[i].kind);
  }
  result.report = make_report(result.traces, kinds, cfg.target);
  for (std::size_t i = 0; i < resolved.size(); ++i) {
    auto& s = result.report.runs[i];
    s.alpha = resolved[i].alpha;
    if (is_dsg(kinds[i])) {
      s.sigma_min = resolved[i].dsg.guards.sigma_min;
      s.sigma_max = resolved[i].dsg.guards.sigma_max;
      s.sigma_init = resolved[i].dsg.sigma_init;
      s.safeguard_check =
          check_safeguards(ens.mu, l, weights.lambda2(), weights.lambda_n(), resolved[i].dsg.guards);
    } else {
      s.sigma_min = s.sigma_max = s.sigma_init = kNan;
    }
  }

  if (!cfg.output_dir.empty()) {
    const std::filesystem::path dir(cfg.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot create output directory '" + cfg.output_dir + "': " + ec.message());
    for (const auto& t : result.traces) {
      const auto path = (dir / (t.algorithm + ".csv")).string();
      emit_csv(t, path);
      result.written_files.push_back(path);
    }
    const auto graph_path = (dir / "graph.txt").string();
    save_edge_list(graph, graph_path);
    const auto weights_path = (dir / "weights.csv").string();
    save_csv(weights, weights_path);
    const auto ens_path = (dir / "ensemble.txt").string();
    save_ensemble(ens, ens_path);
    const auto report_path = (dir / "report.json").string();
    std::ofstream rep(report_path, std::ios::binary);
    if (!rep) throw Error(ErrorCode::kIo, "cannot open '" + report_path + "' for writing");
    rep << report_to_json(result) << '\n';
    result.written_files.insert(result.written_files.end(), {graph_path, weights_path, ens_path, report_path});
  }
  return result;
}

namespace {

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

std::string report_to_json(const ExperimentResult& r) {
  using nlohmann::json;
  json j;
  j["problem"] = {{"nodes", r.nodes}, {"edges", r.edges},     {"dim", r.dim},
                  {"mu", r.mu},       {"L", r.l},             {"lambda2", r.lambda2},
                  {"lambda_n", r.lambda_n}};
  j["target"] = r.report.target;
  j["runs"] = json::array();
  for (const auto& s : r.report.runs) {
    json run{{"label", s.label},
             {"algorithm", to_string(s.kind)},
             {"status", to_string(s.status)},
             {"iterations", s.iterations},
             {"iterations_to_target", s.iterations_to_target ? json(*s.iterations_to_target) : json(nullptr)},
             {"final_error", number_or_null(s.final_error)},
             {"rate", s.rate ? number_or_null(*s.rate) : json(nullptr)}};
    if (is_dsg(s.kind)) {
      run["sigma_min"] = s.sigma_min;
      run["sigma_max"] = s.sigma_max;
      run["sigma_init"] = s.sigma_init;
    } else {
      run["alpha"] = s.alpha;
    }
    if (s.safeguard_check) {
      const auto& c = *s.safeguard_check;
      run["safeguard_check"] = {{"d_min", c.d_min},
                                {"d_max", c.d_max},
                                {"ratio_condition", c.cond_ratio_ok},
                                {"magnitude_condition", c.cond_magnitude_ok},
                                {"rate_interval_lower", c.rate_lower},
                                {"rate_interval_empty", c.rate_interval_empty}};
    }
    j["runs"].push_back(std::move(run));
  }
  j["savings"] = json::array();
  for (const auto& s : r.report.savings) {
    j["savings"].push_back({{"subject", s.subject}, {"baseline", s.baseline}, {"ratio", s.ratio}});
  }
  return j.dump(2);
}

std::string format_report(const ExperimentResult& r) {
  std::ostringstream out;
  out << "network: n=" << r.nodes << " edges=" << r.edges << " lambda2=" << std::setprecision(6) << r.lambda2
      << " lambda_n=" << r.lambda_n << '\n';
  out << "problem: d=" << r.dim << " mu=" << r.mu << " L=" << r.l << '\n';
  out << "target relative error: " << r.report.target << "\n\n";
  out << std::left << std::setw(16) << "run" << std::setw(11) << "status" << std::setw(8) << "iters"
      << std::setw(12) << "to target" << std::setw(14) << "final error" << "rate\n";
  for (const auto& s : r.report.runs) {
    out << std::setw(16) << s.label << std::setw(11) << to_string(s.status) << std::setw(8) << s.iterations
        << std::setw(12) << (s.iterations_to_target ? std::to_string(*s.iterations_to_target) : "-")
        << std::setw(14) << std::setprecision(4) << std::scientific << s.final_error << std::defaultfloat;
    if (s.rate) {
      out << std::setprecision(4) << *s.rate;
    } else {
      out << '-';
    }
    out << '\n';
  }
  if (!r.report.savings.empty()) {
    out << '\n';
    for (const auto& s : r.report.savings) {
      out << "savings " << s.subject << " vs " << s.baseline << ": " << std::fixed << std::setprecision(1)
          << 100.0 * s.ratio << "%\n"
          << std::defaultfloat;
    }
  }
  return out.str();
}

}  // namespace dsg
