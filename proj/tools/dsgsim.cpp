#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dsg/dsg.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 3;

int report_failure(const char* what) {
  std::fprintf(stderr, "dsgsim: %s: %s\n", what, dsg_last_error());
  return kExitError;
}

struct Overrides {
  std::optional<uint64_t> seed;
  std::optional<std::string> output_dir;
};

int run_config(const std::string& path, const Overrides& ov, bool compare, bool json) {
  dsg_experiment* x = nullptr;
  if (dsg_experiment_load(path.c_str(), &x) != DSG_OK) return report_failure("cannot load config");
  if (ov.seed) dsg_experiment_set_seed(x, *ov.seed);
  if (ov.output_dir) dsg_experiment_set_output_dir(x, ov.output_dir->c_str());
  if (dsg_experiment_run(x) != DSG_OK) {
    const int rc = report_failure("experiment failed");
    dsg_experiment_free(x);
    return rc;
  }

  char* text = nullptr;
  const dsg_status s = json ? dsg_experiment_report_json(x, &text) : dsg_experiment_summary(x, &text);
  if (s != DSG_OK) {
    const int rc = report_failure("cannot format report");
    dsg_experiment_free(x);
    return rc;
  }
  if (json || compare) {
    std::fputs(text, stdout);
    if (json) std::fputc('\n', stdout);
  } else {
    // run: the table only, without savings lines
    std::string body(text);
    const auto cut = body.find("\nsavings ");
    std::fputs(body.substr(0, cut == std::string::npos ? body.size() : cut + 1).c_str(), stdout);
  }
  dsg_string_free(text);

  const int rc = dsg_experiment_all_converged(x) ? kExitOk : kExitNotConverged;
  dsg_experiment_free(x);
  return rc;
}

int verify() {
  int ok = 0;
  char* text = nullptr;
  if (dsg_verify(&ok, &text) != DSG_OK) return report_failure("verify failed");
  std::fputs(text, stdout);
  dsg_string_free(text);
  std::printf("%s\n", ok ? "all checks passed" : "some checks FAILED");
  return ok ? kExitOk : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed spectral gradient simulator"};
  app.set_version_flag("--version", std::string(dsg_version()));
  app.require_subcommand(1);

  Overrides ov;
  std::string config;
  bool json = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config, "experiment config file")->required()->check(CLI::ExistingFile);
    sub->add_option_function<uint64_t>("--seed", [&](const uint64_t& v) { ov.seed = v; }, "override the config seed");
    sub->add_option_function<std::string>(
        "--output-dir", [&](const std::string& v) { ov.output_dir = v; }, "write CSVs and report here");
    sub->add_flag("--json", json, "print the report as JSON");
  };
  auto* run = app.add_subcommand("run", "run every algorithm in a config and write traces");
  add_common(run);
  auto* compare = app.add_subcommand("compare", "run a config and print the iteration-savings report");
  add_common(compare);
  app.add_subcommand("verify", "run the built-in oracle checks");

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand("verify")) return verify();
  return run_config(config, ov, app.got_subcommand("compare"), json);
}
