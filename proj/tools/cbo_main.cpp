// cbo: command-line front end (run, report, oracle) over the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cbo/cbo.h"

namespace {

using nlohmann::json;

std::string take(char* s) {
  std::string out = s ? s : "";
  cbo_string_free(s);
  return out;
}

std::string format_point(const json& x) {
  std::string s = "[";
  bool first = true;
  for (const auto& [name, v] : x.items()) {
    if (!first) s += ", ";
    first = false;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v.get<double>());
    s += name + "=" + buf;
  }
  return s + "]";
}

void print_evaluation(const char* label, const json& e) {
  std::printf("%s: fom=%.6f kW/mm^2 bv=%.6f V rsp_on=%.6f mOhm*mm^2 x=%s\n", label, e["fom"].get<double>(),
              e["bv"].get<double>(), e["rsp_on"].get<double>(), format_point(e["x"]).c_str());
}

int report_error(cbo_status s) {
  std::fprintf(stderr, "cbo: %s\n", cbo_last_error());
  return static_cast<int>(s);
}

void print_progress(const cbo_progress* p, void*) {
  if (p->phase == CBO_PHASE_INIT) {
    std::fprintf(stderr, "[%4zu] init  valid=%d best_fom=%.4f\n", p->iteration, p->valid, p->best_fom);
  } else if (p->has_target) {
    std::fprintf(stderr, "[%4zu] bo    valid=%d target=%.3f lambda=%.6g incumbent=%.4f best_fom=%.4f\n",
                 p->iteration, p->valid, p->target, p->lambda, p->incumbent, p->best_fom);
  } else {
    std::fprintf(stderr, "[%4zu] bo    valid=%d best_fom=%.4f\n", p->iteration, p->valid, p->best_fom);
  }
}

struct RunOptions {
  std::string config;
  std::string out;
  std::string mode;
  std::string evaluator;
  std::string target_range;
  double target = 0.0;
  std::uint64_t seed = 0;
  std::size_t n_init = 0;
  std::size_t n_total = 0;
  bool quiet = false;
};

int cmd_run(const RunOptions& o, const CLI::App& app) {
  std::string config_text = "{}";
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) {
      std::fprintf(stderr, "cbo: cannot read config %s\n", o.config.c_str());
      return CBO_CONFIG_ERROR;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    config_text = ss.str();
  }

  json overrides = json::object();
  if (app.count("--seed")) overrides["seed"] = o.seed;
  if (app.count("--out")) overrides["out"] = o.out;
  if (app.count("--mode")) overrides["mode"] = o.mode;
  if (app.count("--target")) overrides["target"] = o.target;
  if (app.count("--n-init")) overrides["n_init"] = o.n_init;
  if (app.count("--n-total")) overrides["n_total"] = o.n_total;
  if (app.count("--evaluator")) overrides["evaluator"] = o.evaluator;
  if (app.count("--target-range")) {
    const auto colon = o.target_range.find(':');
    try {
      if (colon == std::string::npos) throw std::invalid_argument("no colon");
      std::size_t used_lo = 0, used_hi = 0;
      const std::string lo_s = o.target_range.substr(0, colon);
      const std::string hi_s = o.target_range.substr(colon + 1);
      const double lo = std::stod(lo_s, &used_lo);
      const double hi = std::stod(hi_s, &used_hi);
      if (used_lo != lo_s.size() || used_hi != hi_s.size()) throw std::invalid_argument("trailing text");
      overrides["target_range"] = {lo, hi};
    } catch (const std::exception&) {
      std::fprintf(stderr, "cbo: --target-range expects LO:HI, got '%s'\n", o.target_range.c_str());
      return CBO_CONFIG_ERROR;
    }
  }

  cbo_campaign* c = nullptr;
  if (const auto s = cbo_campaign_create(config_text.c_str(), overrides.dump().c_str(), &c); s != CBO_OK)
    return report_error(s);
  if (!o.quiet) cbo_campaign_set_progress(c, print_progress, nullptr);
  const auto status = cbo_campaign_run(c, 1);
  if (status != CBO_OK) std::fprintf(stderr, "cbo: %s\n", cbo_last_error());

  char* raw = nullptr;
  if (cbo_campaign_summary(c, &raw) == CBO_OK) {
    const json summary = json::parse(take(raw));
    std::printf("run directory: %s (%s, %zu records, %zu valid)\n", summary["out"].get<std::string>().c_str(),
                summary["status"].get<std::string>().c_str(), summary["records"].get<std::size_t>(),
                summary["valid_records"].get<std::size_t>());
    if (!summary["incumbent"].is_null()) print_evaluation("incumbent", summary["incumbent"]);
    if (summary.contains("best_feasible")) {
      if (summary["best_feasible"].is_null()) {
        std::printf("best feasible (target %.6g V): none\n", summary["target"].get<double>());
      } else {
        char label[64];
        std::snprintf(label, sizeof label, "best feasible (target %.6g V)", summary["target"].get<double>());
        print_evaluation(label, summary["best_feasible"]);
      }
    }
  }
  cbo_campaign_destroy(c);
  return static_cast<int>(status);
}

struct OracleOptions {
  std::string evaluator = "toy2d";
  std::string mode = "unconstrained";
  double target = 0.0;
  std::size_t resolution = 1001;
  std::size_t samples = 1000000;
  std::uint64_t seed = 0;
  bool as_json = false;
};

int cmd_oracle(const OracleOptions& o, const CLI::App& app) {
  const bool has_target = app.count("--target") > 0;
  if (o.mode == "constrained" && !has_target) {
    std::fprintf(stderr, "cbo: constrained oracle needs --target\n");
    return CBO_CONFIG_ERROR;
  }
  char* raw = nullptr;
  const auto s = cbo_oracle(o.evaluator.c_str(), has_target ? &o.target : nullptr, o.resolution, o.seed, o.samples,
                            &raw);
  if (s != CBO_OK) return report_error(s);
  const std::string text = take(raw);
  if (o.as_json) {
    std::printf("%s\n", text.c_str());
    return 0;
  }
  const json r = json::parse(text);
  std::printf("evaluator: %s (%zu evaluations)\n", r["evaluator"].get<std::string>().c_str(),
              r["evaluations"].get<std::size_t>());
  print_evaluation("best", r["best"]);
  if (has_target) {
    if (r["feasible"].get<bool>()) {
      char label[64];
      std::snprintf(label, sizeof label, "constrained best (bv >= %.6g V)", o.target);
      print_evaluation(label, r["constrained_best"]);
    } else {
      std::printf("constrained best (bv >= %.6g V): infeasible, no sampled point reaches the target\n", o.target);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained Bayesian optimization with a hull-derived Lagrange multiplier"};
  app.set_version_flag("--version", std::string(cbo_version()));
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run a campaign and write its run directory");
  run_cmd->add_option("--config", run.config, "JSON config file");
  run_cmd->add_option("--seed", run.seed, "RNG seed");
  run_cmd->add_option("--out", run.out, "Run directory");
  run_cmd->add_option("--mode", run.mode, "unconstrained | constrained | frontier");
  run_cmd->add_option("--target", run.target, "Target breakdown voltage (V)");
  run_cmd->add_option("--target-range", run.target_range, "Frontier target range LO:HI (V)");
  run_cmd->add_option("--n-init", run.n_init, "Initial random designs");
  run_cmd->add_option("--n-total", run.n_total, "Total valid evaluations");
  run_cmd->add_option("--evaluator", run.evaluator, "toy2d | ldmos9-surrogate | cmd:ARGV");
  run_cmd->add_flag("-q,--quiet", run.quiet, "No per-iteration progress");

  std::string run_dir;
  auto* report_cmd = app.add_subcommand("report", "Write plots and CSV summaries for a run directory");
  report_cmd->add_option("run_dir", run_dir, "Run directory")->required();

  OracleOptions oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force reference optimum of a builtin evaluator");
  oracle_cmd->add_option("--evaluator", oracle.evaluator, "toy2d | ldmos9-surrogate");
  oracle_cmd->add_option("--mode", oracle.mode, "unconstrained | constrained")
      ->check(CLI::IsMember({"unconstrained", "constrained"}));
  oracle_cmd->add_option("--target", oracle.target, "Breakdown-voltage target (V)");
  oracle_cmd->add_option("--resolution", oracle.resolution, "Grid points per axis (toy2d)");
  oracle_cmd->add_option("--samples", oracle.samples, "Random samples (ldmos9-surrogate)");
  oracle_cmd->add_option("--seed", oracle.seed, "Sampling seed (ldmos9-surrogate)");
  oracle_cmd->add_flag("--json", oracle.as_json, "Print the raw JSON result");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : CBO_CONFIG_ERROR;
  }

  if (*run_cmd) return cmd_run(run, *run_cmd);
  if (*report_cmd) {
    const auto s = cbo_report(run_dir.c_str());
    if (s != CBO_OK) return report_error(s);
    std::printf("wrote scatter.svg, frontier.svg, frontier.csv, convergence.csv to %s\n", run_dir.c_str());
    return 0;
  }
  if (*oracle_cmd) return cmd_oracle(oracle, *oracle_cmd);
  return CBO_CONFIG_ERROR;
}
