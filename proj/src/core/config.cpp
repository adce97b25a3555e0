#include "core/config.hpp"

#include <limits>
#include <set>
#include <sstream>

#include "core/error.hpp"

namespace cbo {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key))
      throw ConfigError("unknown key '" + key + "'" + (where.empty() ? "" : " in " + where));
  }
}

const json& require_object(const json& v, const std::string& key) {
  if (!v.is_object()) throw ConfigError("'" + key + "' must be an object");
  return v;
}

double get_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
  return v.get<double>();
}

std::uint64_t get_count(const json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError("'" + key + "' must be a nonnegative integer");
}

int get_int(const json& v, const std::string& key) {
  const auto n = get_count(v, key);
  if (n > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) throw ConfigError("'" + key + "' too large");
  return static_cast<int>(n);
}

bool get_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) throw ConfigError("'" + key + "' must be true or false");
  return v.get<bool>();
}

std::string get_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError("'" + key + "' must be a string");
  return v.get<std::string>();
}

DesignSpace parse_space(const json& v) {
  if (v.is_string()) {
    const auto name = v.get<std::string>();
    if (name == "ldmos9") return DesignSpace::ldmos9();
    if (name == "toy2d") return DesignSpace::toy2d();
    throw ConfigError("unknown builtin space '" + name + "' (expected ldmos9 or toy2d)");
  }
  require_object(v, "space");
  reject_unknown(v, {"dims"}, "space");
  if (!v.contains("dims") || !v["dims"].is_array()) throw ConfigError("'space.dims' must be an array");
  std::vector<Dimension> dims;
  for (const auto& d : v["dims"]) {
    require_object(d, "space.dims[]");
    reject_unknown(d, {"name", "lower", "upper", "scale"}, "space.dims[]");
    if (!d.contains("name") || !d.contains("lower") || !d.contains("upper"))
      throw ConfigError("each dimension needs name, lower and upper");
    Dimension dim;
    dim.name = get_string(d["name"], "name");
    dim.lower = get_number(d["lower"], "lower");
    dim.upper = get_number(d["upper"], "upper");
    if (d.contains("scale")) dim.scale = parse_scale(get_string(d["scale"], "scale"));
    dims.push_back(std::move(dim));
  }
  return DesignSpace(std::move(dims));
}

EvaluatorSpec parse_evaluator(const json& v) {
  if (v.is_string()) return parse_evaluator_flag(v.get<std::string>());
  require_object(v, "evaluator");
  reject_unknown(v, {"kind", "command", "timeout"}, "evaluator");
  if (!v.contains("kind")) throw ConfigError("'evaluator.kind' is required");
  const auto kind = get_string(v["kind"], "evaluator.kind");
  if (kind != "subprocess") {
    if (v.contains("command")) throw ConfigError("'evaluator.command' only applies to subprocess evaluators");
    auto spec = EvaluatorSpec::builtin(kind);
    if (v.contains("timeout")) spec.timeout_s = get_number(v["timeout"], "evaluator.timeout");
    return spec;
  }
  if (!v.contains("command") || !v["command"].is_array() || v["command"].empty())
    throw ConfigError("'evaluator.command' must be a nonempty array of strings");
  std::vector<std::string> argv;
  for (const auto& a : v["command"]) argv.push_back(get_string(a, "evaluator.command[]"));
  const double timeout = v.contains("timeout") ? get_number(v["timeout"], "evaluator.timeout") : 300.0;
  return EvaluatorSpec::subprocess(std::move(argv), timeout);
}

Feasibility parse_feasibility(const json& v) {
  Feasibility f;
  std::string rule;
  if (v.is_string()) {
    rule = v.get<std::string>();
  } else {
    require_object(v, "feasibility");
    reject_unknown(v, {"rule", "tolerance"}, "feasibility");
    if (!v.contains("rule")) throw ConfigError("'feasibility.rule' is required");
    rule = get_string(v["rule"], "feasibility.rule");
    if (v.contains("tolerance")) f.tolerance = get_number(v["tolerance"], "feasibility.tolerance");
  }
  if (rule == "at_least") {
    f.rule = Feasibility::Rule::kAtLeast;
  } else if (rule == "within") {
    f.rule = Feasibility::Rule::kWithin;
  } else {
    throw ConfigError("unknown feasibility rule '" + rule + "' (expected at_least or within)");
  }
  return f;
}

GpConfig parse_gp(const json& v) {
  require_object(v, "gp");
  reject_unknown(v, {"length_scale", "jitter_start", "jitter_max", "optimize_length_scale", "length_scale_min",
                     "length_scale_max"},
                 "gp");
  GpConfig g;
  if (v.contains("length_scale")) g.length_scale = get_number(v["length_scale"], "gp.length_scale");
  if (v.contains("jitter_start")) g.jitter_start = get_number(v["jitter_start"], "gp.jitter_start");
  if (v.contains("jitter_max")) g.jitter_max = get_number(v["jitter_max"], "gp.jitter_max");
  if (v.contains("optimize_length_scale"))
    g.optimize_length_scale = get_bool(v["optimize_length_scale"], "gp.optimize_length_scale");
  if (v.contains("length_scale_min")) g.length_scale_min = get_number(v["length_scale_min"], "gp.length_scale_min");
  if (v.contains("length_scale_max")) g.length_scale_max = get_number(v["length_scale_max"], "gp.length_scale_max");
  return g;
}

AcquisitionConfig parse_acquisition(const json& v) {
  require_object(v, "acquisition");
  reject_unknown(v, {"n_restarts", "lbfgs_max_iterations", "candidate_pool", "xi", "gradient", "fd_step"},
                 "acquisition");
  AcquisitionConfig a;
  if (v.contains("n_restarts")) a.n_restarts = get_int(v["n_restarts"], "acquisition.n_restarts");
  if (v.contains("lbfgs_max_iterations"))
    a.lbfgs_max_iterations = get_int(v["lbfgs_max_iterations"], "acquisition.lbfgs_max_iterations");
  if (v.contains("candidate_pool")) a.candidate_pool = get_int(v["candidate_pool"], "acquisition.candidate_pool");
  if (v.contains("xi")) a.xi = get_number(v["xi"], "acquisition.xi");
  if (v.contains("fd_step")) a.fd_step = get_number(v["fd_step"], "acquisition.fd_step");
  if (v.contains("gradient")) {
    const auto g = get_string(v["gradient"], "acquisition.gradient");
    if (g == "analytic") {
      a.gradient = AcquisitionConfig::Gradient::kAnalytic;
    } else if (g == "finite_difference") {
      a.gradient = AcquisitionConfig::Gradient::kFiniteDifference;
    } else {
      throw ConfigError("unknown acquisition.gradient '" + g + "' (expected analytic or finite_difference)");
    }
  }
  return a;
}

}  // namespace

EvaluatorSpec parse_evaluator_flag(const std::string& text) {
  if (text.rfind("cmd:", 0) == 0) {
    std::istringstream in(text.substr(4));
    std::vector<std::string> argv;
    for (std::string tok; in >> tok;) argv.push_back(tok);
    return EvaluatorSpec::subprocess(std::move(argv));
  }
  return EvaluatorSpec::builtin(text);
}

CampaignSettings parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(doc,
                 {"space", "evaluator", "mode", "target", "target_range", "n_init", "n_total", "seed", "out",
                  "warmup_unconstrained", "feasibility", "gp", "acquisition", "force_zero_lambda",
                  "max_invalid_retries"},
                 "");
  CampaignSettings s;
  RunConfig& rc = s.run;

  if (doc.contains("evaluator")) rc.evaluator = parse_evaluator(doc["evaluator"]);
  if (doc.contains("space")) {
    rc.space = parse_space(doc["space"]);
  } else if (const auto own = builtin_space(rc.evaluator)) {
    rc.space = *own;
  } else {
    throw ConfigError("'space' is required with a subprocess evaluator");
  }
  if (doc.contains("mode")) rc.mode = parse_mode(get_string(doc["mode"], "mode"));
  if (doc.contains("target")) rc.bv_target = get_number(doc["target"], "target");
  if (doc.contains("target_range")) {
    const auto& tr = doc["target_range"];
    if (!tr.is_array() || tr.size() != 2) throw ConfigError("'target_range' must be [lo, hi]");
    rc.bv_low = get_number(tr[0], "target_range");
    rc.bv_high = get_number(tr[1], "target_range");
  }
  if (rc.mode == Mode::kConstrained && !doc.contains("target"))
    throw ConfigError("'target' is required in constrained mode");
  if (rc.mode == Mode::kFrontier && !doc.contains("target_range"))
    throw ConfigError("'target_range' is required in frontier mode");
  if (doc.contains("n_init")) rc.n_init = get_count(doc["n_init"], "n_init");
  if (doc.contains("n_total")) rc.n_total = get_count(doc["n_total"], "n_total");
  if (doc.contains("seed")) rc.seed = get_count(doc["seed"], "seed");
  if (doc.contains("warmup_unconstrained"))
    rc.warmup_unconstrained = get_count(doc["warmup_unconstrained"], "warmup_unconstrained");
  if (doc.contains("feasibility")) rc.feasibility = parse_feasibility(doc["feasibility"]);
  if (doc.contains("gp")) rc.gp = parse_gp(doc["gp"]);
  if (doc.contains("acquisition")) rc.acq = parse_acquisition(doc["acquisition"]);
  if (doc.contains("force_zero_lambda")) rc.force_zero_lambda = get_bool(doc["force_zero_lambda"], "force_zero_lambda");
  if (doc.contains("max_invalid_retries"))
    rc.max_invalid_retries = get_int(doc["max_invalid_retries"], "max_invalid_retries");
  if (doc.contains("out")) s.out_dir = get_string(doc["out"], "out");
  rc.check();
  return s;
}

CampaignSettings parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

json merge_overrides(json base, const json& overrides) {
  if (base.is_null()) base = json::object();
  if (!base.is_object()) throw ConfigError("config must be a JSON object");
  if (overrides.is_null()) return base;
  if (!overrides.is_object()) throw ConfigError("overrides must be a JSON object");
  for (const auto& [key, value] : overrides.items()) base[key] = value;
  return base;
}

json to_json(const CampaignSettings& s) {
  const RunConfig& rc = s.run;
  json dims = json::array();
  for (const auto& d : rc.space.dims())
    dims.push_back({{"name", d.name}, {"lower", d.lower}, {"upper", d.upper}, {"scale", to_string(d.scale)}});

  json evaluator = {{"kind", rc.evaluator.name()}, {"timeout", rc.evaluator.timeout_s}};
  if (!rc.evaluator.is_builtin()) evaluator["command"] = rc.evaluator.command;

  json feasibility = {{"rule", rc.feasibility.rule == Feasibility::Rule::kAtLeast ? "at_least" : "within"},
                      {"tolerance", rc.feasibility.tolerance}};

  json doc = {
      {"space", {{"dims", dims}}},
      {"evaluator", evaluator},
      {"mode", to_string(rc.mode)},
      {"n_init", rc.n_init},
      {"n_total", rc.n_total},
      {"seed", rc.seed},
      {"out", s.out_dir},
      {"warmup_unconstrained", rc.warmup_unconstrained},
      {"feasibility", feasibility},
      {"gp",
       {{"length_scale", rc.gp.length_scale},
        {"jitter_start", rc.gp.jitter_start},
        {"jitter_max", rc.gp.jitter_max},
        {"optimize_length_scale", rc.gp.optimize_length_scale},
        {"length_scale_min", rc.gp.length_scale_min},
        {"length_scale_max", rc.gp.length_scale_max}}},
      {"acquisition",
       {{"n_restarts", rc.acq.n_restarts},
        {"lbfgs_max_iterations", rc.acq.lbfgs_max_iterations},
        {"candidate_pool", rc.acq.candidate_pool},
        {"xi", rc.acq.xi},
        {"fd_step", rc.acq.fd_step},
        {"gradient",
         rc.acq.gradient == AcquisitionConfig::Gradient::kAnalytic ? "analytic" : "finite_difference"}}},
      {"force_zero_lambda", rc.force_zero_lambda},
      {"max_invalid_retries", rc.max_invalid_retries},
  };
  if (rc.mode == Mode::kConstrained) doc["target"] = rc.bv_target;
  if (rc.mode == Mode::kFrontier) doc["target_range"] = {rc.bv_low, rc.bv_high};
  return doc;
}

}  // namespace cbo
