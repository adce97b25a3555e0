#include "cbo/cbo.h"

#include <cstring>
#include <memory>
#include <string>

#include <json.hpp>

#include "core/config.hpp"
#include "core/driver.hpp"
#include "core/error.hpp"
#include "core/evaluators.hpp"
#include "core/lagrange.hpp"
#include "core/oracle.hpp"
#include "core/report.hpp"
#include "core/run_store.hpp"

struct cbo_campaign {
  cbo::CampaignSettings settings;
  std::unique_ptr<cbo::Campaign> campaign;
  cbo_progress_fn progress = nullptr;
  void* progress_user = nullptr;
  bool ran = false;
  std::string abort_reason;
};

namespace {

thread_local std::string g_last_error;

cbo_status fail(cbo_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Runs `body`, translating engine exceptions into status codes.
template <class F>
cbo_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const cbo::ConfigError& e) {
    return fail(CBO_CONFIG_ERROR, e.what());
  } catch (const cbo::EvaluatorUnavailable& e) {
    return fail(CBO_EVALUATOR_ERROR, e.what());
  } catch (const cbo::RunInputError& e) {
    return fail(CBO_RUN_INPUT_ERROR, e.what());
  } catch (const cbo::DomainError& e) {
    return fail(CBO_INVALID_ARGUMENT, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(CBO_CONFIG_ERROR, e.what());
  } catch (const std::exception& e) {
    return fail(CBO_ERROR, e.what());
  } catch (...) {
    return fail(CBO_ERROR, "unknown failure");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nlohmann::json parse_json_arg(const char* text, const char* what) {
  if (!text) return nullptr;
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw cbo::ConfigError(std::string(what) + " is not valid JSON: " + e.what());
  }
}

nlohmann::json record_json(const cbo::RunRecord& r, const cbo::DesignSpace& space) {
  nlohmann::json x = nlohmann::json::object();
  for (std::size_t i = 0; i < space.size(); ++i) x[space[i].name] = r.x[i];
  return {{"iteration", r.iteration}, {"x", x},          {"bv", r.eval.bv},
          {"rsp_on", r.eval.rsp_on},  {"fom", r.eval.fom}, {"lambda_used", r.lambda_used}};
}

nlohmann::json evaluation_json(const cbo::DesignPoint& x, const cbo::Evaluation& e, const cbo::DesignSpace& space) {
  nlohmann::json xs = nlohmann::json::object();
  for (std::size_t i = 0; i < space.size(); ++i) xs[space[i].name] = x[i];
  return {{"x", xs}, {"bv", e.bv}, {"rsp_on", e.rsp_on}, {"fom", e.fom}};
}

std::vector<cbo::FrontierPoint> frontier_input(const double* bv, const double* fom, size_t n) {
  if (!bv || !fom || n == 0) throw cbo::DomainError("need at least one (bv, fom) point");
  std::vector<cbo::FrontierPoint> pts(n);
  for (size_t i = 0; i < n; ++i) pts[i] = {bv[i], fom[i], i};
  return pts;
}

}  // namespace

extern "C" {

const char* cbo_version(void) { return CBO_VERSION_STRING; }

const char* cbo_last_error(void) { return g_last_error.c_str(); }

void cbo_string_free(char* s) { std::free(s); }

cbo_status cbo_campaign_create(const char* config_json, const char* overrides_json, cbo_campaign** out) {
  return guarded([&] {
    if (!out) return fail(CBO_INVALID_ARGUMENT, "null output handle");
    *out = nullptr;
    auto doc = parse_json_arg(config_json, "config");
    doc = cbo::merge_overrides(std::move(doc), parse_json_arg(overrides_json, "overrides"));
    auto handle = std::make_unique<cbo_campaign>();
    handle->settings = cbo::parse_config(doc);
    handle->campaign = std::make_unique<cbo::Campaign>(handle->settings.run);
    *out = handle.release();
    return CBO_OK;
  });
}

void cbo_campaign_destroy(cbo_campaign* campaign) { delete campaign; }

cbo_status cbo_campaign_set_progress(cbo_campaign* campaign, cbo_progress_fn fn, void* user) {
  if (!campaign) return fail(CBO_INVALID_ARGUMENT, "null campaign");
  campaign->progress = fn;
  campaign->progress_user = user;
  return CBO_OK;
}

cbo_status cbo_campaign_run(cbo_campaign* campaign, int write_run_dir) {
  if (!campaign) return fail(CBO_INVALID_ARGUMENT, "null campaign");
  cbo::ProgressSink sink;
  if (campaign->progress) {
    sink = [campaign](const cbo::Progress& p) {
      cbo_progress c{};
      c.iteration = p.iteration;
      c.phase = p.phase == cbo::Phase::kInit ? CBO_PHASE_INIT : CBO_PHASE_BO;
      c.valid = p.valid ? 1 : 0;
      c.valid_records = p.valid_records;
      c.incumbent = p.incumbent;
      c.best_fom = p.best_fom;
      c.lambda = p.lambda;
      c.has_target = p.target ? 1 : 0;
      c.target = p.target.value_or(0.0);
      c.n_training = p.n_training;
      campaign->progress(&c, campaign->progress_user);
    };
  }
  const cbo_status status = guarded([&] {
    campaign->ran = true;
    campaign->abort_reason.clear();
    campaign->campaign->run(sink);
    return CBO_OK;
  });
  if (status != CBO_OK) campaign->abort_reason = g_last_error;
  if (!write_run_dir) return status;
  const std::string reason = campaign->abort_reason;
  const cbo_status written = guarded([&] {
    cbo::write_run_dir(campaign->settings.out_dir, campaign->settings, campaign->campaign->dataset(),
                       campaign->campaign->complete(), reason);
    return CBO_OK;
  });
  if (status != CBO_OK) {
    g_last_error = reason;
    return status;
  }
  return written;
}

cbo_status cbo_campaign_config_json(const cbo_campaign* campaign, char** out) {
  return guarded([&] {
    if (!campaign || !out) return fail(CBO_INVALID_ARGUMENT, "null argument");
    *out = dup_string(cbo::to_json(campaign->settings).dump(2));
    return CBO_OK;
  });
}

size_t cbo_campaign_dimension(const cbo_campaign* campaign) {
  return campaign ? campaign->settings.run.space.size() : 0;
}

size_t cbo_campaign_record_count(const cbo_campaign* campaign) {
  return campaign ? campaign->campaign->dataset().records.size() : 0;
}

cbo_status cbo_campaign_record(const cbo_campaign* campaign, size_t index, cbo_record* out) {
  if (!campaign || !out) return fail(CBO_INVALID_ARGUMENT, "null argument");
  const auto& recs = campaign->campaign->dataset().records;
  if (index >= recs.size()) return fail(CBO_INVALID_ARGUMENT, "record index out of range");
  const auto& r = recs[index];
  out->iteration = r.iteration;
  out->phase = r.phase == cbo::Phase::kInit ? CBO_PHASE_INIT : CBO_PHASE_BO;
  out->valid = r.eval.valid ? 1 : 0;
  out->bv = r.eval.bv;
  out->rsp_on = r.eval.rsp_on;
  out->fom = r.eval.fom;
  out->lambda_used = r.lambda_used;
  out->has_target = r.target_used ? 1 : 0;
  out->target_used = r.target_used.value_or(0.0);
  out->objective_label = r.objective_label;
  return CBO_OK;
}

cbo_status cbo_campaign_record_x(const cbo_campaign* campaign, size_t index, double* x, size_t cap) {
  if (!campaign || !x) return fail(CBO_INVALID_ARGUMENT, "null argument");
  const auto& recs = campaign->campaign->dataset().records;
  if (index >= recs.size()) return fail(CBO_INVALID_ARGUMENT, "record index out of range");
  const auto& v = recs[index].x;
  if (cap < v.size()) return fail(CBO_INVALID_ARGUMENT, "buffer too small");
  std::copy(v.begin(), v.end(), x);
  return CBO_OK;
}

cbo_status cbo_campaign_summary(const cbo_campaign* campaign, char** out) {
  return guarded([&] {
    if (!campaign || !out) return fail(CBO_INVALID_ARGUMENT, "null argument");
    const auto& ds = campaign->campaign->dataset();
    const auto& rc = campaign->settings.run;
    nlohmann::json s = {
        {"status", campaign->campaign->complete() ? "complete" : (campaign->ran ? "aborted" : "not_run")},
        {"mode", cbo::to_string(rc.mode)},
        {"out", campaign->settings.out_dir},
        {"records", ds.records.size()},
        {"valid_records", ds.valid_count()},
    };
    if (!campaign->abort_reason.empty()) s["error"] = campaign->abort_reason;
    const auto best = cbo::best_record(ds);
    s["incumbent"] = best ? record_json(*best, rc.space) : nlohmann::json(nullptr);
    if (const auto t = rc.fixed_target()) {
      s["target"] = *t;
      const auto bf = cbo::best_feasible(ds, *t, rc.feasibility);
      s["best_feasible"] = bf ? record_json(*bf, rc.space) : nlohmann::json(nullptr);
    }
    *out = dup_string(s.dump(2));
    return CBO_OK;
  });
}

cbo_status cbo_report(const char* run_dir) {
  return guarded([&] {
    if (!run_dir) return fail(CBO_INVALID_ARGUMENT, "null run directory");
    cbo::report_run_dir(run_dir);
    return CBO_OK;
  });
}

cbo_status cbo_oracle(const char* evaluator, const double* target, size_t resolution, uint64_t seed, size_t samples,
                      char** out) {
  return guarded([&] {
    if (!evaluator || !out) return fail(CBO_INVALID_ARGUMENT, "null argument");
    const std::optional<double> t = target ? std::optional<double>(*target) : std::nullopt;
    const auto r = cbo::run_oracle(evaluator, t, resolution, seed, samples);
    const auto space = r.evaluator == "toy2d" ? cbo::DesignSpace::toy2d() : cbo::DesignSpace::ldmos9();
    nlohmann::json j = {{"evaluator", r.evaluator},
                        {"evaluations", r.evaluations},
                        {"best", evaluation_json(r.best_x, r.best, space)}};
    if (t) {
      j["target"] = *t;
      j["feasible"] = r.constrained.has_value();
      j["constrained_best"] =
          r.constrained ? evaluation_json(*r.constrained_x, *r.constrained, space) : nlohmann::json(nullptr);
    }
    *out = dup_string(j.dump(2));
    return CBO_OK;
  });
}

cbo_status cbo_fom(double bv, double rsp_on, double* out) {
  return guarded([&] {
    if (!out) return fail(CBO_INVALID_ARGUMENT, "null output");
    *out = cbo::fom(bv, rsp_on);
    return CBO_OK;
  });
}

cbo_status cbo_evaluate_builtin(const char* evaluator, const double* x, size_t n, double* bv, double* rsp_on,
                                double* fom) {
  return guarded([&] {
    if (!evaluator || !x || !bv || !rsp_on || !fom) return fail(CBO_INVALID_ARGUMENT, "null argument");
    const auto spec = cbo::EvaluatorSpec::builtin(evaluator);
    const auto e = cbo::evaluate(spec, std::span<const double>(x, n));
    *bv = e.bv;
    *rsp_on = e.rsp_on;
    *fom = e.fom;
    return CBO_OK;
  });
}

cbo_status cbo_upper_hull(const double* bv, const double* fom, size_t n, size_t* out_idx, size_t* out_n) {
  return guarded([&] {
    if (!out_idx || !out_n) return fail(CBO_INVALID_ARGUMENT, "null output");
    const auto hull = cbo::upper_hull(frontier_input(bv, fom, n));
    for (size_t i = 0; i < hull.size(); ++i) out_idx[i] = hull.points[i].source_index;
    *out_n = hull.size();
    return CBO_OK;
  });
}

cbo_status cbo_multiplier(const double* bv, const double* fom, size_t n, double target, double* lambda,
                          int* clamped) {
  return guarded([&] {
    if (!lambda) return fail(CBO_INVALID_ARGUMENT, "null output");
    const auto state = cbo::multiplier(cbo::upper_hull(frontier_input(bv, fom, n)), target);
    *lambda = state.lambda;
    if (clamped) *clamped = state.clamped ? 1 : 0;
    return CBO_OK;
  });
}

double cbo_lagrangian(double fom, double bv, double lambda, double target) {
  return cbo::lagrangian(fom, bv, lambda, target);
}

}  // extern "C"
