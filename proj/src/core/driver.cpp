#include "core/driver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/error.hpp"
#include "core/random.hpp"

namespace cbo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::string to_string(Mode m) {
  switch (m) {
    case Mode::kUnconstrained: return "unconstrained";
    case Mode::kConstrained: return "constrained";
    case Mode::kFrontier: return "frontier";
  }
  return "?";
}

Mode parse_mode(std::string_view s) {
  if (s == "unconstrained") return Mode::kUnconstrained;
  if (s == "constrained") return Mode::kConstrained;
  if (s == "frontier") return Mode::kFrontier;
  throw ConfigError("unknown mode '" + std::string(s) + "' (expected unconstrained, constrained or frontier)");
}

bool Feasibility::satisfied(double bv, double target) const {
  if (!std::isfinite(bv)) return false;
  return rule == Rule::kAtLeast ? bv >= target : std::abs(bv - target) <= tolerance;
}

void RunConfig::check() const {
  if (n_init < 1) throw ConfigError("n_init must be >= 1");
  if (n_total <= n_init) throw ConfigError("n_total must exceed n_init");
  if (mode == Mode::kConstrained && !std::isfinite(bv_target)) throw ConfigError("target must be finite");
  if (mode == Mode::kFrontier && !(std::isfinite(bv_low) && std::isfinite(bv_high) && bv_low < bv_high))
    throw ConfigError("frontier mode needs target_range lo < hi");
  if (feasibility.rule == Feasibility::Rule::kWithin && !(feasibility.tolerance >= 0.0))
    throw ConfigError("feasibility tolerance must be >= 0");
  if (max_invalid_retries < 0) throw ConfigError("max_invalid_retries must be >= 0");
  gp.check();
  acq.check();
  if (const auto own = builtin_space(evaluator); own && !(*own == space))
    throw ConfigError("evaluator " + evaluator.name() + " requires the " +
                      (evaluator.kind == EvaluatorSpec::Kind::kToy2d ? std::string("toy2d") : std::string("ldmos9")) +
                      " design space");
}

std::size_t Dataset::valid_count() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const RunRecord& r) { return r.eval.valid; }));
}

std::vector<FrontierPoint> Dataset::frontier_points(std::size_t end) const {
  std::vector<FrontierPoint> out;
  end = std::min(end, records.size());
  for (std::size_t i = 0; i < end; ++i)
    if (records[i].eval.valid) out.push_back({records[i].eval.bv, records[i].eval.fom, i});
  return out;
}

double objective_label(const RunRecord& r, double lambda, std::optional<double> target) {
  if (!r.eval.valid) return kNaN;
  if (!target) return r.eval.fom;
  return lagrangian(r.eval.fom, r.eval.bv, lambda, *target);
}

Campaign::Campaign(RunConfig cfg) {
  cfg.check();
  data_.config = std::move(cfg);
}

Campaign::~Campaign() = default;

void Campaign::append(RunRecord r, const ProgressSink& sink, Progress p) {
  r.iteration = data_.records.size() + 1;
  p.iteration = r.iteration;
  p.phase = r.phase;
  p.valid = r.eval.valid;
  data_.records.push_back(std::move(r));
  p.valid_records = data_.valid_count();
  p.incumbent = -std::numeric_limits<double>::infinity();
  p.best_fom = -std::numeric_limits<double>::infinity();
  for (const auto& rec : data_.records) {
    if (!rec.eval.valid) continue;
    p.incumbent = std::max(p.incumbent, objective_label(rec, p.lambda, p.target));
    p.best_fom = std::max(p.best_fom, rec.eval.fom);
  }
  if (sink) sink(p);
}

void Campaign::run(const ProgressSink& sink) {
  const RunConfig& cfg = data_.config;
  data_.records.clear();
  complete_ = false;
  if (!evaluator_) evaluator_ = make_evaluator(cfg.evaluator, cfg.space);

  Rng rng(cfg.seed);
  const auto max_attempts = static_cast<std::size_t>(cfg.max_invalid_retries) + 1;

  // Evaluate `first`; on failure log it and retry at fresh uniform points.
  auto evaluate_slot = [&](DesignPoint first, Phase phase, const LagrangeState* state,
                           std::optional<double> target, Progress progress) {
    DesignPoint x = std::move(first);
    for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
      if (attempt > 0) x = cfg.space.sample_uniform(rng, 1).front();
      RunRecord r;
      r.phase = phase;
      r.x = x;
      r.eval = evaluator_->evaluate(x);
      r.lambda_used = state ? state->lambda : 0.0;
      r.target_used = target;
      r.objective_label = objective_label(r, r.lambda_used, target);
      const bool ok = r.eval.valid;
      append(std::move(r), sink, progress);
      if (ok) return;
    }
    throw EvaluatorUnavailable("evaluation failed " + std::to_string(max_attempts) + " times in a row: " +
                               data_.records.back().eval.error);
  };

  // Initial design.
  const auto initial = cfg.space.sample_uniform(rng, cfg.n_init);
  for (const auto& x : initial) {
    Progress p;
    p.target = cfg.fixed_target();
    evaluate_slot(x, Phase::kInit, nullptr, cfg.fixed_target(), p);
  }

  for (std::size_t step = 1; data_.valid_count() < cfg.n_total; ++step) {
    std::optional<double> target;
    if (cfg.mode == Mode::kConstrained) target = cfg.bv_target;
    if (cfg.mode == Mode::kFrontier) target = rng.uniform(cfg.bv_low, cfg.bv_high);

    LagrangeState state = zero_multiplier(target.value_or(0.0));
    const auto history = data_.frontier_points();
    if (target && !cfg.force_zero_lambda && step > cfg.warmup_unconstrained)
      state = multiplier(upper_hull(history), *target);

    // Relabel every valid record under this iteration's lambda and target.
    std::vector<std::vector<double>> inputs;
    std::vector<double> labels;
    inputs.reserve(history.size());
    labels.reserve(history.size());
    for (const auto& fp : history) {
      const auto& rec = data_.records[fp.source_index];
      inputs.push_back(cfg.space.normalize(rec.x));
      labels.push_back(objective_label(rec, state.lambda, target));
    }
    const auto model = GpModel::fit(inputs, labels, cfg.gp);
    const auto acq = maximize(model, cfg.acq, rng.next_u64());

    Progress p;
    p.lambda = state.lambda;
    p.target = target;
    p.n_training = inputs.size();
    for (const auto& fp : history) p.training_sources.push_back(fp.source_index);
    p.training_labels = labels;
    for (const auto& h : state.hull.points) p.hull_sources.push_back(h.source_index);
    evaluate_slot(cfg.space.denormalize(acq.u), Phase::kBo, &state, target, p);
  }
  complete_ = true;
}

Dataset run(const RunConfig& cfg, const ProgressSink& sink) {
  Campaign c(cfg);
  c.run(sink);
  return c.dataset();
}

std::optional<RunRecord> best_feasible(const Dataset& ds, double target, const Feasibility& rule) {
  const RunRecord* best = nullptr;
  for (const auto& r : ds.records) {
    if (!r.eval.valid || !rule.satisfied(r.eval.bv, target)) continue;
    if (!best || r.eval.fom > best->eval.fom) best = &r;
  }
  return best ? std::optional<RunRecord>(*best) : std::nullopt;
}

std::optional<RunRecord> best_record(const Dataset& ds) {
  const RunRecord* best = nullptr;
  for (const auto& r : ds.records)
    if (r.eval.valid && (!best || r.eval.fom > best->eval.fom)) best = &r;
  return best ? std::optional<RunRecord>(*best) : std::nullopt;
}

UpperHull frontier_report(const Dataset& ds) {
  const auto pts = ds.frontier_points();
  if (pts.empty()) throw DomainError("no valid records to build a frontier from");
  return upper_hull(pts);
}

}  // namespace cbo
