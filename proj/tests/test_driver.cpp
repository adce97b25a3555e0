#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "core/driver.hpp"
#include "core/error.hpp"

using namespace cbo;

namespace {

RunConfig toy(Mode mode, std::uint64_t seed, std::size_t n_total = 40) {
  RunConfig c;
  c.space = DesignSpace::toy2d();
  c.evaluator = EvaluatorSpec::builtin("toy2d");
  c.mode = mode;
  c.bv_target = 50.0;
  c.bv_low = 35.0;
  c.bv_high = 50.0;
  c.n_init = 10;
  c.n_total = n_total;
  c.seed = seed;
  return c;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool same_trajectory(const Dataset& a, const Dataset& b) {
  if (a.records.size() != b.records.size()) return false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const auto& x = a.records[i];
    const auto& y = b.records[i];
    if (x.x.size() != y.x.size()) return false;
    for (std::size_t j = 0; j < x.x.size(); ++j)
      if (!same_bits(x.x[j], y.x[j])) return false;
    if (!same_bits(x.eval.fom, y.eval.fom) || !same_bits(x.eval.bv, y.eval.bv)) return false;
  }
  return true;
}

RunRecord rec(std::size_t it, double bv, double fom, bool valid = true) {
  RunRecord r;
  r.iteration = it;
  r.eval = valid ? Evaluation::make_valid(bv, bv * bv / fom) : Evaluation::make_invalid("x");
  if (valid) r.eval.fom = fom;
  return r;
}

// Checks every BO iteration against a recomputation from the records that
// preceded it.
void check_replay(const RunConfig& cfg, const Dataset& ds, const std::vector<Progress>& log) {
  REQUIRE(log.size() == ds.records.size());
  std::size_t step = 0;
  std::size_t prev_iteration = 0;
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const auto& r = ds.records[i];
    CHECK(r.iteration == i + 1);
    CHECK(r.iteration > prev_iteration);
    prev_iteration = r.iteration;
    CHECK(cfg.space.contains(r.x));
    if (r.phase == Phase::kInit) {
      CHECK(r.lambda_used == 0.0);
      continue;
    }
    const auto& p = log[i];
    // A retry repeats the state of the slot it retries.
    const bool retry = i > 0 && !ds.records[i - 1].eval.valid && ds.records[i - 1].phase == Phase::kBo;
    if (!retry) ++step;
    std::size_t first_of_slot = i;
    while (first_of_slot > 0 && !ds.records[first_of_slot - 1].eval.valid &&
           ds.records[first_of_slot - 1].phase == Phase::kBo)
      --first_of_slot;

    const auto history = ds.frontier_points(first_of_slot);
    std::vector<std::size_t> sources;
    for (const auto& fp : history) sources.push_back(fp.source_index);
    CHECK(p.training_sources == sources);
    for (std::size_t s : p.training_sources) CHECK(ds.records[s].eval.valid);

    if (cfg.mode == Mode::kUnconstrained || step <= cfg.warmup_unconstrained || cfg.force_zero_lambda) {
      CHECK(r.lambda_used == 0.0);
      CHECK(p.hull_sources.empty());
    } else {
      REQUIRE(r.target_used);
      const auto state = multiplier(upper_hull(history), *r.target_used);
      CHECK(same_bits(r.lambda_used, state.lambda));
      std::vector<std::size_t> hs;
      for (const auto& h : state.hull.points) hs.push_back(h.source_index);
      CHECK(p.hull_sources == hs);
    }
    for (std::size_t k = 0; k < sources.size(); ++k) {
      const auto& src = ds.records[sources[k]];
      const double want = r.target_used ? lagrangian(src.eval.fom, src.eval.bv, r.lambda_used, *r.target_used)
                                        : src.eval.fom;
      CHECK(same_bits(p.training_labels[k], want));
    }
  }
}

}  // namespace

TEST_CASE("unconstrained run") {
  const auto cfg = toy(Mode::kUnconstrained, 1, 100);
  std::vector<Progress> log;
  const auto ds = run(cfg, [&](const Progress& p) { log.push_back(p); });
  REQUIRE(ds.records.size() == 100);
  CHECK(ds.valid_count() == 100);
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const auto& r = ds.records[i];
    CHECK(r.phase == (i < 10 ? Phase::kInit : Phase::kBo));
    CHECK(r.lambda_used == 0.0);
    CHECK_FALSE(r.target_used);
    CHECK(r.objective_label == r.eval.fom);
  }
  check_replay(cfg, ds, log);
  CHECK(best_record(ds)->eval.fom > 1000.0);
}

TEST_CASE("constrained run: warmup, relabeling and lambda replay") {
  const auto cfg = toy(Mode::kConstrained, 2);
  std::vector<Progress> log;
  const auto ds = run(cfg, [&](const Progress& p) { log.push_back(p); });
  REQUIRE(ds.records.size() == 40);
  CHECK(ds.records[10].lambda_used == 0.0);
  CHECK(ds.records[11].lambda_used == 0.0);
  for (const auto& r : ds.records) CHECK(r.target_used == 50.0);
  check_replay(cfg, ds, log);

  bool saw_nonzero = false;
  for (const auto& r : ds.records) saw_nonzero = saw_nonzero || r.lambda_used != 0.0;
  CHECK(saw_nonzero);

  // Within a stretch of equal lambda the incumbent never falls.
  for (std::size_t i = 1; i < log.size(); ++i)
    if (log[i].phase == Phase::kBo && log[i - 1].phase == Phase::kBo && log[i].lambda == log[i - 1].lambda)
      CHECK(log[i].incumbent >= log[i - 1].incumbent);
}

TEST_CASE("warmup count is configurable") {
  auto cfg = toy(Mode::kConstrained, 3, 20);
  cfg.warmup_unconstrained = 5;
  std::vector<Progress> log;
  const auto ds = run(cfg, [&](const Progress& p) { log.push_back(p); });
  for (std::size_t i = 10; i < 15; ++i) CHECK(ds.records[i].lambda_used == 0.0);
  check_replay(cfg, ds, log);
}

TEST_CASE("frontier run draws per-iteration targets in range") {
  const auto cfg = toy(Mode::kFrontier, 4, 50);
  std::vector<Progress> log;
  const auto ds = run(cfg, [&](const Progress& p) { log.push_back(p); });
  std::vector<double> targets;
  for (const auto& r : ds.records) {
    if (r.phase == Phase::kInit) {
      CHECK_FALSE(r.target_used);
      continue;
    }
    REQUIRE(r.target_used);
    CHECK(*r.target_used >= 35.0);
    CHECK(*r.target_used < 50.0);
    targets.push_back(*r.target_used);
  }
  std::sort(targets.begin(), targets.end());
  CHECK(std::unique(targets.begin(), targets.end()) == targets.end());
  check_replay(cfg, ds, log);
}

TEST_CASE("ldmos9 frontier run") {
  RunConfig cfg;
  cfg.space = DesignSpace::ldmos9();
  cfg.evaluator = EvaluatorSpec::builtin("ldmos9-surrogate");
  cfg.mode = Mode::kFrontier;
  cfg.bv_low = 30;
  cfg.bv_high = 50;
  cfg.n_total = 40;
  cfg.seed = 8;
  std::vector<Progress> log;
  const auto ds = run(cfg, [&](const Progress& p) { log.push_back(p); });
  CHECK(ds.records.size() == 40);
  check_replay(cfg, ds, log);
}

TEST_CASE("determinism") {
  for (auto mode : {Mode::kUnconstrained, Mode::kConstrained, Mode::kFrontier}) {
    const auto cfg = toy(mode, 5, 30);
    const auto a = run(cfg);
    const auto b = run(cfg);
    CHECK(same_trajectory(a, b));
    for (std::size_t i = 0; i < a.records.size(); ++i) {
      CHECK(same_bits(a.records[i].lambda_used, b.records[i].lambda_used));
      CHECK(a.records[i].target_used == b.records[i].target_used);
    }
  }
  CHECK_FALSE(same_trajectory(run(toy(Mode::kUnconstrained, 5, 30)), run(toy(Mode::kUnconstrained, 6, 30))));
}

TEST_CASE("forcing lambda to zero reproduces the unconstrained trajectory") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto forced = toy(Mode::kConstrained, seed, 40);
    forced.force_zero_lambda = true;
    const auto a = run(forced);
    const auto b = run(toy(Mode::kUnconstrained, seed, 40));
    CHECK(same_trajectory(a, b));
    for (const auto& r : a.records) CHECK(r.lambda_used == 0.0);
  }
}

TEST_CASE("maximum-likelihood length-scale campaign runs") {
  auto cfg = toy(Mode::kConstrained, 9, 25);
  cfg.gp.optimize_length_scale = true;
  const auto ds = run(cfg);
  CHECK(ds.valid_count() == 25);
}

TEST_CASE("invalid evaluations are logged, retried and kept out of fits") {
  auto cfg = toy(Mode::kConstrained, 11, 30);
  cfg.evaluator = EvaluatorSpec::subprocess({CBO_PYTHON, CBO_ECHO_EVALUATOR, "mixed"}, 0.5);
  std::vector<Progress> log;
  const auto ds = run(cfg, [&](const Progress& p) { log.push_back(p); });
  CHECK(ds.valid_count() == 30);
  CHECK(ds.records.size() > 30);
  for (const auto& r : ds.records) {
    if (r.eval.valid) continue;
    CHECK(std::isnan(r.eval.fom));
    CHECK(std::isnan(r.objective_label));
  }
  check_replay(cfg, ds, log);
  for (const auto& p : log)
    for (std::size_t h : p.hull_sources) CHECK(ds.records[h].eval.valid);
}

TEST_CASE("persistent evaluator failure aborts with the partial history") {
  auto cfg = toy(Mode::kUnconstrained, 12, 20);
  cfg.evaluator = EvaluatorSpec::subprocess({CBO_PYTHON, CBO_ECHO_EVALUATOR, "error"}, 5.0);
  Campaign c(cfg);
  CHECK_THROWS_AS(c.run(), EvaluatorUnavailable);
  CHECK_FALSE(c.complete());
  CHECK(c.dataset().records.size() == 4);
  for (const auto& r : c.dataset().records) CHECK_FALSE(r.eval.valid);

  cfg.evaluator = EvaluatorSpec::subprocess({"/nonexistent/evaluator"}, 5.0);
  Campaign d(cfg);
  CHECK_THROWS_AS(d.run(), EvaluatorUnavailable);
  CHECK(d.dataset().records.empty());
}

TEST_CASE("config validation") {
  auto c = toy(Mode::kUnconstrained, 1);
  c.n_init = 0;
  CHECK_THROWS_AS(c.check(), ConfigError);
  c = toy(Mode::kUnconstrained, 1);
  c.n_total = 10;
  CHECK_THROWS_AS(c.check(), ConfigError);
  c = toy(Mode::kFrontier, 1);
  c.bv_low = 50;
  c.bv_high = 50;
  CHECK_THROWS_AS(c.check(), ConfigError);
  c = toy(Mode::kUnconstrained, 1);
  c.space = DesignSpace::ldmos9();
  CHECK_THROWS_AS(c.check(), ConfigError);
  CHECK(parse_mode("frontier") == Mode::kFrontier);
  CHECK_THROWS_AS(parse_mode("pareto"), ConfigError);
}

TEST_CASE("best_feasible") {
  Dataset ds;
  const Feasibility at_least;
  CHECK_FALSE(best_feasible(ds, 50, at_least));

  ds.records = {rec(1, 49, 250), rec(2, 51, 207)};
  CHECK(best_feasible(ds, 50, at_least)->iteration == 2);
  CHECK(best_feasible(ds, 40, at_least)->iteration == 1);

  ds.records = {rec(1, 52, 100), rec(2, 53, 300), rec(3, 60, 300), rec(4, 70, 900, false)};
  CHECK(best_feasible(ds, 50, at_least)->iteration == 2);
  CHECK(best_record(ds)->iteration == 2);

  Feasibility within{Feasibility::Rule::kWithin, 1.5};
  ds.records = {rec(1, 48, 500), rec(2, 49, 400), rec(3, 51, 300)};
  CHECK(best_feasible(ds, 50, within)->iteration == 2);
  CHECK_FALSE(best_feasible(ds, 55, within));
}

TEST_CASE("frontier_report") {
  Dataset ds;
  CHECK_THROWS_AS(frontier_report(ds), DomainError);
  ds.records = {rec(1, 40, 100, false), rec(2, 45, 120)};
  auto h = frontier_report(ds);
  REQUIRE(h.size() == 1);
  CHECK(h.points[0].source_index == 1);

  ds.records = {rec(1, 45, 100), rec(2, 45, 130), rec(3, 45, 90)};
  h = frontier_report(ds);
  REQUIRE(h.size() == 1);
  CHECK(h.points[0].fom == 130);
}
