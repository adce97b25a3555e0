#include "core/oracle.hpp"

#include <algorithm>
#include <functional>

#include "core/error.hpp"
#include "core/random.hpp"

namespace cbo {

OracleResult toy2d_grid_oracle(std::size_t resolution, std::optional<double> target) {
  if (resolution < 2) throw ConfigError("grid resolution must be >= 2");
  OracleResult out;
  out.evaluator = "toy2d";
  out.target = target;
  bool have = false;
  for (std::size_t i = 0; i < resolution; ++i) {
    for (std::size_t j = 0; j < resolution; ++j) {
      const double n = static_cast<double>(resolution - 1);
      const DesignPoint x{static_cast<double>(i) / n, static_cast<double>(j) / n};
      const auto e = toy2d(x);
      ++out.evaluations;
      if (!have || e.fom > out.best.fom) {
        out.best = e;
        out.best_x = x;
        have = true;
      }
      if (target && e.bv >= *target && (!out.constrained || e.fom > out.constrained->fom)) {
        out.constrained = e;
        out.constrained_x = x;
      }
    }
  }
  return out;
}

namespace {

// Greedy coordinate descent in normalized coordinates, accepting a move only
// if it improves fom and keeps `feasible` true.
void refine(const DesignSpace& space, UnitPoint& u, Evaluation& best, std::size_t& evals,
            const std::function<bool(const Evaluation&)>& feasible) {
  double step = 0.05;
  for (int sweep = 0; sweep < 100 && step >= 1e-5; ++sweep) {
    bool improved = false;
    for (std::size_t j = 0; j < u.size(); ++j) {
      for (const double sign : {+1.0, -1.0}) {
        UnitPoint trial = u;
        trial[j] = std::clamp(u[j] + sign * step, 0.0, 1.0);
        if (trial[j] == u[j]) continue;
        const auto e = ldmos9_surrogate(space.denormalize(trial));
        ++evals;
        if (feasible(e) && e.fom > best.fom) {
          u = std::move(trial);
          best = e;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
}

}  // namespace

OracleResult ldmos9_random_oracle(std::size_t samples, std::uint64_t seed, std::optional<double> target) {
  if (samples < 1) throw ConfigError("oracle needs at least one sample");
  const auto space = DesignSpace::ldmos9();
  OracleResult out;
  out.evaluator = "ldmos9-surrogate";
  out.target = target;
  Rng rng(seed);
  UnitPoint u(space.size());
  UnitPoint best_u, best_cu;
  for (std::size_t k = 0; k < samples; ++k) {
    for (auto& v : u) v = rng.uniform();
    const auto e = ldmos9_surrogate(space.denormalize(u));
    ++out.evaluations;
    if (best_u.empty() || e.fom > out.best.fom) {
      out.best = e;
      best_u = u;
    }
    if (target && e.bv >= *target && (!out.constrained || e.fom > out.constrained->fom)) {
      out.constrained = e;
      best_cu = u;
    }
  }
  refine(space, best_u, out.best, out.evaluations, [](const Evaluation&) { return true; });
  out.best_x = space.denormalize(best_u);
  if (out.constrained) {
    const double t = *target;
    refine(space, best_cu, *out.constrained, out.evaluations, [t](const Evaluation& e) { return e.bv >= t; });
    out.constrained_x = space.denormalize(best_cu);
  }
  return out;
}

OracleResult run_oracle(const std::string& evaluator, std::optional<double> target, std::size_t resolution,
                        std::uint64_t seed, std::size_t samples) {
  if (evaluator == "toy2d") return toy2d_grid_oracle(resolution, target);
  if (evaluator == "ldmos9-surrogate") return ldmos9_random_oracle(samples, seed, target);
  throw ConfigError("oracle supports only builtin evaluators (toy2d, ldmos9-surrogate), not '" + evaluator + "'");
}

}  // namespace cbo
